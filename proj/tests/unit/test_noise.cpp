#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>
#include <vector>

#include "skgs/error.hpp"
#include "skgs/noise.hpp"

using namespace skgs;

TEST_SUITE("noise") {

TEST_CASE("uniforms stay inside (0, 1)") {
    for (std::uint64_t k = 0; k < 20000; ++k) {
        const double u = counter_uniform(1, k, 0);
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("normals: moments and distribution") {
    const int n = 200000;
    std::vector<double> z(n);
    double sum = 0, sum2 = 0, sum4 = 0;
    for (int i = 0; i < n; ++i) {
        z[i] = counter_normal(12345, static_cast<std::uint64_t>(i), 2);
        sum += z[i];
        sum2 += z[i] * z[i];
        sum4 += std::pow(z[i], 4);
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(n));
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(sum4 / n - 3.0) < 4.0 * std::sqrt(96.0 / n));

    // Kolmogorov-Smirnov distance against Phi(x) = erfc(-x / sqrt 2) / 2
    std::sort(z.begin(), z.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        const double F = 0.5 * std::erfc(-z[i] / std::numbers::sqrt2);
        d = std::max({d, std::abs(F - static_cast<double>(i) / n),
                      std::abs(F - static_cast<double>(i + 1) / n)});
    }
    CHECK(d < 1.63 / std::sqrt(n));  // 1% critical value
}

TEST_CASE("components and steps are independent streams") {
    const int n = 50000;
    double c01 = 0, c02 = 0, lag = 0;
    double prev = counter_normal(9, 0, 0);
    for (int i = 0; i < n; ++i) {
        const double a = counter_normal(9, i, 0);
        c01 += a * counter_normal(9, i, 1);
        c02 += a * counter_normal(9, i, 2);
        if (i > 0) lag += a * prev;
        prev = a;
    }
    CHECK(std::abs(c01 / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(c02 / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(lag / n) < 4.0 / std::sqrt(n));
}

TEST_CASE("increments have variance dt and are reproducible") {
    const double dt = 0.01;
    const int n = 40000;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const NoiseIncrement a = increment_at(77, i, dt);
        const NoiseIncrement b = increment_at(77, i, dt);
        REQUIRE(a.dB0 == b.dB0);
        REQUIRE(a.dB2 == b.dB2);
        s2 += a.dB0 * a.dB0 + a.dB1 * a.dB1 + a.dB2 * a.dB2;
    }
    CHECK(s2 / (3.0 * n) == doctest::Approx(dt).epsilon(0.03));
}

TEST_CASE("derived seeds are distinct") {
    std::unordered_set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 100000; ++i) seen.insert(derive_seed(42, i));
    CHECK(seen.size() == 100000);
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("sample_path agrees with on-demand increments") {
    const BrownianPath p = sample_path(5, 0.25, 16);
    REQUIRE(p.increments.size() == 16);
    for (int i = 0; i < 16; ++i) {
        const NoiseIncrement a = increment_at(5, i, 0.25);
        CHECK(p.increments[i].dB1 == a.dB1);
    }
}

TEST_CASE("aggregate sums consecutive blocks left to right") {
    const BrownianPath p = sample_path(3, 1.0 / 256, 256);
    for (int k : {1, 2, 4, 32, 256}) {
        const auto coarse = aggregate(p, k);
        REQUIRE(coarse.size() == static_cast<std::size_t>(256 / k));
        for (std::size_t j = 0; j < coarse.size(); ++j) {
            double s0 = 0.0, s1 = 0.0, s2 = 0.0;
            for (int i = 0; i < k; ++i) {
                const NoiseIncrement& f = p.increments[j * k + i];
                s0 += f.dB0;
                s1 += f.dB1;
                s2 += f.dB2;
            }
            CHECK(coarse[j].dB0 == s0);
            CHECK(coarse[j].dB1 == s1);
            CHECK(coarse[j].dB2 == s2);
        }
    }
    // aggregating twice in nested blocks covers the same Brownian path up to rounding
    const auto by4 = aggregate(p, 4);
    double total_fine = 0.0, total_coarse = 0.0;
    for (const auto& f : p.increments) total_fine += f.dB0;
    for (const auto& c : by4) total_coarse += c.dB0;
    CHECK(total_coarse == doctest::Approx(total_fine).epsilon(1e-12));
    CHECK_THROWS_AS(aggregate(p, 3), UsageError);
    CHECK_THROWS_AS(aggregate(p, 0), UsageError);
}

TEST_CASE("generator is named") {
    CHECK_FALSE(kGeneratorName.empty());
}

}
