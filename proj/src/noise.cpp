#include "skgs/noise.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "skgs/error.hpp"

namespace skgs {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t key_hash(std::uint64_t seed, std::uint64_t step, std::uint32_t component) {
    std::uint64_t h = mix(seed + kGamma);
    h = mix(h ^ (step * kGamma + 0x632be59bd9b4e019ULL));
    h = mix(h + (static_cast<std::uint64_t>(component) + 1) * 0xd1b54a32d192ed03ULL);
    return h;
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t step, std::uint32_t component) {
    const std::uint64_t bits = key_hash(seed, step, component) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double counter_normal(std::uint64_t seed, std::uint64_t step, std::uint32_t component) {
    const double u = counter_uniform(seed, step, component);
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    // master + gamma*(index+1) is injective in index (gamma is odd) and mix is a bijection.
    return mix(master + kGamma * (index + 1));
}

NoiseIncrement increment_at(std::uint64_t seed, std::uint64_t step, double dt) {
    const double s = std::sqrt(dt);
    return {s * counter_normal(seed, step, 0), s * counter_normal(seed, step, 1),
            s * counter_normal(seed, step, 2)};
}

BrownianPath sample_path(std::uint64_t seed, double fine_dt, int n_fine) {
    if (!(fine_dt > 0.0)) throw UsageError("sample_path: fine_dt must be positive");
    if (n_fine < 1) throw UsageError("sample_path: n_fine must be at least 1");
    BrownianPath path{seed, fine_dt, {}};
    path.increments.reserve(n_fine);
    for (int n = 0; n < n_fine; ++n) path.increments.push_back(increment_at(seed, n, fine_dt));
    return path;
}

std::vector<NoiseIncrement> aggregate(const BrownianPath& path, int k) {
    const int n = static_cast<int>(path.increments.size());
    if (k < 1 || n % k != 0) {
        throw UsageError("aggregate: k = " + std::to_string(k) + " does not divide " +
                         std::to_string(n) + " fine steps");
    }
    std::vector<NoiseIncrement> out(n / k);
    for (int j = 0; j < n / k; ++j) {
        NoiseIncrement sum;
        for (int i = j * k; i < (j + 1) * k; ++i) {
            sum.dB0 += path.increments[i].dB0;
            sum.dB1 += path.increments[i].dB1;
            sum.dB2 += path.increments[i].dB2;
        }
        out[j] = sum;
    }
    return out;
}

}  // namespace skgs
