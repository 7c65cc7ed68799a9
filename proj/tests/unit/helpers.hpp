#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "skgs/grid.hpp"

namespace testing {

inline double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)});
}

inline double max_abs(const skgs::Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Scratch directory for files a test writes.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const char* env = std::getenv("SKGS_TEST_TMP");
    std::filesystem::path base = env ? env : std::filesystem::temp_directory_path() / "skgs_tests";
    base /= name;
    std::filesystem::remove_all(base);
    std::filesystem::create_directories(base);
    return base;
}

// Deterministic pseudo-random values for test inputs (not the solver's
// generator, so the tests do not lean on it).
struct Lcg {
    unsigned long long s;
    explicit Lcg(unsigned long long seed) : s(seed * 2862933555777941757ULL + 3037000493ULL) {}
    double next() {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(s >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    }
    skgs::Vec vec(int n) {
        skgs::Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = next();
        return v;
    }
    skgs::FieldState state(int n, double scale = 1.0) {
        skgs::FieldState x;
        x.P = scale * vec(n);
        x.Q = scale * vec(n);
        x.U = scale * vec(n);
        x.V = scale * vec(n);
        return x;
    }
};

}  // namespace testing
