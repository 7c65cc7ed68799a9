#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace skgs {

/// Increments of the three scalar Wiener processes over one step.
struct NoiseIncrement {
    double dB0 = 0.0;
    double dB1 = 0.0;
    double dB2 = 0.0;
};

/// Name of the Gaussian generator, written into run metadata because it
/// fixes the bit pattern of every path.
inline constexpr std::string_view kGeneratorName = "splitmix64-counter+inverse-normal-cdf";

/// Uniform in (0, 1) from the key (seed, step, component); never 0 or 1.
double counter_uniform(std::uint64_t seed, std::uint64_t step, std::uint32_t component);
/// Standard normal from the same key, by inversion of the normal CDF.
double counter_normal(std::uint64_t seed, std::uint64_t step, std::uint32_t component);

/// Per-sample seed for ensemble member `index`; injective in `index`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Increment for step `step` at resolution dt, computed on demand.
NoiseIncrement increment_at(std::uint64_t seed, std::uint64_t step, double dt);

struct BrownianPath {
    std::uint64_t master_seed = 0;
    double fine_dt = 0.0;
    std::vector<NoiseIncrement> increments;
};

BrownianPath sample_path(std::uint64_t seed, double fine_dt, int n_fine);

/// Coarse increments: entry j sums fine increments jk .. (j+1)k-1 left to right.
std::vector<NoiseIncrement> aggregate(const BrownianPath& path, int k);

}  // namespace skgs
