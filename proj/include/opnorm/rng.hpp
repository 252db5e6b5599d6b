#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace opnorm {

// mt19937_64 has a standard-mandated output sequence; all variate
// transformations below are implemented here rather than through
// <random> distributions, whose algorithms are implementation-defined.
using Engine = std::mt19937_64;

// SplitMix64 finalizer. A bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Counter-based seed splitting: injective in trial_index for a fixed
// master seed, and independent of evaluation order.
std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) noexcept;

// Uniform on [0, 1) with 53 random bits.
double uniform01(Engine& eng);
// Standard normal via the Marsaglia polar method.
double standard_normal(Engine& eng);
// Gamma(shape, 1) via Marsaglia-Tsang.
double standard_gamma(Engine& eng, double shape);
// +1 or -1 with equal probability.
double rademacher(Engine& eng);

// Uniform point on the unit sphere of R^dim (normalized Gaussian vector).
void uniform_sphere_point(Engine& eng, std::span<double> out);
std::vector<double> uniform_sphere_point(Engine& eng, std::size_t dim);

}  // namespace opnorm
