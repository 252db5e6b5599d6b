#include "opnorm/rng.hpp"

#include <cmath>

#include "opnorm/matrix.hpp"

namespace opnorm {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) noexcept {
  // mix64(master) + k*golden is injective in k (golden is odd), and mix64 is
  // a bijection, so the composition is injective in k.
  return mix64(mix64(master_seed) + (trial_index + 1) * kGolden);
}

double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double standard_normal(Engine& eng) {
  double u, v, s;
  do {
    u = 2.0 * uniform01(eng) - 1.0;
    v = 2.0 * uniform01(eng) - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  // The second variate of the pair is discarded so that every draw consumes
  // engine output independently of call history.
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

double standard_gamma(Engine& eng, double shape) {
  if (shape < 1.0) {
    // Boost: Gamma(a) = Gamma(a+1) * U^(1/a).
    double g = standard_gamma(eng, shape + 1.0);
    double u;
    do {
      u = uniform01(eng);
    } while (u == 0.0);
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = standard_normal(eng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01(eng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double rademacher(Engine& eng) {
  return (eng() >> 63) ? 1.0 : -1.0;
}

void uniform_sphere_point(Engine& eng, std::span<double> out) {
  double nrm = 0.0;
  do {
    for (auto& x : out) x = standard_normal(eng);
    nrm = norm2(out);
  } while (nrm == 0.0);
  for (auto& x : out) x /= nrm;
}

std::vector<double> uniform_sphere_point(Engine& eng, std::size_t dim) {
  std::vector<double> v(dim);
  uniform_sphere_point(eng, v);
  return v;
}

}  // namespace opnorm
