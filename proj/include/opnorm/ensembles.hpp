#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "opnorm/matrix.hpp"
#include "opnorm/rng.hpp"

namespace opnorm {

// ---------------------------------------------------------------------------
// Scalar laws. All are symmetric with zero mean. StudentT is the only
// law without a sub-Gaussian tail and serves as a negative control.
// ---------------------------------------------------------------------------

struct Gaussian {
  double sigma = 1.0;
};
struct Rademacher {};
struct UniformSym {
  double half_width = 1.0;
};
// Gaussian(sigma) conditioned on |x| <= cap (sampled by rejection).
struct TruncGaussian {
  double sigma = 1.0;
  double cap = 3.0;
};
struct StudentT {
  double dof = 3.0;
};

using ScalarDist = std::variant<Gaussian, Rademacher, UniformSym, TruncGaussian, StudentT>;

// P(|xi| > t) <= B exp(-b t^2). sigma is the variance proxy when known, 0 otherwise.
struct SubGaussianParams {
  double B = 0.0;
  double b = 0.0;
  double sigma = 0.0;
};

// ---------------------------------------------------------------------------
// Row mixers: turn an iid row into a row with dependent entries.
// ---------------------------------------------------------------------------

struct IdentityMixer {};
// One fixed orthogonal matrix Q (seeded) applied to every row: r -> Q r.
struct FixedRotation {
  std::uint64_t seed = 0;
};
// entry_j = sqrt(1-load) z_j + sqrt(load) w, with one shared w per row.
struct CommonFactor {
  double load = 0.5;
};

using RowMixer = std::variant<IdentityMixer, FixedRotation, CommonFactor>;

struct IidEntries {
  ScalarDist dist;
};
struct IndependentRows {
  ScalarDist base;
  RowMixer mixer;
};
struct AllOnes {};

using EnsembleSpec = std::variant<IidEntries, IndependentRows, AllOnes>;

void validate(const ScalarDist& dist);
void validate(const EnsembleSpec& spec);

double sample_scalar(const ScalarDist& dist, Engine& eng);

// Tail constants (B, b) valid for every t > 0. Throws NotSubGaussianError for StudentT.
SubGaussianParams tail_params_of(const ScalarDist& dist);

// Deterministic in (spec, dims, seed). Throws ParameterError on invalid laws.
Matrix sample_matrix(const EnsembleSpec& spec, std::size_t n_rows, std::size_t n_cols,
                     std::uint64_t seed);

// Deterministic orthogonal n x n matrix (Gram-Schmidt on a seeded Gaussian matrix).
Matrix random_orthogonal(std::size_t n, std::uint64_t seed);

bool is_all_ones(const EnsembleSpec& spec);
std::string describe(const ScalarDist& dist);
std::string describe(const EnsembleSpec& spec);

}  // namespace opnorm
