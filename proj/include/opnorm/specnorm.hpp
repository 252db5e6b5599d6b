#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "opnorm/matrix.hpp"

namespace opnorm {

enum class NormKind { Spectral, One, Inf };

struct PowerResult {
  double value = 0.0;
  int iterations = 0;
  // Relative change of the estimate on the final iteration.
  double residual = 0.0;
};

inline constexpr std::size_t kExactNormMaxDim = 512;

// Largest singular value through a cyclic Jacobi eigendecomposition of the
// Gram matrix (M^T M, or M M^T when that is smaller: same nonzero spectrum).
// Sweeps stop once the off-diagonal Frobenius norm is <= 1e-12 * ||G||_F.
// Throws ScaleError above kExactNormMaxDim and DataError on non-finite input.
double opnorm_exact(const Matrix& m);

// All eigenvalues of a symmetric matrix, descending. Cyclic Jacobi.
std::vector<double> symmetric_eigenvalues(Matrix a, double rel_tol = 1e-12);

// Power iteration on M^T M from the normalized all-ones vector, with a seeded
// random restart when M maps that vector to (numerically) zero. Each step
// yields two successive lower bounds of sigma_max, ||M v|| and
// ||M^T M v|| / ||M v||; it stops when their relative gap is <= rtol.
// Throws ConvergenceError (carrying the last estimate) after max_iter steps.
PowerResult opnorm_power(const Matrix& m, double rtol, int max_iter,
                         std::uint64_t restart_seed = 0x5eed);

// One: max absolute column sum. Inf: max absolute row sum.
// Throws KindError for NormKind::Spectral.
double opnorm_closed(const Matrix& m, NormKind kind);

// ||M u||_2 for a unit vector u. Throws NormalizationError if | ||u|| - 1 | > 1e-12
// and ShapeError on a length mismatch.
double mat_vec_image_norm(const Matrix& m, std::span<const double> u);

}  // namespace opnorm
