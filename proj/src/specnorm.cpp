#include "opnorm/specnorm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "opnorm/errors.hpp"
#include "opnorm/rng.hpp"

namespace opnorm {

namespace {

Matrix gram(const Matrix& m) {
  // Contract over the longer dimension so the Gram matrix is the smaller one.
  const bool use_rows = m.rows() <= m.cols();
  const std::size_t k = use_rows ? m.rows() : m.cols();
  Matrix g(k, k);
  if (use_rows) {
    for (std::size_t i = 0; i < k; ++i) {
      auto ri = m.row(i);
      for (std::size_t j = 0; j <= i; ++j) {
        auto rj = m.row(j);
        double acc = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) acc += ri[c] * rj[c];
        g(i, j) = g(j, i) = acc;
      }
    }
  } else {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto row = m.row(r);
      for (std::size_t i = 0; i < k; ++i) {
        const double ri = row[i];
        if (ri == 0.0) continue;
        auto gi = g.row(i);
        for (std::size_t j = 0; j <= i; ++j) gi[j] += ri * row[j];
      }
    }
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < i; ++j) g(j, i) = g(i, j);
  }
  return g;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

std::vector<double> symmetric_eigenvalues(Matrix a, double rel_tol) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw ShapeError("symmetric_eigenvalues: matrix is not square");

  double total = 0.0;
  for (double x : a.data()) total += x * x;
  const double target = rel_tol * std::sqrt(total);

  auto off_norm = [&] {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) off += a(i, j) * a(i, j);
    return std::sqrt(off);
  };

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && off_norm() > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Rutishauser's stable rotation.
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        auto rp = a.row(p);
        auto rq = a.row(q);
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = rp[k];
          const double akq = rq[k];
          rp[k] = c * akp - s * akq;
          rq[k] = s * akp + c * akq;
        }
        // Columns mirror rows by symmetry.
        for (std::size_t k = 0; k < n; ++k) {
          a(k, p) = rp[k];
          a(k, q) = rq[k];
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return eig;
}

double opnorm_exact(const Matrix& m) {
  if (std::max(m.rows(), m.cols()) > kExactNormMaxDim) {
    throw ScaleError("opnorm_exact: dimension " + std::to_string(std::max(m.rows(), m.cols())) +
                     " exceeds the exact-oracle limit " + std::to_string(kExactNormMaxDim));
  }
  if (!m.all_finite()) throw DataError("opnorm_exact: matrix has non-finite entries");
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  const auto eig = symmetric_eigenvalues(gram(m));
  return std::sqrt(std::max(0.0, eig.front()));
}

PowerResult opnorm_power(const Matrix& m, double rtol, int max_iter, std::uint64_t restart_seed) {
  if (!(rtol > 0.0)) throw ParameterError("opnorm_power: rtol must be positive");
  if (max_iter < 1) throw ParameterError("opnorm_power: max_iter must be >= 1");
  if (!m.all_finite()) throw DataError("opnorm_power: matrix has non-finite entries");

  const std::size_t n = m.cols();
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));

  double scale = 0.0;
  for (double x : m.data()) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return {0.0, 1, 0.0};
  // Images below this are treated as numerically null.
  const double null_tol = 1e-13 * scale * std::sqrt(static_cast<double>(m.rows() * m.cols()));

  auto y = m.apply(v);
  if (norm2(y) <= null_tol) {
    Engine eng(restart_seed);
    uniform_sphere_point(eng, v);
    y = m.apply(v);
  }

  double estimate = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const double lower = norm2(y);  // ||M v||
    if (lower == 0.0) return {0.0, it, 0.0};
    auto w = m.apply_transpose(y);  // M^T M v
    const double wn = norm2(w);
    estimate = wn / lower;  // ||M^T M v|| / ||M v|| >= ||M v||
    const double residual = (estimate - lower) / estimate;
    if (residual <= rtol) return {estimate, it, residual};
    for (std::size_t j = 0; j < n; ++j) v[j] = w[j] / wn;
    y = m.apply(v);
  }
  throw ConvergenceError("opnorm_power: no convergence within " + std::to_string(max_iter) +
                             " iterations",
                         estimate);
}

double opnorm_closed(const Matrix& m, NormKind kind) {
  switch (kind) {
    case NormKind::Spectral:
      throw KindError("opnorm_closed: the spectral norm has no closed form here");
    case NormKind::Inf: {
      double best = 0.0;
      for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (double x : m.row(i)) s += std::abs(x);
        best = std::max(best, s);
      }
      return best;
    }
    case NormKind::One: {
      std::vector<double> sums(m.cols(), 0.0);
      for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) sums[j] += std::abs(r[j]);
      }
      return sums.empty() ? 0.0 : *std::max_element(sums.begin(), sums.end());
    }
  }
  throw KindError("opnorm_closed: unknown norm kind");
}

double mat_vec_image_norm(const Matrix& m, std::span<const double> u) {
  if (u.size() != m.cols()) {
    throw ShapeError("mat_vec_image_norm: vector length " + std::to_string(u.size()) +
                     " does not match " + std::to_string(m.cols()) + " columns");
  }
  const double nu = std::sqrt(dot(u, u));
  if (std::abs(nu - 1.0) > 1e-12) {
    throw NormalizationError("mat_vec_image_norm: ||u|| = " + std::to_string(nu) +
                             " is not 1 within 1e-12");
  }
  return norm2(m.apply(u));
}

}  // namespace opnorm
