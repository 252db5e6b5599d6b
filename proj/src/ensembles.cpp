#include "opnorm/ensembles.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "opnorm/errors.hpp"
#include "opnorm/util.hpp"

namespace opnorm {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParameterError(std::string(name) + " must be a finite positive number");
  }
}

std::string fmt(double v) { return format_real(v); }

}  // namespace

void validate(const ScalarDist& dist) {
  std::visit(overloaded{
                 [](const Gaussian& g) { require_positive(g.sigma, "sigma"); },
                 [](const Rademacher&) {},
                 [](const UniformSym& u) { require_positive(u.half_width, "half_width"); },
                 [](const TruncGaussian& t) {
                   require_positive(t.sigma, "sigma");
                   require_positive(t.cap, "cap");
                 },
                 [](const StudentT& s) { require_positive(s.dof, "dof"); },
             },
             dist);
}

void validate(const EnsembleSpec& spec) {
  std::visit(overloaded{
                 [](const IidEntries& e) { validate(e.dist); },
                 [](const IndependentRows& r) {
                   validate(r.base);
                   if (const auto* cf = std::get_if<CommonFactor>(&r.mixer)) {
                     if (!(cf->load >= 0.0 && cf->load < 1.0)) {
                       throw ParameterError("load must lie in [0, 1)");
                     }
                   }
                 },
                 [](const AllOnes&) {},
             },
             spec);
}

double sample_scalar(const ScalarDist& dist, Engine& eng) {
  return std::visit(overloaded{
                        [&](const Gaussian& g) { return g.sigma * standard_normal(eng); },
                        [&](const Rademacher&) { return rademacher(eng); },
                        [&](const UniformSym& u) {
                          return u.half_width * (2.0 * uniform01(eng) - 1.0);
                        },
                        [&](const TruncGaussian& t) {
                          for (;;) {
                            const double x = t.sigma * standard_normal(eng);
                            if (std::abs(x) <= t.cap) return x;
                          }
                        },
                        [&](const StudentT& s) {
                          const double z = standard_normal(eng);
                          const double chi2 = 2.0 * standard_gamma(eng, 0.5 * s.dof);
                          return z / std::sqrt(chi2 / s.dof);
                        },
                    },
                    dist);
}

SubGaussianParams tail_params_of(const ScalarDist& dist) {
  validate(dist);
  return std::visit(
      overloaded{
          [](const Gaussian& g) {
            return SubGaussianParams{2.0, 1.0 / (2.0 * g.sigma * g.sigma), g.sigma};
          },
          // P(|xi| > t) = 1 for t < 1 and 0 afterwards; e*exp(-t^2) >= 1 on t < 1.
          [](const Rademacher&) { return SubGaussianParams{std::numbers::e, 1.0, 1.0}; },
          // 1 - t/h <= 1 <= e*exp(-t^2/h^2) on t < h.
          [](const UniformSym& u) {
            return SubGaussianParams{std::numbers::e, 1.0 / (u.half_width * u.half_width),
                                     u.half_width};
          },
          // Conditioning on |x| <= cap inflates the Gaussian tail by at most 1/P(|x| <= cap).
          [](const TruncGaussian& t) {
            const double kept = std::erf(t.cap / (t.sigma * std::numbers::sqrt2));
            return SubGaussianParams{2.0 / kept, 1.0 / (2.0 * t.sigma * t.sigma), t.sigma};
          },
          [](const StudentT& s) -> SubGaussianParams {
            throw NotSubGaussianError("StudentT(" + fmt(s.dof) +
                                      ") has polynomial tails and is not sub-Gaussian");
          },
      },
      dist);
}

Matrix random_orthogonal(std::size_t n, std::uint64_t seed) {
  Engine eng(mix64(seed ^ 0x6f7274686f676f6eULL));
  Matrix q(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q(i, j) = standard_normal(eng);
  // Modified Gram-Schmidt over rows, applied twice for orthogonality to
  // working precision.
  for (std::size_t i = 0; i < n; ++i) {
    auto ri = q.row(i);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < i; ++k) {
        auto rk = q.row(k);
        double dot = 0.0;
        for (std::size_t j = 0; j < n; ++j) dot += ri[j] * rk[j];
        for (std::size_t j = 0; j < n; ++j) ri[j] -= dot * rk[j];
      }
    }
    const double nrm = norm2(ri);
    for (auto& x : ri) x /= nrm;
  }
  return q;
}

namespace {

// Rotations are reused across trials of a sweep; rebuilding one costs O(n^3).
std::shared_ptr<const Matrix> cached_orthogonal(std::size_t n, std::uint64_t seed) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, std::uint64_t>, std::shared_ptr<const Matrix>> cache;
  constexpr std::size_t kMaxEntries = 8;
  const auto key = std::make_pair(n, seed);
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto q = std::make_shared<const Matrix>(random_orthogonal(n, seed));
  std::lock_guard lock(mu);
  if (cache.size() >= kMaxEntries) cache.clear();
  cache.emplace(key, q);
  return q;
}

}  // namespace

Matrix sample_matrix(const EnsembleSpec& spec, std::size_t n_rows, std::size_t n_cols,
                     std::uint64_t seed) {
  if (n_rows == 0 || n_cols == 0) throw ParameterError("matrix dimensions must be >= 1");
  validate(spec);
  if (is_all_ones(spec)) return Matrix::ones(n_rows, n_cols);

  Matrix m(n_rows, n_cols);
  // Each row has its own counter-derived stream, so rows can be produced in
  // any order with identical results.
  if (const auto* iid = std::get_if<IidEntries>(&spec)) {
    for (std::size_t i = 0; i < n_rows; ++i) {
      Engine eng(derive_trial_seed(seed, i));
      for (auto& x : m.row(i)) x = sample_scalar(iid->dist, eng);
    }
    return m;
  }

  const auto& rows = std::get<IndependentRows>(spec);
  std::shared_ptr<const Matrix> rotation;
  if (const auto* rot = std::get_if<FixedRotation>(&rows.mixer)) {
    rotation = cached_orthogonal(n_cols, rot->seed);
  }
  std::vector<double> z(n_cols);
  for (std::size_t i = 0; i < n_rows; ++i) {
    Engine eng(derive_trial_seed(seed, i));
    for (auto& x : z) x = sample_scalar(rows.base, eng);
    auto out = m.row(i);
    std::visit(overloaded{
                   [&](const IdentityMixer&) { std::copy(z.begin(), z.end(), out.begin()); },
                   [&](const FixedRotation&) {
                     for (std::size_t j = 0; j < n_cols; ++j) {
                       auto qj = rotation->row(j);
                       double acc = 0.0;
                       for (std::size_t k = 0; k < n_cols; ++k) acc += qj[k] * z[k];
                       out[j] = acc;
                     }
                   },
                   [&](const CommonFactor& cf) {
                     const double w = sample_scalar(rows.base, eng);
                     const double a = std::sqrt(1.0 - cf.load);
                     const double c = std::sqrt(cf.load);
                     for (std::size_t j = 0; j < n_cols; ++j) out[j] = a * z[j] + c * w;
                   },
               },
               rows.mixer);
  }
  return m;
}

bool is_all_ones(const EnsembleSpec& spec) { return std::holds_alternative<AllOnes>(spec); }

std::string describe(const ScalarDist& dist) {
  return std::visit(
      overloaded{
          [](const Gaussian& g) { return "Gaussian(" + fmt(g.sigma) + ")"; },
          [](const Rademacher&) { return std::string("Rademacher"); },
          [](const UniformSym& u) { return "UniformSym(" + fmt(u.half_width) + ")"; },
          [](const TruncGaussian& t) {
            return "TruncGaussian(" + fmt(t.sigma) + ", " + fmt(t.cap) + ")";
          },
          [](const StudentT& s) { return "StudentT(" + fmt(s.dof) + ")"; },
      },
      dist);
}

std::string describe(const EnsembleSpec& spec) {
  return std::visit(
      overloaded{
          [](const IidEntries& e) { return "IidEntries(" + describe(e.dist) + ")"; },
          [](const IndependentRows& r) {
            std::string mixer = std::visit(
                overloaded{
                    [](const IdentityMixer&) { return std::string("Identity"); },
                    [](const FixedRotation& f) {
                      return "FixedRotation(" + std::to_string(f.seed) + ")";
                    },
                    [](const CommonFactor& c) { return "CommonFactor(" + fmt(c.load) + ")"; },
                },
                r.mixer);
            return "IndependentRows(" + describe(r.base) + ", " + mixer + ")";
          },
          [](const AllOnes&) { return std::string("AllOnes"); },
      },
      spec);
}

}  // namespace opnorm
