#include "opnorm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "opnorm/errors.hpp"
#include "opnorm/stats.hpp"
#include "opnorm/util.hpp"

namespace opnorm {

namespace {

constexpr std::size_t kMinTailSamples = 10'000;
constexpr std::size_t kMinMomentSamples = 10'000;
constexpr int kTailGridPoints = 40;
constexpr double kMaxExpArgument = 700.0;

std::vector<double> sorted_abs(std::span<const double> samples) {
  std::vector<double> a(samples.size());
  std::transform(samples.begin(), samples.end(), a.begin(), [](double x) { return std::abs(x); });
  std::sort(a.begin(), a.end());
  return a;
}

}  // namespace

std::vector<double> empirical_survival(std::span<const double> samples,
                                       std::span<const double> t_grid) {
  if (samples.empty()) throw DataError("empirical_survival: no samples");
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (!(t_grid[k] >= 0.0)) throw ParameterError("empirical_survival: t_grid must be >= 0");
    if (k > 0 && !(t_grid[k] > t_grid[k - 1])) {
      throw ParameterError("empirical_survival: t_grid must be strictly increasing");
    }
  }
  const auto a = sorted_abs(samples);
  const double n = static_cast<double>(a.size());
  std::vector<double> out(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const auto above = a.end() - std::upper_bound(a.begin(), a.end(), t_grid[k]);
    out[k] = static_cast<double>(above) / n;
  }
  return out;
}

TailFit fit_tail_curve(std::span<const double> t_grid, std::span<const double> survival) {
  if (t_grid.size() != survival.size()) throw ParameterError("fit_tail_curve: size mismatch");
  TailFit fit;
  std::vector<double> x, y;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (survival[k] > 0.0) {
      fit.t_grid.push_back(t_grid[k]);
      fit.survival.push_back(survival[k]);
      x.push_back(t_grid[k] * t_grid[k]);
      y.push_back(std::log(survival[k]));
    }
  }
  if (x.size() < 3) {
    throw InsufficientTailError("fewer than 3 grid points with nonzero survival (" +
                                std::to_string(x.size()) + ")");
  }
  const LineFit line = fit_line(x, y);
  fit.b_hat = -line.slope;
  fit.B_hat = std::exp(line.intercept);
  fit.r_squared = line.r_squared;
  fit.non_decaying = !(fit.b_hat > 0.0);

  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  const double xspan = *xmax - *xmin;
  const double yspan = *ymax - *ymin;
  if (xspan > 0.0 && yspan > 0.0) {
    std::vector<double> u(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) u[k] = (x[k] - *xmin) / xspan;
    fit.curvature = fit_quadratic(u, y)[2] / yspan;
  }
  return fit;
}

TailFit fit_tail_params(std::span<const double> samples, double q_low, double q_high) {
  if (!(q_low >= 0.5 && q_low < q_high && q_high < 1.0)) {
    throw ParameterError("fit_tail_params: need 0.5 <= q_low < q_high < 1");
  }
  if (samples.size() < kMinTailSamples) {
    throw ParameterError("fit_tail_params: need at least " + std::to_string(kMinTailSamples) +
                         " samples, got " + std::to_string(samples.size()));
  }
  const auto a = sorted_abs(samples);
  // Levels log-spaced in 1 - q so the far tail gets as many points as the bulk.
  const double lo = std::log(1.0 - q_low);
  const double hi = std::log(1.0 - q_high);
  std::vector<double> grid;
  for (int k = 0; k < kTailGridPoints; ++k) {
    const double q = 1.0 - std::exp(lo + (hi - lo) * k / (kTailGridPoints - 1));
    const double t = quantile_sorted(a, q);
    if (grid.empty() || t > grid.back()) grid.push_back(t);
  }
  const auto surv = empirical_survival(samples, grid);
  return fit_tail_curve(grid, surv);
}

Verdict subgaussian_verdict(const TailFit& fit, double r2_threshold, double curvature_threshold) {
  if (fit.non_decaying || !(fit.b_hat > 0.0)) {
    return {false, "non-decaying tail: fitted b_hat = " + format_real(fit.b_hat) + " <= 0"};
  }
  if (fit.curvature > curvature_threshold) {
    return {false, "heavy tail: log-survival curves upward in t^2 (curvature " +
                       format_real(fit.curvature) + " > " + format_real(curvature_threshold) + ")"};
  }
  if (fit.r_squared < r2_threshold) {
    if (fit.curvature < 0.0) {
      // A concave log-survival means decay faster than any fitted Gaussian
      // envelope, which is still dominated by one.
      return {true, "lighter than Gaussian: poor linear fit (r_squared " +
                        format_real(fit.r_squared) + ") with downward curvature " +
                        format_real(fit.curvature)};
    }
    return {false, "poor Gaussian-tail fit: r_squared " + format_real(fit.r_squared) + " < " +
                       format_real(r2_threshold)};
  }
  return {true, "Gaussian-type tail: b_hat " + format_real(fit.b_hat) + ", r_squared " +
                    format_real(fit.r_squared) + ", curvature " + format_real(fit.curvature)};
}

Verdict diagnose_samples(std::span<const double> samples, double r2_threshold,
                         double curvature_threshold) {
  try {
    return subgaussian_verdict(fit_tail_params(samples), r2_threshold, curvature_threshold);
  } catch (const InsufficientTailError& e) {
    double m = 0.0;
    for (double x : samples) m = std::max(m, std::abs(x));
    return {true, "bounded support: tail vanishes beyond |x| = " + format_real(m) + " (" +
                      e.what() + ")"};
  }
}

MomentProfile moment_ratio_profile(std::span<const double> samples, int p_max) {
  if (p_max < 1 || p_max > 20) throw ParameterError("moment_ratio_profile: p_max must be in [1, 20]");
  if (samples.size() < kMinMomentSamples) {
    throw ParameterError("moment_ratio_profile: need at least " +
                         std::to_string(kMinMomentSamples) + " samples");
  }
  double m = 0.0;
  for (double x : samples) m = std::max(m, std::abs(x));
  if (!std::isfinite(m)) throw DataError("moment_ratio_profile: non-finite sample");
  MomentProfile prof;
  for (int p = 1; p <= p_max; ++p) {
    double ratio = 0.0;
    if (m > 0.0) {
      // Scale by max |x| so |x/m|^p stays in [0, 1].
      double acc = 0.0;
      for (double x : samples) acc += std::pow(std::abs(x) / m, p);
      const double moment = m * std::pow(acc / static_cast<double>(samples.size()), 1.0 / p);
      ratio = moment / std::sqrt(static_cast<double>(p));
    }
    if (!std::isfinite(ratio)) {
      throw DataError("moment_ratio_profile: non-finite moment at p = " + std::to_string(p));
    }
    prof.p_values.push_back(p);
    prof.ratios.push_back(ratio);
    prof.K_hat = std::max(prof.K_hat, ratio);
  }
  return prof;
}

Psi2Estimate psi2_estimate(std::span<const double> samples, double b) {
  if (!(b > 0.0)) throw ParameterError("psi2_estimate: b must be positive");
  if (samples.empty()) throw DataError("psi2_estimate: no samples");
  Psi2Estimate est;
  std::vector<double> sq(samples.size());
  std::transform(samples.begin(), samples.end(), sq.begin(), [](double x) { return x * x; });
  const double sq_max = *std::max_element(sq.begin(), sq.end());
  if (b * sq_max > kMaxExpArgument) {
    est.value = std::numeric_limits<double>::infinity();
    est.diverged = true;
    est.reason = "overflow: b * max x^2 = " + format_real(b * sq_max) + " > 700";
    return est;
  }

  // Hill estimator on the top k order statistics of x^2; the summands
  // exp(b x^2) then have tail index 1 / (b * mean excess).
  const std::size_t k = std::clamp<std::size_t>(sq.size() / 1000, 1, 1000);
  if (sq.size() > k) {
    std::nth_element(sq.begin(), sq.end() - static_cast<long>(k) - 1, sq.end());
    const double threshold = *(sq.end() - static_cast<long>(k) - 1);
    double excess = 0.0;
    for (auto it = sq.end() - static_cast<long>(k); it != sq.end(); ++it) excess += *it - threshold;
    excess /= static_cast<double>(k);
    est.summand_tail_index =
        excess > 0.0 ? 1.0 / (b * excess) : std::numeric_limits<double>::infinity();
  } else {
    est.summand_tail_index = std::numeric_limits<double>::infinity();
  }
  if (est.summand_tail_index <= kPsi2TailIndexFloor) {
    est.value = std::numeric_limits<double>::infinity();
    est.diverged = true;
    est.reason = "summands exp(b x^2) have estimated tail index " +
                 format_real(est.summand_tail_index) + " <= " + format_real(kPsi2TailIndexFloor) +
                 ": the expectation is infinite or not estimable";
    return est;
  }

  double acc = 0.0;
  for (double x : samples) acc += std::exp(b * x * x);
  est.value = acc / static_cast<double>(samples.size());
  est.reason = "finite";
  return est;
}

std::vector<double> union_bound_profile(const ScalarDist& dist, std::span<const std::size_t> n_grid,
                                        std::size_t trials, std::uint64_t seed,
                                        const ExecOptions& exec) {
  validate(dist);
  if (trials < 1) throw ParameterError("union_bound_profile: trials must be >= 1");
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    if (n_grid[g] < 2 || (g > 0 && n_grid[g] <= n_grid[g - 1])) {
      throw ParameterError("union_bound_profile: n_grid must be increasing with entries >= 2");
    }
  }
  std::vector<double> out;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    const std::size_t n = n_grid[g];
    const std::uint64_t grid_seed = derive_trial_seed(seed, g);
    std::vector<double> maxima(trials);
    parallel_for(trials, exec, [&](std::size_t t) {
      Engine eng(derive_trial_seed(grid_seed, t));
      double mx = 0.0;
      for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, std::abs(sample_scalar(dist, eng)));
      maxima[t] = mx;
    });
    out.push_back(mean(maxima) / std::sqrt(std::log(static_cast<double>(n))));
  }
  return out;
}

std::vector<double> row_norm_samples(const EnsembleSpec& spec, std::size_t n, std::size_t trials,
                                     std::uint64_t seed, const ExecOptions& exec) {
  if (is_all_ones(spec)) throw DegenerateEnsembleError("row_norm_samples: AllOnes is deterministic");
  if (trials < 1) throw ParameterError("row_norm_samples: trials must be >= 1");
  validate(spec);
  if (const auto* rows = std::get_if<IndependentRows>(&spec)) {
    if (const auto* rot = std::get_if<FixedRotation>(&rows->mixer)) {
      // Share the rotation across trials instead of rebuilding it per draw.
      const Matrix q = random_orthogonal(n, rot->seed);
      const IndependentRows plain{rows->base, IdentityMixer{}};
      std::vector<double> out(trials);
      parallel_for(trials, exec, [&](std::size_t t) {
        const Matrix z = sample_matrix(plain, 1, n, derive_trial_seed(seed, t));
        out[t] = norm2(q.apply(z.row(0)));
      });
      return out;
    }
  }
  // Row i of sample_matrix depends only on (seed, i, n_cols), so a 1 x n draw
  // reproduces row 1 of the n x n matrix.
  std::vector<double> out(trials);
  parallel_for(trials, exec, [&](std::size_t t) {
    const Matrix m = sample_matrix(spec, 1, n, derive_trial_seed(seed, t));
    out[t] = norm2(m.row(0));
  });
  return out;
}

std::vector<double> draw_samples(const ScalarDist& dist, std::size_t count, std::uint64_t seed) {
  validate(dist);
  constexpr std::size_t kBlock = 1 << 16;
  std::vector<double> out(count);
  for (std::size_t start = 0, block = 0; start < count; start += kBlock, ++block) {
    Engine eng(derive_trial_seed(seed, block));
    const std::size_t end = std::min(count, start + kBlock);
    for (std::size_t i = start; i < end; ++i) out[i] = sample_scalar(dist, eng);
  }
  return out;
}

std::vector<double> read_samples(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open sample file: " + path);
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double v;
    std::string rest;
    if (!(ls >> v) || (ls >> rest)) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected one number per line");
    }
    if (!std::isfinite(v)) throw DataError(path + ":" + std::to_string(lineno) + ": non-finite value");
    out.push_back(v);
  }
  return out;
}

}  // namespace opnorm
