#include "opnorm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opnorm/errors.hpp"
#include "opnorm/rng.hpp"
#include "opnorm/specnorm.hpp"
#include "opnorm/stats.hpp"

namespace opnorm {

namespace {

void check_trials(std::size_t trials) {
  if (trials < 1) throw ParameterError("trials must be >= 1");
}

void check_n(std::size_t n) {
  if (n < 1) throw ParameterError("n must be >= 1");
}

void check_grid(std::span<const std::size_t> n_grid, std::size_t min_len) {
  if (n_grid.size() < min_len) {
    throw ParameterError("n_grid needs at least " + std::to_string(min_len) + " entries");
  }
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    if (n_grid[g] < 1 || (g > 0 && n_grid[g] <= n_grid[g - 1])) {
      throw ParameterError("n_grid must be strictly increasing positive integers");
    }
  }
}

double threshold(double A, std::size_t n) { return A * std::sqrt(static_cast<double>(n)); }

}  // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t n, std::uint64_t trial) {
  return derive_trial_seed(derive_trial_seed(master_seed, n), trial);
}

double experiment_norm(const Matrix& m) {
  if (std::max(m.rows(), m.cols()) <= kExactBackendMaxN) return opnorm_exact(m);
  return opnorm_power(m, kPowerRtol, kPowerMaxIter).value;
}

std::vector<double> trial_norms(const EnsembleSpec& spec, std::size_t n, std::size_t trials,
                                std::uint64_t master_seed, const ExecOptions& exec) {
  check_n(n);
  check_trials(trials);
  validate(spec);
  std::vector<double> norms(trials);
  if (is_all_ones(spec)) {
    // Deterministic: one evaluation serves every trial.
    std::fill(norms.begin(), norms.end(), experiment_norm(Matrix::ones(n, n)));
    return norms;
  }
  parallel_for(trials, exec, [&](std::size_t t) {
    norms[t] = experiment_norm(sample_matrix(spec, n, n, trial_seed(master_seed, n, t)));
  });
  return norms;
}

TailEstimate make_tail_estimate(double A, std::size_t n, std::uint64_t hits,
                                std::uint64_t trials) {
  check_trials(trials);
  if (hits > trials) throw ParameterError("hits exceed trials");
  TailEstimate e{A, n, trials, hits, static_cast<double>(hits) / static_cast<double>(trials), 0, 0};
  if (hits == 0) {
    e.ci_low = 0.0;
    e.ci_high = std::min(1.0, 3.0 / static_cast<double>(trials));
  } else {
    const auto ci = wilson_interval(hits, trials);
    e.ci_low = ci.low;
    e.ci_high = ci.high;
  }
  return e;
}

namespace {

std::vector<TailEstimate> count_exceedances(std::span<const double> values,
                                            std::span<const double> A_grid, std::size_t n) {
  std::vector<TailEstimate> out;
  for (double A : A_grid) {
    const double thr = threshold(A, n);
    const auto hits = static_cast<std::uint64_t>(
        std::count_if(values.begin(), values.end(), [&](double v) { return v > thr; }));
    out.push_back(make_tail_estimate(A, n, hits, values.size()));
  }
  return out;
}

}  // namespace

std::vector<TailEstimate> tail_curve(const EnsembleSpec& spec, std::size_t n,
                                     std::span<const double> A_grid, std::size_t trials,
                                     std::uint64_t master_seed, const ExecOptions& exec) {
  const auto norms = trial_norms(spec, n, trials, master_seed, exec);
  return count_exceedances(norms, A_grid, n);
}

TailEstimate tail_probability(const EnsembleSpec& spec, std::size_t n, double A,
                              std::size_t trials, std::uint64_t master_seed,
                              const ExecOptions& exec) {
  const double grid[] = {A};
  return tail_curve(spec, n, grid, trials, master_seed, exec).front();
}

std::vector<double> fixed_unit_vector(UMode mode, std::size_t n, std::uint64_t master_seed) {
  check_n(n);
  std::vector<double> u(n, 0.0);
  switch (mode) {
    case UMode::FirstBasis:
      u[0] = 1.0;
      break;
    case UMode::UniformDiagonal:
      std::fill(u.begin(), u.end(), 1.0 / std::sqrt(static_cast<double>(n)));
      break;
    case UMode::SeededRandom: {
      Engine eng(mix64(master_seed ^ 0xf1ed7ec7ULL));
      uniform_sphere_point(eng, u);
      break;
    }
  }
  return u;
}

std::vector<TailEstimate> fixed_vector_curve(const EnsembleSpec& spec, std::size_t n, UMode u_mode,
                                             std::span<const double> A_grid, std::size_t trials,
                                             std::uint64_t master_seed,
                                             const ExecOptions& exec) {
  check_n(n);
  check_trials(trials);
  validate(spec);
  const auto u = fixed_unit_vector(u_mode, n, master_seed);
  std::vector<double> images(trials);
  parallel_for(trials, exec, [&](std::size_t t) {
    const Matrix m = is_all_ones(spec) ? Matrix::ones(n, n)
                                       : sample_matrix(spec, n, n, trial_seed(master_seed, n, t));
    images[t] = norm2(m.apply(u));
  });
  return count_exceedances(images, A_grid, n);
}

TailEstimate fixed_vector_tail(const EnsembleSpec& spec, std::size_t n, UMode u_mode, double A,
                               std::size_t trials, std::uint64_t master_seed,
                               const ExecOptions& exec) {
  const double grid[] = {A};
  return fixed_vector_curve(spec, n, u_mode, grid, trials, master_seed, exec).front();
}

std::vector<SweepRow> sweep_rows(const EnsembleSpec& spec, std::span<const std::size_t> n_grid,
                                 double A, std::size_t trials, std::uint64_t master_seed,
                                 const ExecOptions& exec) {
  check_grid(n_grid, 1);
  std::vector<SweepRow> rows;
  for (std::size_t n : n_grid) {
    const auto norms = trial_norms(spec, n, trials, master_seed, exec);
    const double grid[] = {A};
    rows.push_back({n, mean(norms), count_exceedances(norms, grid, n).front()});
  }
  return rows;
}

GrowthFit growth_fit_of(std::span<const SweepRow> rows) {
  GrowthFit fit;
  std::vector<double> lx, ly;
  for (const auto& r : rows) {
    fit.n_grid.push_back(r.n);
    fit.mean_norms.push_back(r.mean_norm);
    lx.push_back(std::log(static_cast<double>(r.n)));
    ly.push_back(std::log(r.mean_norm));
  }
  const LineFit line = fit_line(lx, ly);
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.residual_max = line.residual_max;
  return fit;
}

GrowthFit growth_sweep(const EnsembleSpec& spec, std::span<const std::size_t> n_grid,
                       std::size_t trials, std::uint64_t master_seed, const ExecOptions& exec) {
  check_grid(n_grid, 3);
  return growth_fit_of(sweep_rows(spec, n_grid, 2.5, trials, master_seed, exec));
}

DecayCertificate decay_certificate_of(double A, std::span<const SweepRow> rows) {
  DecayCertificate cert;
  cert.A = A;
  std::vector<double> fx, fy;
  std::size_t uncensored = 0;
  for (const auto& r : rows) {
    cert.n_grid.push_back(r.n);
    cert.estimates.push_back(r.tail);
    cert.neg_log_p.push_back(r.tail.hits > 0 ? -std::log(r.tail.p_hat)
                                             : std::numeric_limits<double>::infinity());
    const bool censored = r.tail.hits < kMinHitsForFit;
    cert.censored.push_back(censored);
    uncensored += censored ? 0 : 1;
    fx.push_back(static_cast<double>(r.n));
    fy.push_back(censored ? -std::log(r.tail.ci_high) : -std::log(r.tail.p_hat));
  }
  bool nondecreasing = true;
  for (std::size_t k = 1; k < cert.neg_log_p.size(); ++k) {
    if (cert.neg_log_p[k] < cert.neg_log_p[k - 1]) nondecreasing = false;
  }
  const bool drops = !cert.neg_log_p.empty() && cert.neg_log_p.back() > cert.neg_log_p.front();
  cert.monotone = nondecreasing && drops;

  if (fx.size() >= 2) {
    const LineFit line = fit_line(fx, fy);
    cert.c_hat = line.slope;
    cert.C_hat = std::exp(-line.intercept);
  }
  cert.degenerate = uncensored < 2 || !(cert.c_hat > 0.0);
  return cert;
}

DecayCertificate overwhelming_decay_check(const EnsembleSpec& spec, double A,
                                          std::span<const std::size_t> n_grid, std::size_t trials,
                                          std::uint64_t master_seed, const ExecOptions& exec) {
  check_grid(n_grid, 2);
  return decay_certificate_of(A, sweep_rows(spec, n_grid, A, trials, master_seed, exec));
}

double tw_window_fraction_of(std::span<const double> norms, std::size_t n, double width_c) {
  if (!(width_c >= 0.0)) throw ParameterError("width_c must be >= 0");
  const double nd = static_cast<double>(n);
  const double center = 2.0 * std::sqrt(nd);
  const double half = width_c * std::pow(nd, -1.0 / 6.0);
  const auto inside = std::count_if(norms.begin(), norms.end(), [&](double s) {
    return s >= center - half && s <= center + half;
  });
  return static_cast<double>(inside) / static_cast<double>(norms.size());
}

double tw_window_fraction(std::size_t n, std::size_t trials, double width_c,
                          std::uint64_t master_seed, const ExecOptions& exec) {
  if (!(width_c >= 0.0)) throw ParameterError("width_c must be >= 0");
  const auto norms = trial_norms(IidEntries{Gaussian{1.0}}, n, trials, master_seed, exec);
  return tw_window_fraction_of(norms, n, width_c);
}

}  // namespace opnorm
