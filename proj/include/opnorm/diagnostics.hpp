#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "opnorm/ensembles.hpp"
#include "opnorm/parallel.hpp"

namespace opnorm {

// Least-squares fit of log P(|x| > t) = log(B_hat) - b_hat t^2 over t_grid.
struct TailFit {
  double B_hat = 0.0;
  double b_hat = 0.0;
  double r_squared = 0.0;
  // Quadratic coefficient of log-survival against t^2 rescaled to [0, 1],
  // divided by the log-survival range. Positive means the log tail bends
  // upward (heavier than Gaussian); negative means it drops faster.
  double curvature = 0.0;
  // Set when b_hat <= 0: the tail does not decay.
  bool non_decaying = false;
  std::vector<double> t_grid;
  std::vector<double> survival;
};

struct MomentProfile {
  std::vector<int> p_values;
  std::vector<double> ratios;  // (E|x|^p)^(1/p) / sqrt(p)
  double K_hat = 0.0;
};

struct Verdict {
  bool accept = false;
  std::string reason;
};

struct Psi2Estimate {
  // Mean of exp(b x^2), or +inf when the estimate is not trustworthy.
  double value = 0.0;
  bool diverged = false;
  // Hill estimate of the tail index of the summands exp(b x^2).
  double summand_tail_index = 0.0;
  std::string reason;
};

inline constexpr double kDefaultR2Threshold = 0.95;
inline constexpr double kDefaultCurvatureThreshold = 0.5;
inline constexpr double kDefaultQLow = 0.5;
inline constexpr double kDefaultQHigh = 0.999;
// Summand tail index at or below which psi2_estimate reports divergence.
inline constexpr double kPsi2TailIndexFloor = 1.25;

std::vector<double> empirical_survival(std::span<const double> samples,
                                       std::span<const double> t_grid);

// Regression on a precomputed survival curve (entries with survival 0 are dropped).
TailFit fit_tail_curve(std::span<const double> t_grid, std::span<const double> survival);

// Grid of |x| quantiles between q_low and q_high (log-spaced in 1 - q).
TailFit fit_tail_params(std::span<const double> samples, double q_low = kDefaultQLow,
                        double q_high = kDefaultQHigh);

Verdict subgaussian_verdict(const TailFit& fit, double r2_threshold = kDefaultR2Threshold,
                            double curvature_threshold = kDefaultCurvatureThreshold);

// fit_tail_params + subgaussian_verdict. A tail that vanishes inside the
// quantile window (insufficient tail) is accepted as bounded support.
Verdict diagnose_samples(std::span<const double> samples, double r2_threshold = kDefaultR2Threshold,
                         double curvature_threshold = kDefaultCurvatureThreshold);

MomentProfile moment_ratio_profile(std::span<const double> samples, int p_max);

Psi2Estimate psi2_estimate(std::span<const double> samples, double b);

// E[max_i |x_i|] / sqrt(log n) over `trials` Monte Carlo batches, per n.
std::vector<double> union_bound_profile(const ScalarDist& dist, std::span<const std::size_t> n_grid,
                                        std::size_t trials, std::uint64_t seed,
                                        const ExecOptions& exec = {});

// L2 norms of the first row of `trials` independently seeded n x n draws.
std::vector<double> row_norm_samples(const EnsembleSpec& spec, std::size_t n, std::size_t trials,
                                     std::uint64_t seed, const ExecOptions& exec = {});

// `count` iid draws from `dist` using per-block derived streams.
std::vector<double> draw_samples(const ScalarDist& dist, std::size_t count, std::uint64_t seed);

// One value per line; blank lines and '#' comments skipped.
std::vector<double> read_samples(const std::string& path);

}  // namespace opnorm
