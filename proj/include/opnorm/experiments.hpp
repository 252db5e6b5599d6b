#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "opnorm/ensembles.hpp"
#include "opnorm/parallel.hpp"

namespace opnorm {

// Trials use the exact oracle up to this size and power iteration above it.
inline constexpr std::size_t kExactBackendMaxN = 128;
inline constexpr double kPowerRtol = 1e-6;
inline constexpr int kPowerMaxIter = 10'000;
// Grid points need at least this many hits to enter the decay fit.
inline constexpr std::uint64_t kMinHitsForFit = 5;

inline const std::vector<double> kDefaultAGrid = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0};

struct TailEstimate {
  double A = 0.0;
  std::size_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double p_hat = 0.0;
  // Wilson 95%; rule of three (3 / trials) for the upper end at zero hits.
  double ci_low = 0.0;
  double ci_high = 0.0;

  friend bool operator==(const TailEstimate&, const TailEstimate&) = default;
};

struct GrowthFit {
  std::vector<std::size_t> n_grid;
  std::vector<double> mean_norms;
  double slope = 0.0;  // least squares of log(mean_norm) on log(n)
  double intercept = 0.0;
  double residual_max = 0.0;

  friend bool operator==(const GrowthFit&, const GrowthFit&) = default;
};

struct DecayCertificate {
  double A = 0.0;
  std::vector<std::size_t> n_grid;
  std::vector<TailEstimate> estimates;
  // -log(p_hat) per grid point; +inf where no hits were observed.
  std::vector<double> neg_log_p;
  // Points with fewer than kMinHitsForFit hits. They enter the fit at
  // -log(ci_high), a 95% lower bound on -log p, which can only flatten the
  // fitted decay.
  std::vector<bool> censored;
  // From -log p = c_hat n - log(C_hat), least squares over the grid.
  double c_hat = 0.0;
  double C_hat = 0.0;
  // -log(p_hat) is non-decreasing along the grid and ends higher than it starts.
  bool monotone = false;
  // Fewer than two points have >= kMinHitsForFit hits, or the fit shows no
  // decay (c_hat <= 0).
  bool degenerate = false;

  friend bool operator==(const DecayCertificate&, const DecayCertificate&) = default;
};

enum class UMode { FirstBasis, UniformDiagonal, SeededRandom };

// Per-n sweep row, as exported to CSV.
struct SweepRow {
  std::size_t n = 0;
  double mean_norm = 0.0;
  TailEstimate tail;
};

// Seed for trial t at size n: independent streams across n and t.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t n, std::uint64_t trial);

// Operator norm used by every experiment (exact up to kExactBackendMaxN).
double experiment_norm(const Matrix& m);

// Spectral norms of `trials` seeded n x n draws, in trial order.
std::vector<double> trial_norms(const EnsembleSpec& spec, std::size_t n, std::size_t trials,
                                std::uint64_t master_seed, const ExecOptions& exec = {});

TailEstimate make_tail_estimate(double A, std::size_t n, std::uint64_t hits, std::uint64_t trials);

// P(||M|| > A sqrt(n)) for every A in A_grid, from a single set of trials.
std::vector<TailEstimate> tail_curve(const EnsembleSpec& spec, std::size_t n,
                                     std::span<const double> A_grid, std::size_t trials,
                                     std::uint64_t master_seed, const ExecOptions& exec = {});
TailEstimate tail_probability(const EnsembleSpec& spec, std::size_t n, double A,
                              std::size_t trials, std::uint64_t master_seed,
                              const ExecOptions& exec = {});

std::vector<double> fixed_unit_vector(UMode mode, std::size_t n, std::uint64_t master_seed);

// P(||M u|| > A sqrt(n)) for the fixed unit vector chosen by u_mode, on the
// same trial seeds as tail_curve.
std::vector<TailEstimate> fixed_vector_curve(const EnsembleSpec& spec, std::size_t n, UMode u_mode,
                                             std::span<const double> A_grid, std::size_t trials,
                                             std::uint64_t master_seed,
                                             const ExecOptions& exec = {});
TailEstimate fixed_vector_tail(const EnsembleSpec& spec, std::size_t n, UMode u_mode, double A,
                               std::size_t trials, std::uint64_t master_seed,
                               const ExecOptions& exec = {});

// Mean norm and exceedance of A sqrt(n) per grid point.
std::vector<SweepRow> sweep_rows(const EnsembleSpec& spec, std::span<const std::size_t> n_grid,
                                 double A, std::size_t trials, std::uint64_t master_seed,
                                 const ExecOptions& exec = {});
GrowthFit growth_fit_of(std::span<const SweepRow> rows);
GrowthFit growth_sweep(const EnsembleSpec& spec, std::span<const std::size_t> n_grid,
                       std::size_t trials, std::uint64_t master_seed, const ExecOptions& exec = {});

DecayCertificate decay_certificate_of(double A, std::span<const SweepRow> rows);
DecayCertificate overwhelming_decay_check(const EnsembleSpec& spec, double A,
                                          std::span<const std::size_t> n_grid, std::size_t trials,
                                          std::uint64_t master_seed, const ExecOptions& exec = {});

// Fraction of IidEntries(Gaussian(1)) draws with sigma_max within
// width_c * n^(-1/6) of 2 sqrt(n).
double tw_window_fraction(std::size_t n, std::size_t trials, double width_c,
                          std::uint64_t master_seed, const ExecOptions& exec = {});
double tw_window_fraction_of(std::span<const double> norms, std::size_t n, double width_c);

}  // namespace opnorm
