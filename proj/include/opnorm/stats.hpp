#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace opnorm {

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Wilson score interval for a binomial proportion at z (1.96 for 95%).
Interval wilson_interval(std::uint64_t hits, std::uint64_t trials, double z = 1.959963984540054);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double residual_max = 0.0;  // max |y - fit|
};

// Ordinary least squares y = intercept + slope * x. Needs >= 2 distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Least-squares quadratic y = c0 + c1 x + c2 x^2; returns {c0, c1, c2}.
std::vector<double> fit_quadratic(std::span<const double> x, std::span<const double> y);

// Two-sample Kolmogorov-Smirnov statistic sup |F1 - F2|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Empirical quantile of sorted data with linear interpolation (type 7).
double quantile_sorted(std::span<const double> sorted, double q);

double mean(std::span<const double> x);
double sample_stddev(std::span<const double> x);

}  // namespace opnorm
