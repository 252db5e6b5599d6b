#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "opnorm/matrix.hpp"

namespace opnorm {

// A finite set of unit vectors with pairwise distances >= eps, grown by
// random sequential insertion until `saturation_T` consecutive candidates
// are rejected. Points are kept in insertion order.
struct EpsNet {
  std::size_t dim = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t saturation_T = 0;
  std::vector<std::vector<double>> points;
  // Filled by audit_coverage_check.
  std::optional<double> audit_coverage;

  std::size_t size() const noexcept { return points.size(); }
};

// Volume packing ratio ((1+eps/2)^d - (1-eps/2)^d) / (eps/2)^d, evaluated in
// log-space. The same ratio serves as both the upper and the lower envelope.
struct CardinalityBounds {
  double lower = 0.0;
  double upper = 0.0;
  double packing_ratio = 0.0;
  double log_packing_ratio = 0.0;
};

EpsNet build_net(std::size_t dim, double eps, std::uint64_t seed, std::uint64_t saturation_T);

CardinalityBounds cardinality_bounds(std::size_t dim, double eps);

// max over net points of ||M v|| / (1 - eps).
double net_upper_bound(const Matrix& m, const EpsNet& net);
// max over net points of ||M v||. Never exceeds ||M||_op.
double net_lower_bound(const Matrix& m, const EpsNet& net);

// Fraction of `probes` uniform sphere points lying within eps of some net
// point. Stores the result in net.audit_coverage.
double audit_coverage_check(EpsNet& net, std::uint64_t probes, std::uint64_t seed);

// Smallest pairwise distance among net points (+inf for fewer than 2 points).
double min_pairwise_distance(const EpsNet& net);

// Flat text format: header "dim eps seed saturation_T count", then one point
// per line, 17 significant digits.
void write_net(std::ostream& os, const EpsNet& net);
void write_net(const std::string& path, const EpsNet& net);
EpsNet read_net(std::istream& is);
EpsNet read_net(const std::string& path);

}  // namespace opnorm
