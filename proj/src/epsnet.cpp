#include "opnorm/epsnet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "opnorm/errors.hpp"
#include "opnorm/rng.hpp"
#include "opnorm/util.hpp"

namespace opnorm {

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 2.0)) {
    // NaN fails both comparisons.
    throw ParameterError("eps must lie in (0, 2), got " + format_real(eps));
  }
}

double squared_distance(const std::vector<double>& a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

// Uniform grid over [-1, 1]^dim with cell side eps. Any point within eps of
// x lies in one of the 3^dim cells around x's cell, so queries give exactly
// the brute-force answer. Falls back to a linear scan when the grid would be
// too large.
class NeighborIndex {
 public:
  NeighborIndex(std::size_t dim, double eps, const std::vector<std::vector<double>>& points)
      : dim_(dim), eps_(eps), eps2_(eps * eps), points_(points) {
    per_axis_ = static_cast<std::size_t>(std::ceil(2.0 / eps)) + 3;  // one pad cell each side
    double cells = std::pow(static_cast<double>(per_axis_), static_cast<double>(dim));
    double neighbors = std::pow(3.0, static_cast<double>(dim));
    dense_ = cells <= static_cast<double>(kMaxCells) && neighbors <= 6561.0;
    if (!dense_) return;
    cells_.resize(static_cast<std::size_t>(cells));
    std::vector<long> stride(dim);
    long s = 1;
    for (std::size_t a = 0; a < dim; ++a) {
      stride[a] = s;
      s *= static_cast<long>(per_axis_);
    }
    std::size_t n_off = static_cast<std::size_t>(neighbors);
    for (std::size_t k = 0; k < n_off; ++k) {
      long off = 0;
      std::size_t r = k;
      for (std::size_t a = 0; a < dim; ++a) {
        off += (static_cast<long>(r % 3) - 1) * stride[a];
        r /= 3;
      }
      offsets_.push_back(off);
    }
    stride_ = std::move(stride);
    for (std::size_t i = 0; i < points_.size(); ++i) cells_[cell_of(points_[i])].push_back(i);
  }

  // True if some indexed point is at squared distance < eps^2 from x.
  bool has_close(std::span<const double> x) const {
    if (!dense_) {
      return std::any_of(points_.begin(), points_.end(),
                         [&](const auto& p) { return squared_distance(p, x) < eps2_; });
    }
    const long base = static_cast<long>(cell_of(x));
    for (long off : offsets_) {
      for (std::size_t idx : cells_[static_cast<std::size_t>(base + off)]) {
        if (squared_distance(points_[idx], x) < eps2_) return true;
      }
    }
    return false;
  }

  // Call after points_.push_back.
  void add_last() {
    if (dense_) cells_[cell_of(points_.back())].push_back(points_.size() - 1);
  }

 private:
  static constexpr std::size_t kMaxCells = std::size_t{1} << 20;

  std::size_t cell_of(std::span<const double> x) const {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < dim_; ++a) {
      auto c = static_cast<long>(std::floor((x[a] + 1.0) / eps_)) + 1;
      c = std::clamp(c, 1L, static_cast<long>(per_axis_) - 2);
      flat += static_cast<std::size_t>(c * stride_[a]);
    }
    return flat;
  }

  std::size_t dim_;
  double eps_;
  double eps2_;
  const std::vector<std::vector<double>>& points_;
  std::size_t per_axis_ = 0;
  bool dense_ = false;
  std::vector<long> stride_;
  std::vector<long> offsets_;
  std::vector<std::vector<std::size_t>> cells_;
};

void check_shape(const Matrix& m, const EpsNet& net) {
  if (m.cols() != net.dim) {
    throw ShapeError("net dimension " + std::to_string(net.dim) + " does not match " +
                     std::to_string(m.cols()) + " matrix columns");
  }
}

}  // namespace

EpsNet build_net(std::size_t dim, double eps, std::uint64_t seed, std::uint64_t saturation_T) {
  if (dim < 2) throw ParameterError("net dimension must be >= 2");
  check_eps(eps);
  if (saturation_T < 1) throw ParameterError("saturation_T must be >= 1");

  EpsNet net{dim, eps, seed, saturation_T, {}, std::nullopt};
  Engine eng(mix64(seed));
  std::vector<double> candidate(dim);
  NeighborIndex index(dim, eps, net.points);
  std::uint64_t rejections = 0;
  while (rejections < saturation_T) {
    uniform_sphere_point(eng, candidate);
    if (!index.has_close(candidate)) {
      net.points.push_back(candidate);
      index.add_last();
      rejections = 0;
    } else {
      ++rejections;
    }
  }
  return net;
}

CardinalityBounds cardinality_bounds(std::size_t dim, double eps) {
  if (dim < 2) throw ParameterError("dimension must be >= 2");
  check_eps(eps);
  const double d = static_cast<double>(dim);
  const double h = eps / 2.0;
  // log((1+h)^d - (1-h)^d) = d log(1+h) + log1p(-((1-h)/(1+h))^d)
  const double log_outer = d * std::log1p(h);
  const double ratio_pow = std::exp(d * (std::log1p(-h) - std::log1p(h)));
  const double log_ratio = log_outer + std::log1p(-ratio_pow) - d * std::log(h);
  const double ratio = std::exp(log_ratio);
  return {ratio, ratio, ratio, log_ratio};
}

double net_lower_bound(const Matrix& m, const EpsNet& net) {
  check_shape(m, net);
  double best = 0.0;
  for (const auto& v : net.points) best = std::max(best, norm2(m.apply(v)));
  return best;
}

double net_upper_bound(const Matrix& m, const EpsNet& net) {
  if (!(net.eps < 1.0)) throw ParameterError("net_upper_bound needs eps < 1, got " + format_real(net.eps));
  return net_lower_bound(m, net) / (1.0 - net.eps);
}

double audit_coverage_check(EpsNet& net, std::uint64_t probes, std::uint64_t seed) {
  if (probes < 1) throw ParameterError("probes must be >= 1");
  Engine eng(mix64(seed ^ 0xa0d17c0e5ULL));
  const NeighborIndex index(net.dim, net.eps, net.points);
  std::vector<double> x(net.dim);
  std::uint64_t covered = 0;
  for (std::uint64_t k = 0; k < probes; ++k) {
    uniform_sphere_point(eng, x);
    covered += index.has_close(x) ? 1 : 0;
  }
  const double frac = static_cast<double>(covered) / static_cast<double>(probes);
  net.audit_coverage = frac;
  return frac;
}

double min_pairwise_distance(const EpsNet& net) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < net.points.size(); ++i)
    for (std::size_t j = i + 1; j < net.points.size(); ++j)
      best = std::min(best, squared_distance(net.points[i], net.points[j]));
  return std::sqrt(best);
}

void write_net(std::ostream& os, const EpsNet& net) {
  os << net.dim << ' ' << format_real(net.eps) << ' ' << net.seed << ' ' << net.saturation_T
     << ' ' << net.points.size() << '\n';
  for (const auto& p : net.points) {
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? " " : "") << format_real(p[i]);
    os << '\n';
  }
}

void write_net(const std::string& path, const EpsNet& net) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open net file for writing: " + path);
  write_net(os, net);
  if (!os) throw IoError("failed writing net file: " + path);
}

EpsNet read_net(std::istream& is) {
  EpsNet net;
  std::size_t count = 0;
  std::string header;
  if (!std::getline(is, header)) throw DataError("net file: missing header");
  std::istringstream hs(header);
  if (!(hs >> net.dim >> net.eps >> net.seed >> net.saturation_T >> count)) {
    throw DataError("net file: malformed header '" + header + "'");
  }
  net.points.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> p(net.dim);
    for (auto& x : p) {
      if (!(is >> x)) throw DataError("net file: truncated at point " + std::to_string(k));
    }
    net.points.push_back(std::move(p));
  }
  return net;
}

EpsNet read_net(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open net file: " + path);
  return read_net(is);
}

}  // namespace opnorm
