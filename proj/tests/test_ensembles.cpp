#include <doctest.h>

#include <cmath>
#include <numbers>

#include "opnorm/diagnostics.hpp"
#include "opnorm/ensembles.hpp"
#include "opnorm/errors.hpp"
#include "opnorm/stats.hpp"

using namespace opnorm;

namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

const std::vector<ScalarDist> kSubGaussian = {Gaussian{1.0}, Rademacher{}, UniformSym{2.0},
                                              TruncGaussian{1.0, 2.0}, Gaussian{0.5}};

}  // namespace

TEST_CASE("AllOnes is exactly ones") {
  const Matrix m = sample_matrix(AllOnes{}, 3, 3, 123);
  for (double x : m.data()) CHECK(x == 1.0);
  CHECK(m == sample_matrix(AllOnes{}, 3, 3, 999));
}

TEST_CASE("Rademacher entries are +-1") {
  const Matrix m = sample_matrix(IidEntries{Rademacher{}}, 2, 2, 5);
  for (double x : m.data()) CHECK((x == 1.0 || x == -1.0));
  const Matrix big = sample_matrix(IidEntries{Rademacher{}}, 50, 50, 5);
  for (double x : big.data()) REQUIRE(std::abs(x) == 1.0);
}

TEST_CASE("sample_matrix is a pure function of its arguments") {
  const EnsembleSpec specs[] = {IidEntries{Gaussian{1.0}}, IidEntries{StudentT{3.0}},
                                IndependentRows{UniformSym{1.0}, FixedRotation{4}},
                                IndependentRows{Gaussian{1.0}, CommonFactor{0.3}}};
  for (const auto& spec : specs) {
    CHECK(sample_matrix(spec, 7, 5, 11) == sample_matrix(spec, 7, 5, 11));
    CHECK(sample_matrix(spec, 7, 5, 11) != sample_matrix(spec, 7, 5, 12));
    CHECK(sample_matrix(spec, 7, 5, 11).all_finite());
  }
}

TEST_CASE("rows do not depend on how many rows are drawn") {
  const EnsembleSpec spec = IndependentRows{Gaussian{1.0}, CommonFactor{0.5}};
  const Matrix tall = sample_matrix(spec, 6, 4, 77);
  const Matrix one = sample_matrix(spec, 1, 4, 77);
  for (std::size_t j = 0; j < 4; ++j) CHECK(tall(0, j) == one(0, j));
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(sample_matrix(IidEntries{Gaussian{0.0}}, 2, 2, 1), ParameterError);
  CHECK_THROWS_AS(sample_matrix(IidEntries{Gaussian{-1.0}}, 2, 2, 1), ParameterError);
  CHECK_THROWS_AS(sample_matrix(IidEntries{StudentT{0.0}}, 2, 2, 1), ParameterError);
  CHECK_THROWS_AS(sample_matrix(IidEntries{UniformSym{-2.0}}, 2, 2, 1), ParameterError);
  CHECK_THROWS_AS(sample_matrix(IidEntries{TruncGaussian{1.0, 0.0}}, 2, 2, 1), ParameterError);
  CHECK_THROWS_AS(sample_matrix(IndependentRows{Gaussian{1.0}, CommonFactor{1.0}}, 2, 2, 1),
                  ParameterError);
  CHECK_THROWS_AS(sample_matrix(IndependentRows{Gaussian{1.0}, CommonFactor{-0.1}}, 2, 2, 1),
                  ParameterError);
  CHECK_THROWS_AS(sample_matrix(AllOnes{}, 0, 2, 1), ParameterError);
}

TEST_CASE("tail_params_of") {
  const auto g = tail_params_of(Gaussian{1.0});
  CHECK(g.B == 2.0);
  CHECK(g.b == 0.5);
  const auto g2 = tail_params_of(Gaussian{2.0});
  CHECK(g2.b == doctest::Approx(1.0 / 8.0));
  const auto r = tail_params_of(Rademacher{});
  CHECK(r.B == doctest::Approx(std::numbers::e));
  CHECK(r.b == 1.0);
  CHECK_THROWS_AS(tail_params_of(StudentT{3.0}), NotSubGaussianError);
}

TEST_CASE("CommonFactor(0.5): within-row correlation 0.5, across rows 0") {
  // 10^4 rows of width 100; correlation of columns 0 and 1 within rows, and
  // of column 0 between consecutive rows.
  const Matrix m = sample_matrix(IndependentRows{Gaussian{1.0}, CommonFactor{0.5}}, 10'000, 100, 2024);
  std::vector<double> c0, c1, next0;
  for (std::size_t i = 0; i + 1 < m.rows(); i += 2) {
    c0.push_back(m(i, 0));
    c1.push_back(m(i, 1));
    next0.push_back(m(i + 1, 0));
  }
  CHECK(pearson(c0, c1) == doctest::Approx(0.5).epsilon(0.06));
  CHECK(std::abs(pearson(c0, next0)) < 0.05);
}

TEST_CASE("zero mean for sub-Gaussian laws") {
  for (const auto& d : kSubGaussian) {
    const auto x = draw_samples(d, 1'000'000, 31);
    CHECK(std::abs(mean(x)) <= 5.0 * sample_stddev(x) / 1e3);
  }
}

TEST_CASE("tail domination: empirical survival under B exp(-b t^2)") {
  for (const auto& d : kSubGaussian) {
    const auto params = tail_params_of(d);
    const auto x = draw_samples(d, 1'000'000, 8);
    std::vector<double> grid;
    // Grid up to 6 variance proxies.
    for (int k = 0; k <= 60; ++k) grid.push_back(params.sigma * 6.0 * k / 60.0 + (k == 0 ? 0.0 : 0.0));
    const auto surv = empirical_survival(x, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double hits = surv[k] * 1e6;
      const double slack = hits > 0 ? 1.0 + 3.0 / std::sqrt(hits) : 1.0;
      INFO(describe(d), " t=", grid[k]);
      CHECK(surv[k] <= params.B * std::exp(-params.b * grid[k] * grid[k]) * slack);
    }
  }
}

TEST_CASE("FixedRotation preserves the law of the row L2 norm") {
  const std::size_t n = 30;
  const auto rotated = row_norm_samples(IndependentRows{UniformSym{1.0}, FixedRotation{3}}, n, 4000, 10);
  const auto plain = row_norm_samples(IidEntries{UniformSym{1.0}}, n, 4000, 20);
  // 99.9% two-sample KS critical value 1.95 sqrt(2/N).
  CHECK(ks_two_sample(rotated, plain) < 1.95 * std::sqrt(2.0 / 4000.0));
}

TEST_CASE("random_orthogonal is orthogonal") {
  const Matrix q = random_orthogonal(20, 6);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 20; ++j) {
      double d = 0;
      for (std::size_t k = 0; k < 20; ++k) d += q(i, k) * q(j, k);
      CHECK(d == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    }
}
