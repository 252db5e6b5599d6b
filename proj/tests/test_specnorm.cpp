#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "opnorm/ensembles.hpp"
#include "opnorm/errors.hpp"
#include "opnorm/specnorm.hpp"

using namespace opnorm;

namespace {

Matrix product(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
  return c;
}

// max over sign vectors x of ||Mx||_inf / ||x||_inf is attained at a vertex of the cube.
double inf_norm_by_vertices(const Matrix& m) {
  const std::size_t n = m.cols();
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = (mask >> j) & 1 ? 1.0 : -1.0;
    const auto y = m.apply(x);
    for (double v : y) best = std::max(best, std::abs(v));
  }
  return best;
}

}  // namespace

TEST_CASE("exact norm on small matrices") {
  CHECK(opnorm_exact(Matrix::ones(3, 3)) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(opnorm_exact(Matrix(4, 4, 0.0)) == 0.0);
  CHECK(opnorm_exact(Matrix::identity(5)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(opnorm_exact(Matrix(2, 2, std::vector<double>{1, 1, 1, 1})) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(opnorm_exact(Matrix(2, 2, std::vector<double>{3, 0, 0, -4})) == doctest::Approx(4.0).epsilon(1e-14));
  // Rectangular: [[3, 4]] has norm 5.
  CHECK(opnorm_exact(Matrix(1, 2, std::vector<double>{3, 4})) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(opnorm_exact(Matrix(2, 1, std::vector<double>{3, 4})) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("exact norm guards") {
  CHECK_THROWS_AS(opnorm_exact(Matrix(kExactNormMaxDim + 1, kExactNormMaxDim + 1, 0.0)), ScaleError);
  Matrix bad = Matrix::identity(3);
  bad(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(opnorm_exact(bad), DataError);
  bad(1, 2) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(opnorm_power(bad, 1e-10, 100), DataError);
}

TEST_CASE("symmetric eigenvalues") {
  const auto ev = symmetric_eigenvalues(Matrix(2, 2, std::vector<double>{2, 1, 1, 2}));
  REQUIRE(ev.size() == 2);
  CHECK(ev[0] == doctest::Approx(3.0));
  CHECK(ev[1] == doctest::Approx(1.0));
}

TEST_CASE("power iteration") {
  const auto ones = opnorm_power(Matrix::ones(10, 10), 1e-12, 100);
  CHECK(ones.value == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(ones.iterations == 1);

  const auto diag = opnorm_power(Matrix(2, 2, std::vector<double>{3, 0, 0, 1}), 1e-12, 1000);
  CHECK(diag.value == doctest::Approx(3.0).epsilon(1e-10));

  const auto zero = opnorm_power(Matrix(3, 3, 0.0), 1e-12, 100);
  CHECK(zero.value == 0.0);

  // The all-ones start vector lies in the kernel; the random restart recovers.
  const auto kernel = opnorm_power(Matrix(2, 2, std::vector<double>{1, -1, 1, -1}), 1e-12, 1000);
  CHECK(kernel.value == doctest::Approx(2.0).epsilon(1e-10));

  CHECK_THROWS_AS(opnorm_power(Matrix::identity(2), 0.0, 10), ParameterError);
  CHECK_THROWS_AS(opnorm_power(Matrix::identity(2), 1e-10, 0), ParameterError);
}

TEST_CASE("power iteration reports non-convergence with its last estimate") {
  // Nearly degenerate top singular values converge slowly.
  Matrix m(2, 2, std::vector<double>{1.0, 0.0, 0.0, 1.0 - 1e-9});
  m(0, 1) = 1e-3;
  try {
    opnorm_power(m, 1e-15, 2);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_estimate() > 0.9);
    CHECK(e.last_estimate() <= opnorm_exact(m) * (1 + 1e-12));
  }
}

TEST_CASE("power agrees with exact on random 30x30 matrices") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Matrix m = sample_matrix(IidEntries{Gaussian{1.0}}, 30, 30, s);
    const double exact = opnorm_exact(m);
    const double pw = opnorm_power(m, 1e-12, 100'000).value;
    INFO("seed ", s);
    CHECK(std::abs(pw - exact) / exact < 1e-8);
  }
}

TEST_CASE("closed forms") {
  const Matrix m(2, 2, std::vector<double>{1, -2, 3, 4});
  CHECK(opnorm_closed(m, NormKind::One) == 6.0);
  CHECK(opnorm_closed(m, NormKind::Inf) == 7.0);
  CHECK_THROWS_AS(opnorm_closed(m, NormKind::Spectral), KindError);

  const Matrix r = sample_matrix(IidEntries{Gaussian{1.0}}, 8, 8, 3);
  CHECK(opnorm_closed(r, NormKind::Inf) == doctest::Approx(inf_norm_by_vertices(r)).epsilon(1e-14));
  CHECK(opnorm_closed(r, NormKind::One) ==
        doctest::Approx(inf_norm_by_vertices(r.transposed())).epsilon(1e-14));
}

TEST_CASE("mat_vec_image_norm") {
  const Matrix m(2, 2, std::vector<double>{1, 2, 3, 4});
  const std::vector<double> e1{1.0, 0.0};
  CHECK(mat_vec_image_norm(m, e1) == doctest::Approx(std::sqrt(10.0)));
  const std::vector<double> d{1 / std::sqrt(2.0), 1 / std::sqrt(2.0)};
  CHECK(mat_vec_image_norm(Matrix::ones(2, 2), d) == doctest::Approx(2.0));
  CHECK_THROWS_AS(mat_vec_image_norm(m, std::vector<double>{1.0}), ShapeError);
  CHECK_THROWS_AS(mat_vec_image_norm(m, std::vector<double>{1.0, 1.0}), NormalizationError);
}

TEST_CASE("norm properties on random draws") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix a = sample_matrix(IidEntries{Rademacher{}}, 12, 12, s);
    const Matrix b = sample_matrix(IidEntries{Gaussian{2.0}}, 12, 12, s + 1000);
    const double na = opnorm_exact(a), nb = opnorm_exact(b);
    CHECK(opnorm_exact(product(a, b)) <= na * nb * (1 + 1e-12));
    CHECK(opnorm_exact(a.scaled(-2.5)) == doctest::Approx(2.5 * na).epsilon(1e-12));
    CHECK(opnorm_exact(a.transposed()) == doctest::Approx(na).epsilon(1e-12));
    // Entries bounded by K give ||M|| <= K n.
    CHECK(na <= 12.0 * (1 + 1e-12));
    // ||M||_2^2 <= ||M||_1 ||M||_inf.
    CHECK(na * na <= opnorm_closed(a, NormKind::One) * opnorm_closed(a, NormKind::Inf) * (1 + 1e-12));
  }
}
