#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cvsel/errors.hpp"
#include "cvsel/linalg.hpp"
#include "cvsel/rng.hpp"
#include "support/oracles.hpp"

using namespace cvsel;
namespace ts = testsupport;

namespace {

Matrix ones_column(int n) { return Matrix::Ones(n, 1); }

Matrix line_design() {
  Matrix x(3, 2);
  x << 1, 1, 1, 2, 1, 3;
  return x;
}

Matrix random_matrix(Rng& rng, int n, int p) {
  Matrix x(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
  }
  return x;
}

}  // namespace

TEST_CASE("factor: column of ones gives R = [sqrt(3)]") {
  const GramFactor f = factor(ones_column(3));
  REQUIRE(f.full_rank());
  const Matrix r = f.r();
  REQUIRE(r.rows() == 1);
  CHECK(r(0, 0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("factor: identity design gives R = identity") {
  const GramFactor f = factor(Matrix::Identity(2, 2));
  const Matrix r = f.r();
  CHECK(r(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(r(1, 0)) < 1e-14);
  CHECK(std::abs(r(0, 1)) < 1e-14);
}

TEST_CASE("factor: R'R reproduces the Gram matrix of the line design") {
  const GramFactor f = factor(line_design());
  const Matrix g = f.r().transpose() * f.r();
  CHECK(g(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(g(0, 1) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(g(1, 0) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(g(1, 1) == doctest::Approx(14.0).epsilon(1e-12));
}

TEST_CASE("factor: more columns than rows is a dimension error") {
  CHECK_THROWS_AS(factor(Matrix::Ones(1, 2)), DimensionError);
  CHECK_THROWS_AS(factor(Matrix(3, 0)), DimensionError);
}

TEST_CASE("factor: duplicate columns are rank deficient") {
  Matrix x(4, 2);
  x.col(0) = Vector::LinSpaced(4, 1.0, 4.0);
  x.col(1) = x.col(0);
  const GramFactor f = factor(x);
  CHECK_FALSE(f.full_rank());
  CHECK_THROWS_AS(f.log_det_gram(), SingularGramError);
  CHECK_THROWS_AS(f.solve(Vector::Ones(4)), SingularGramError);
}

TEST_CASE("ls_fit: intercept fit of (1,2,3)") {
  Vector y(3);
  y << 1, 2, 3;
  const FitSummary fit = ls_fit(ones_column(3), y);
  CHECK(fit.beta(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fit.fitted(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fit.fitted(2) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fit.rss == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("ls_fit: response in the column space has zero residual") {
  const Matrix x = line_design();
  Vector y(3);
  y << 1, 2, 3;  // y = 0*1 + 1*(1,2,3)
  const FitSummary fit = ls_fit(x, y);
  CHECK(std::abs(fit.rss) < 1e-20);
  CHECK(std::abs(fit.beta(0)) < 1e-12);
  CHECK(fit.beta(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ls_fit: matches the normal-equation oracle on random instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 5 + static_cast<int>(rng.uniform01() * 20);
    const int p = 1 + static_cast<int>(rng.uniform01() * 4);
    const Matrix x = random_matrix(rng, n, p);
    Vector y(n);
    for (int i = 0; i < n; ++i) y(i) = rng.normal();
    const FitSummary fit = ls_fit(x, y);
    const ts::Mat xo = ts::from_eigen(x);
    const ts::Vec beta = ts::ls_beta(xo, ts::from_eigen(y));
    for (int j = 0; j < p; ++j) {
      CHECK(fit.beta(j) == doctest::Approx(beta[static_cast<std::size_t>(j)]).epsilon(1e-8));
    }
    CHECK(fit.rss ==
          doctest::Approx(ts::rss(xo, ts::from_eigen(y))).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("log_det_gram: frozen examples") {
  CHECK(log_det_gram(ones_column(3)) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK(std::abs(log_det_gram(Matrix::Identity(3, 3))) < 1e-14);
  // det([[3,6],[6,14]]) = 6
  CHECK(log_det_gram(line_design()) == doctest::Approx(std::log(6.0)).epsilon(1e-12));
}

TEST_CASE("log_det_gram: agrees with the cofactor determinant for p <= 4") {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const int p = 1 + static_cast<int>(rng.uniform01() * 4);
    const int n = p + 2 + static_cast<int>(rng.uniform01() * 10);
    const Matrix x = random_matrix(rng, n, p);
    const double direct = std::log(ts::det_cofactor(ts::gram(ts::from_eigen(x))));
    CHECK(log_det_gram(x) == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("project: range, hand example, null space") {
  const Matrix x = line_design();
  const ProjectionResult onto_range = project(x, Vector(x.col(1)));
  CHECK((onto_range.projection - x.col(1)).norm() < 1e-12);
  CHECK(onto_range.residual.norm() < 1e-12);

  Vector v(3);
  v << 1, 2, 3;
  const ProjectionResult mean_fit = project(ones_column(3), v);
  CHECK(mean_fit.projection(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(mean_fit.projection(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(mean_fit.projection(2) == doctest::Approx(2.0).epsilon(1e-14));

  Vector w(3);  // orthogonal to the ones column
  w << 1, 0, -1;
  CHECK(project(ones_column(3), w).projection.norm() < 1e-14);
}

TEST_CASE("project: idempotence and Pythagoras on random instances") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + static_cast<int>(rng.uniform01() * 16);
    const int p = 1 + static_cast<int>(rng.uniform01() * 3);
    const Matrix x = random_matrix(rng, n, p);
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.normal();
    const ProjectionResult pr = project(x, v);
    const ProjectionResult twice = project(x, pr.projection);
    CHECK((twice.projection - pr.projection).norm() <= 1e-10 * (1.0 + pr.projection.norm()));
    const double lhs = v.squaredNorm();
    const double rhs = pr.projection.squaredNorm() + pr.residual.squaredNorm();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    // residual orthogonal to the columns
    CHECK((x.transpose() * pr.residual).cwiseAbs().maxCoeff() <=
          1e-9 * (1.0 + v.norm() * x.norm()));
  }
}

TEST_CASE("factor: R'R = X'X entrywise on random matrices") {
  Rng rng(314159);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform01() * 12);
    const int p = 1 + std::min(n - 1, static_cast<int>(rng.uniform01() * 4));
    const Matrix x = random_matrix(rng, n, p);
    const GramFactor f = factor(x);
    const Matrix lhs = f.r().transpose() * f.r();
    const Matrix rhs = x.transpose() * x;
    const double scale = rhs.cwiseAbs().maxCoeff() + 1.0;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    // canonical sign: nonnegative diagonal
    for (int j = 0; j < p; ++j) CHECK(f.r()(j, j) >= 0.0);
  }
}
