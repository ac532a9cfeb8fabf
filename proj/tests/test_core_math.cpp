#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "common.hpp"
#include "core_math.hpp"

using selfonn::Error;
using selfonn::Matrix;
using selfonn::Rng;
using selfonn::Signal;

namespace {

bool close(double a, double b, double tol = 1e-12) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

TEST_CASE("unfold lays out sliding windows row by row") {
  Signal y = {1.0, 2.0, 3.0, 4.0};
  Matrix u = selfonn::unfold(y, 2);
  REQUIRE(u.rows() == 3);
  REQUIRE(u.cols() == 2);
  CHECK(u(0, 0) == 1.0);
  CHECK(u(0, 1) == 2.0);
  CHECK(u(1, 0) == 2.0);
  CHECK(u(1, 1) == 3.0);
  CHECK(u(2, 0) == 3.0);
  CHECK(u(2, 1) == 4.0);
}

TEST_CASE("unfold of a single sample with unit window") {
  Signal y = {5.0};
  Matrix u = selfonn::unfold(y, 1);
  REQUIRE(u.rows() == 1);
  REQUIRE(u.cols() == 1);
  CHECK(u(0, 0) == 5.0);
}

TEST_CASE("unfold preserves zeros") {
  Signal y(10, 0.0);
  Matrix u = selfonn::unfold(y, 4);
  REQUIRE(u.rows() == 7);
  for (std::size_t m = 0; m < u.rows(); ++m)
    for (std::size_t r = 0; r < u.cols(); ++r) CHECK(u(m, r) == 0.0);
}

TEST_CASE("unfold rejects windows longer than the signal") {
  Signal y = {1.0, 2.0};
  CHECK_THROWS_AS(selfonn::unfold(y, 3), Error);
}

TEST_CASE("power_stack appends elementwise power blocks") {
  Matrix base(1, 2);
  base(0, 0) = 0.5;
  base(0, 1) = -0.5;
  Matrix p = selfonn::power_stack(base, 3);
  REQUIRE(p.rows() == 1);
  REQUIRE(p.cols() == 6);
  CHECK(p(0, 0) == 0.5);
  CHECK(p(0, 1) == -0.5);
  CHECK(p(0, 2) == 0.25);
  CHECK(p(0, 3) == 0.25);
  CHECK(p(0, 4) == 0.125);
  CHECK(p(0, 5) == -0.125);
}

TEST_CASE("power_stack with first order is the identity") {
  Matrix base(2, 3);
  double v = 0.1;
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t r = 0; r < 3; ++r) base(m, r) = (v += 0.3);
  Matrix p = selfonn::power_stack(base, 1);
  REQUIRE(p.rows() == base.rows());
  REQUIRE(p.cols() == base.cols());
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t r = 0; r < 3; ++r) CHECK(p(m, r) == base(m, r));
}

TEST_CASE("power_stack of all ones is all ones") {
  Matrix base(3, 4);
  for (std::size_t m = 0; m < 3; ++m)
    for (std::size_t r = 0; r < 4; ++r) base(m, r) = 1.0;
  Matrix p = selfonn::power_stack(base, 5);
  for (std::size_t m = 0; m < p.rows(); ++m)
    for (std::size_t c = 0; c < p.cols(); ++c) CHECK(p(m, c) == 1.0);
}

TEST_CASE("power_stack rejects non-positive order") {
  Matrix base(1, 1);
  base(0, 0) = 2.0;
  CHECK_THROWS_AS(selfonn::power_stack(base, 0), Error);
  CHECK_THROWS_AS(selfonn::power_stack(base, -2), Error);
}

TEST_CASE("unfold_powers matches unfold followed by power_stack bit for bit") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t len = 5 + rng.below(40);
    const std::size_t k = 1 + rng.below(len);
    const int q = 1 + static_cast<int>(rng.below(7));
    Signal y(len);
    for (auto& v : y) v = rng.uniform(-1.5, 1.5);
    Matrix a = selfonn::power_stack(selfonn::unfold(y, k), q);
    Matrix b = selfonn::unfold_powers(y, k, q);
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    for (std::size_t m = 0; m < a.rows(); ++m)
      for (std::size_t c = 0; c < a.cols(); ++c) CHECK(a(m, c) == b(m, c));
  }
}

TEST_CASE("matvec computes row dot products") {
  Matrix mat(2, 3);
  mat(0, 0) = 1.0; mat(0, 1) = 2.0; mat(0, 2) = 3.0;
  mat(1, 0) = 0.5; mat(1, 1) = 1.5; mat(1, 2) = 2.5;

  SUBCASE("selector vector picks one column") {
    std::vector<double> w = {0.0, 1.0, 0.0};
    Signal out = selfonn::matvec(mat, w);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == 2.0);
    CHECK(out[1] == 1.5);
  }
  SUBCASE("weighted combination") {
    std::vector<double> w = {0.25, 0.5, 0.5};
    Signal out = selfonn::matvec(mat, w);
    REQUIRE(out.size() == 2);
    CHECK(close(out[0], 2.75));
    CHECK(close(out[1], 2.125));
  }
}

TEST_CASE("matvec over a power stack evaluates the polynomial response") {
  // windows of [0.5, 1.0, -0.5], k = 2, order 2, weights tap window sums and squares
  Signal y = {0.5, 1.0, -0.5};
  Matrix u = selfonn::unfold_powers(y, 2, 2);
  std::vector<double> w = {1.0, 1.0, 1.0, 1.0};
  Signal out = selfonn::matvec(u, w);
  REQUIRE(out.size() == 2);
  CHECK(close(out[0], 0.5 + 1.0 + 0.25 + 1.0));
  CHECK(close(out[1], 1.0 - 0.5 + 1.0 + 0.25));
}

TEST_CASE("matvec matches an explicit double loop exactly") {
  Rng rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t rows = 1 + rng.below(23);
    const std::size_t cols = 1 + rng.below(17);
    Matrix mat(rows, cols);
    for (std::size_t m = 0; m < rows; ++m)
      for (std::size_t c = 0; c < cols; ++c) mat(m, c) = rng.uniform(-2.0, 2.0);
    std::vector<double> w(cols);
    for (auto& v : w) v = rng.uniform(-2.0, 2.0);

    Signal out = selfonn::matvec(mat, w);
    REQUIRE(out.size() == rows);
    for (std::size_t m = 0; m < rows; ++m) {
      double acc = 0.0;
      for (std::size_t c = 0; c < cols; ++c) acc += mat(m, c) * w[c];
      // same order of additions, so the results must be identical
      CHECK(out[m] == acc);
    }
  }
}

TEST_CASE("matvec rejects mismatched vector length") {
  Matrix mat(2, 3);
  std::vector<double> w = {1.0, 2.0};
  CHECK_THROWS_AS(selfonn::matvec(mat, w), Error);
}

TEST_CASE("fold_adjoint scatters window gradients back onto the signal") {
  Matrix g(3, 2);
  for (std::size_t m = 0; m < 3; ++m)
    for (std::size_t r = 0; r < 2; ++r) g(m, r) = 1.0;
  Signal out = selfonn::fold_adjoint(g, 4);
  REQUIRE(out.size() == 4);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 2.0);
  CHECK(out[2] == 2.0);
  CHECK(out[3] == 1.0);
}

TEST_CASE("fold_adjoint of zeros is zeros") {
  Matrix g(4, 3);
  Signal out = selfonn::fold_adjoint(g, 6);
  for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("fold_adjoint rejects inconsistent output length") {
  Matrix g(3, 2);
  CHECK_THROWS_AS(selfonn::fold_adjoint(g, 5), Error);
  CHECK_THROWS_AS(selfonn::fold_adjoint(g, 3), Error);
}

// <G, unfold(y)> == <fold_adjoint(G), y> for all y and G: the pair is exactly adjoint.
TEST_CASE("fold_adjoint satisfies the unfold inner-product identity") {
  Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t len = 3 + rng.below(60);
    const std::size_t k = 1 + rng.below(len);
    Signal y(len);
    for (auto& v : y) v = rng.uniform(-3.0, 3.0);
    Matrix u = selfonn::unfold(y, k);
    Matrix g(u.rows(), u.cols());
    for (std::size_t m = 0; m < g.rows(); ++m)
      for (std::size_t r = 0; r < g.cols(); ++r) g(m, r) = rng.uniform(-3.0, 3.0);

    double lhs = 0.0;
    for (std::size_t m = 0; m < g.rows(); ++m)
      for (std::size_t r = 0; r < g.cols(); ++r) lhs += g(m, r) * u(m, r);

    Signal folded = selfonn::fold_adjoint(g, len);
    double rhs = 0.0;
    for (std::size_t i = 0; i < len; ++i) rhs += folded[i] * y[i];

    CHECK(close(lhs, rhs));
  }
}
