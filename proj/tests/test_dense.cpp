#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "common.hpp"
#include "dense.hpp"
#include "oracles.hpp"

using selfonn::Activation;
using selfonn::DenseCache;
using selfonn::DenseLayer;
using selfonn::Error;
using selfonn::Rng;

TEST_CASE("dense forward computes act(W x + b)") {
  DenseLayer d("fc", 2, 2, Activation::linear);
  d.weights() = {1.0, 2.0, -0.5, 0.25};
  d.biases() = {0.5, -1.0};
  auto out = d.forward({3.0, -1.0}, nullptr);
  REQUIRE(out.size() == 2);
  CHECK(out[0] == doctest::Approx(1.0 * 3.0 + 2.0 * -1.0 + 0.5).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(-0.5 * 3.0 + 0.25 * -1.0 - 1.0).epsilon(1e-15));

  DenseLayer t("fc", 1, 1, Activation::tanh);
  t.weights() = {2.0};
  t.biases() = {0.25};
  auto a = t.forward({0.5}, nullptr);
  CHECK(a[0] == doctest::Approx(std::tanh(1.25)).epsilon(1e-15));
}

TEST_CASE("dense gradients match central differences") {
  Rng rng(404);
  DenseLayer d("fc", 5, 3, Activation::tanh);
  d.init_params(rng);
  std::vector<double> x(5);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  std::vector<double> c(3);
  for (auto& v : c) v = rng.uniform(-1.0, 1.0);

  auto loss = [&]() {
    auto out = d.forward(x, nullptr);
    double s = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) s += c[k] * out[k];
    return s;
  };

  DenseCache cache;
  d.forward(x, &cache);
  std::vector<double> gw(d.weights().size(), 0.0), gb(3, 0.0);
  auto gx = d.backward(c, cache, gw, gb);

  for (std::size_t i = 0; i < d.weights().size(); ++i)
    CHECK(oracle::grad_close(gw[i], oracle::central_diff(loss, &d.weights()[i])));
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(oracle::grad_close(gb[k], oracle::central_diff(loss, &d.biases()[k])));
  for (std::size_t j = 0; j < x.size(); ++j)
    CHECK(oracle::grad_close(gx[j], oracle::central_diff(loss, &x[j])));
}

TEST_CASE("dense backward consumes the cache and validates shapes") {
  DenseLayer d("fc", 2, 1, Activation::linear);
  DenseCache cache;
  d.forward({1.0, 2.0}, &cache);
  std::vector<double> gw(2, 0.0), gb(1, 0.0);
  d.backward({1.0}, cache, gw, gb);
  CHECK_THROWS_AS(d.backward({1.0}, cache, gw, gb), Error);
  CHECK_THROWS_AS(d.forward({1.0}, nullptr), Error);
}

TEST_CASE("dense initialization is bounded by inverse root fan-in") {
  Rng rng(7);
  DenseLayer d("fc", 16, 4, Activation::tanh);
  d.init_params(rng);
  for (double w : d.weights()) CHECK(std::fabs(w) < 0.25);
  for (double b : d.biases()) CHECK(b == 0.0);
}
