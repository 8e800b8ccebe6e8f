#include <doctest.h>

#include <cmath>

#include "deal/error.hpp"
#include "deal/math.hpp"
#include "deal/rng.hpp"

using namespace deal;

TEST_CASE("elu values") {
  CHECK(elu(2.0) == 2.0);
  CHECK(elu(0.0) == 0.0);
  CHECK(elu(-1.0) == doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-15));
  CHECK(elu(-1.0, 2.0) == doctest::Approx(2.0 * (std::exp(-1.0) - 1.0)).epsilon(1e-15));
  CHECK(elu_grad(3.0) == 1.0);
  CHECK(elu_grad(-2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("generalized logistic pinned values") {
  CHECK(generalized_logistic(0.0, 1.0, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(generalized_logistic(0.0, 2.0, 0.0) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
  // 0.5 * log(1 + e^-1), checked against an independent high-precision eval
  CHECK(generalized_logistic(1.0, 2.0, 1.0) == doctest::Approx(0.15663084375911143).epsilon(1e-14));
  CHECK_THROWS_AS(generalized_logistic(0.0, 0.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(generalized_logistic(0.0, -1.0, 0.0), ArgumentError);
}

TEST_CASE("generalized logistic overflow guard") {
  // far negative x: t = -gamma*x + b is huge; result must be exactly t/gamma
  const double x = -1e6;
  CHECK(generalized_logistic(x, 2.0, 1.0) == (2.0 * 1e6 + 1.0) / 2.0);
  CHECK(std::isfinite(generalized_logistic(1e6, 2.0, 1.0)));
  CHECK(generalized_logistic(1e6, 2.0, 1.0) == 0.0);  // underflows cleanly
}

TEST_CASE("generalized logistic is positive, decreasing, convex on a grid") {
  for (double gamma : {0.5, 1.0, 2.0, 5.0}) {
    for (double b : {-1.0, 0.0, 1.5}) {
      double prev = std::numeric_limits<double>::infinity();
      for (double x = -4.0; x <= 4.0; x += 0.125) {
        const double v = generalized_logistic(x, gamma, b);
        CHECK(v > 0.0);
        CHECK(v < prev);
        prev = v;
        const double h = 1e-4;
        const double second = (generalized_logistic(x + h, gamma, b) -
                               2.0 * v + generalized_logistic(x - h, gamma, b)) / (h * h);
        CHECK(second >= -1e-6);
      }
    }
  }
}

TEST_CASE("scaling identity: gamma*phi(x,gamma,0) == softplus(-gamma*x)") {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.range(-20.0, 20.0);
    const double gamma = rng.range(0.1, 8.0);
    CHECK(gamma * generalized_logistic(x, gamma, 0.0) ==
          doctest::Approx(softplus(-gamma * x)).epsilon(1e-12));
  }
}

TEST_CASE("generalized logistic derivative matches central differences") {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const double x = rng.range(-3.0, 3.0);
    const double gamma = rng.range(0.2, 6.0);
    const double b = rng.range(-2.0, 2.0);
    const double h = 1e-6;
    const double numeric =
        (generalized_logistic(x + h, gamma, b) - generalized_logistic(x - h, gamma, b)) / (2 * h);
    CHECK(generalized_logistic_dx(x, gamma, b) == doctest::Approx(numeric).epsilon(1e-7));
  }
}

TEST_CASE("cosine similarity basics") {
  Vector a(3), b(3);
  a << 1, 2, 3;
  CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  Vector u(2), v(2);
  u << 1, 0;
  v << 0, 1;
  CHECK(cosine_similarity(u, v) == 0.0);
  u << 1, 2;
  v << 2, 1;
  CHECK(cosine_similarity(u, v) == doctest::Approx(0.8).epsilon(1e-15));
  b << 1, 1, 1;
  Vector c(2);
  c << 1, 1;
  CHECK_THROWS_AS(cosine_similarity(b, c), ShapeError);
}

TEST_CASE("cosine zero-norm guard") {
  Vector zero = Vector::Zero(4);
  Vector any(4);
  any << 1, -2, 3, 4;
  CHECK(cosine_similarity(zero, any) == 0.0);
  CHECK(cosine_similarity(any, zero) == 0.0);
  CHECK(cosine_similarity_grad_u(zero, any).norm() == 0.0);
}

TEST_CASE("cosine symmetry and positive-scale invariance") {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    const Index n = 1 + static_cast<Index>(rng.below(8));
    Vector u(n), v(n);
    for (Index j = 0; j < n; ++j) {
      u(j) = rng.range(-2.0, 2.0);
      v(j) = rng.range(-2.0, 2.0);
    }
    const double s = cosine_similarity(u, v);
    CHECK(s >= -1.0 - 1e-12);
    CHECK(s <= 1.0 + 1e-12);
    CHECK(cosine_similarity(v, u) == doctest::Approx(s).epsilon(1e-12));
    const double scale = rng.range(0.1, 50.0);
    CHECK(cosine_similarity((scale * u).eval(), v) == doctest::Approx(s).epsilon(1e-9));
    CHECK(cosine_similarity(u, (scale * v).eval()) == doctest::Approx(s).epsilon(1e-9));
  }
}

TEST_CASE("cosine gradient matches central differences") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    Vector u(5), v(5);
    for (Index j = 0; j < 5; ++j) {
      u(j) = rng.range(-2.0, 2.0);
      v(j) = rng.range(-2.0, 2.0);
    }
    const Vector g = cosine_similarity_grad_u(u, v);
    for (Index j = 0; j < 5; ++j) {
      const double h = 1e-6;
      Vector up = u, down = u;
      up(j) += h;
      down(j) -= h;
      const double numeric = (cosine_similarity(up, v) - cosine_similarity(down, v)) / (2 * h);
      CHECK(g(j) == doctest::Approx(numeric).epsilon(1e-5));
    }
  }
}
