#include <doctest.h>

#include <cmath>

#include "alflab/jet.hpp"

using namespace alflab;

TEST_CASE("jet arithmetic reproduces closed-form partial derivatives") {
  // f(x) = x0^2 * sin(x1) + exp(x2) / (1 + x3^2)
  const double x0 = 1.3, x1 = 0.7, x2 = -0.2, x3 = 0.4;
  Jet a = Jet::variable(x0, 0, 4);
  Jet b = Jet::variable(x1, 1, 4);
  Jet c = Jet::variable(x2, 2, 4);
  Jet d = Jet::variable(x3, 3, 4);
  Jet f = a * a * b.sin() + c.exp() / (1.0 + d * d);

  CHECK(f.value() == doctest::Approx(x0 * x0 * std::sin(x1) + std::exp(x2) / (1 + x3 * x3))
                         .epsilon(1e-14));
  CHECK(f.deriv({0}) == doctest::Approx(2 * x0 * std::sin(x1)).epsilon(1e-13));
  CHECK(f.deriv({0, 1}) == doctest::Approx(2 * x0 * std::cos(x1)).epsilon(1e-13));
  CHECK(f.deriv({1, 1}) == doctest::Approx(-x0 * x0 * std::sin(x1)).epsilon(1e-13));
  CHECK(f.deriv({2, 2, 2}) ==
        doctest::Approx(std::exp(x2) / (1 + x3 * x3)).epsilon(1e-12));
  // d/dx3 of 1/(1+t^2): -2t/(1+t^2)^2
  const double t = x3, den = 1 + t * t;
  CHECK(f.deriv({3}) == doctest::Approx(std::exp(x2) * (-2 * t) / (den * den)).epsilon(1e-12));

  SUBCASE("partials are symmetric under index permutation") {
    CHECK(f.deriv({0, 1}) == doctest::Approx(f.deriv({1, 0})).epsilon(1e-15));
    CHECK(f.deriv({2, 3, 3}) == doctest::Approx(f.deriv({3, 2, 3})).epsilon(1e-15));
  }

  SUBCASE("truncation order is respected") {
    Jet g = f.truncated(2);
    CHECK(g.order() == 2);
    CHECK_THROWS_AS((void)g.deriv({0, 0, 0}), std::out_of_range);
  }
}

TEST_CASE("jet composition functions against finite differences") {
  const double h = 1e-6;
  auto scalar = [](double x) { return std::log(2.0 + std::sin(x)) * std::sqrt(3.0 + x * x); };
  auto jet_of = [](double x, int o) {
    Jet t = Jet::variable(x, 0, o);
    return (2.0 + t.sin()).log() * (3.0 + t * t).sqrt();
  };
  const double x = 0.83;
  Jet f = jet_of(x, 3);
  const double fd1 = (scalar(x + h) - scalar(x - h)) / (2 * h);
  const double fd2 = (scalar(x + h) - 2 * scalar(x) + scalar(x - h)) / (h * h);
  CHECK(f.deriv({0}) == doctest::Approx(fd1).epsilon(1e-8));
  CHECK(f.deriv({0, 0}) == doctest::Approx(fd2).epsilon(1e-3));
}

TEST_CASE("jet pow and inverse") {
  Jet t = Jet::variable(2.0, 1, 4);
  Jet p = t.pow(-1.5);
  CHECK(p.value() == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));
  CHECK(p.deriv({1}) == doctest::Approx(-1.5 * std::pow(2.0, -2.5)).epsilon(1e-14));
  Jet q = 1.0 / t;
  CHECK(q.deriv({1, 1}) == doctest::Approx(2.0 / 8.0).epsilon(1e-14));
  CHECK_THROWS_AS((void)Jet::constant(0.0, 2).inverse(), std::domain_error);
  CHECK_THROWS_AS((void)Jet::constant(-1.0, 2).log(), std::domain_error);
}

TEST_CASE("derivative jet d() shifts orders") {
  Jet a = Jet::variable(1.1, 0, 3);
  Jet b = Jet::variable(0.4, 2, 3);
  Jet f = a * a * a * b;
  Jet fa = f.d(0);
  CHECK(fa.order() == 2);
  CHECK(fa.value() == doctest::Approx(3 * 1.1 * 1.1 * 0.4).epsilon(1e-14));
  CHECK(fa.deriv({2}) == doctest::Approx(3 * 1.1 * 1.1).epsilon(1e-14));
}
