#include <doctest.h>

#include <cmath>

#include "alflab/catalog.hpp"
#include "alflab/rng.hpp"

using namespace alflab;

namespace {
ChartPoint sample_interior(const MetricField& g, Pcg32& rng) {
  const auto& dom = g.domain(g.default_chart());
  ChartPoint p{g.default_chart(), {}};
  for (int i = 0; i < kDim; ++i)
    p.x[i] = dom.sample_lo[i] + rng.uniform() * (dom.sample_hi[i] - dom.sample_lo[i]);
  return p;
}
}  // namespace

TEST_CASE("flat metric jets vanish at order 2") {
  MetricField flat = make_flat_r3xs1(2 * M_PI);
  ChartPoint p{"polar", {1.7, 0.9, 0.3, 1.1}};
  JetMat g = flat.components(p, 2);
  // the only coordinate dependence is r^2 and r^2 sin^2, constant components elsewhere
  CHECK(g[0][0].deriv({0}) == 0.0);
  CHECK(g[2][2].deriv({0}) == 0.0);
  CHECK(g[2][2].deriv({1, 1}) == 0.0);
}

TEST_CASE("metric evaluation guards") {
  MetricField kerr = make_kerr(1.0, 0.5);
  CHECK_THROWS_AS((void)kerr.components(ChartPoint{"bl", {1.0, 0.5, 0, 0}}, 2), DomainError);
  CHECK_THROWS_AS((void)kerr.components(ChartPoint{"nope", {4.0, 0.5, 0, 0}}, 2), DomainError);
  CHECK_THROWS_AS((void)kerr.components(ChartPoint{"bl", {4.0, 0.5, 0, 0}}, 5),
                  std::out_of_range);
}

TEST_CASE("Kerr g_tautau radial derivative matches central differences") {
  MetricField kerr = make_kerr(1.0, 0.5);
  const double r = 4.2, th = 0.8, h = 1e-5;
  auto comp = [&](double rr) {
    return kerr.values(ChartPoint{"bl", {rr, th, 0, 0}})[2][2];
  };
  JetMat g = kerr.components(ChartPoint{"bl", {r, th, 0, 0}}, 1);
  const double fd = (comp(r + h) - comp(r - h)) / (2 * h);
  CHECK(g[2][2].deriv({0}) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("Schwarzschild g_rr at r = 4m equals 2") {
  MetricField schw = make_schwarzschild(1.0);
  Mat4 g = schw.values(ChartPoint{"bl", {4.0, 1.0, 0, 0}});
  CHECK(g[0][0] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("jets agree with central differences at random interior points") {
  // 100 random points per catalog metric, relative error <= 1e-6
  auto check_metric = [](const MetricField& g, double tol) {
    Pcg32 rng(7);
    for (int s = 0; s < 100; ++s) {
      ChartPoint p = sample_interior(g, rng);
      JetMat jm = g.components(p, 1);
      for (int ax : {0, 1}) {
        const double h = 1e-5 * std::max(1.0, std::abs(p.x[ax]));
        ChartPoint pp = p, pm = p;
        pp.x[ax] += h;
        pm.x[ax] -= h;
        Mat4 up = g.values(pp), um = g.values(pm);
        for (int i = 0; i < kDim; ++i)
          for (int j = 0; j < kDim; ++j) {
            const double fd = (up[i][j] - um[i][j]) / (2 * h);
            const double an = (ax == 0) ? jm[i][j].deriv({0}) : jm[i][j].deriv({1});
            const double scale = std::max({1.0, std::abs(fd), std::abs(an)});
            CHECK(std::abs(fd - an) / scale <= tol);
          }
      }
    }
  };
  check_metric(make_flat_r3xs1(3.0), 1e-6);
  check_metric(make_kerr(1.0, 0.5), 1e-6);
  check_metric(make_taub_bolt(1.0), 1e-6);
  check_metric(make_chen_teo(1.0, 0.6), 2e-5);  // expression swell in the rationals
}

TEST_CASE("raise then lower is the identity") {
  MetricField kerr = make_kerr(1.0, 0.4);
  Pcg32 rng(3);
  for (int s = 0; s < 20; ++s) {
    ChartPoint p = sample_interior(kerr, rng);
    Mat4 g = kerr.values(p);
    Mat4 ginv = invert(g);
    Mat4 h{};
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j) h[i][j] = h[j][i] = rng.uniform(-1, 1);
    Mat4 up = raise_both(h, ginv);
    Mat4 back = lower_both(up, g);
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) CHECK(std::abs(back[i][j] - h[i][j]) <= 1e-12);
  }
}

TEST_CASE("pointwise norms") {
  SUBCASE("identity metric, diag(1,1,1,1) has norm 2") {
    Mat4 id{};
    for (int i = 0; i < 4; ++i) id[i][i] = 1.0;
    CHECK(pointwise_norm2(id, id) == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("|g|_g = sqrt(n) = 2 everywhere") {
    MetricField tb = make_taub_bolt(0.8);
    Pcg32 rng(11);
    for (int s = 0; s < 25; ++s) {
      ChartPoint p = sample_interior(tb, rng);
      Mat4 g = tb.values(p);
      CHECK(pointwise_norm2(g, invert(g)) == doctest::Approx(2.0).epsilon(1e-12));
    }
  }
}
