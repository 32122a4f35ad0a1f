#include "alflab/catalog.hpp"

#include <cmath>
#include <stdexcept>

#include "alflab/rng.hpp"

namespace alflab {

namespace {

JetMat zero_mat(int order) {
  JetMat g;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) g[i][j] = Jet::constant(0.0, order);
  return g;
}

ChartDomain box(std::array<double, kDim> lo, std::array<double, kDim> hi,
                std::array<double, kDim> margin, std::array<bool, kDim> periodic,
                std::array<double, kDim> slo, std::array<double, kDim> shi, int orient) {
  ChartDomain d;
  d.lo = lo; d.hi = hi; d.margin = margin; d.periodic = periodic;
  d.sample_lo = slo; d.sample_hi = shi; d.orientation = orient;
  return d;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::string to_string(MetricKind k) {
  switch (k) {
    case MetricKind::FlatR3xS1: return "flat-r3xs1";
    case MetricKind::FlatQuotientZ2Marker: return "flat-r3xs1-z2";
    case MetricKind::ModelFibered: return "model-fibered";
    case MetricKind::Schwarzschild: return "schwarzschild";
    case MetricKind::Kerr: return "kerr";
    case MetricKind::TaubBolt: return "taub-bolt";
    case MetricKind::ChenTeo: return "chen-teo";
  }
  return "?";
}

std::optional<MetricKind> metric_kind_from_string(const std::string& s) {
  for (MetricKind k : {MetricKind::FlatR3xS1, MetricKind::FlatQuotientZ2Marker,
                       MetricKind::ModelFibered, MetricKind::Schwarzschild, MetricKind::Kerr,
                       MetricKind::TaubBolt, MetricKind::ChenTeo})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

MetricField make_flat_r3xs1(double L) {
  if (L <= 0.0) throw std::domain_error("fiber length L must be positive");
  auto fn = [](const ChartPoint& p, int order) {
    Jet r = Jet::variable(p.x[0], 0, order);
    Jet th = Jet::variable(p.x[1], 1, order);
    JetMat g = zero_mat(order);
    g[0][0] = Jet::constant(1.0, order);
    g[1][1] = r * r;
    g[2][2] = Jet::constant(1.0, order);
    g[3][3] = r * r * th.sin() * th.sin();
    return g;
  };
  std::map<std::string, ChartDomain> atlas;
  atlas["polar"] = box({0, 0, 0, 0}, {kInf, M_PI, L, 2 * M_PI}, {1e-3, 1e-3, 0, 0},
                       {false, false, true, true}, {0.5, 0.15, 0, 0}, {12.0, M_PI - 0.15, L, 2 * M_PI}, +1);
  MetricField mf("polar", fn, atlas, {{"L", L}}, L);
  AsymptoticFrame fr;
  fr.torus_measure = L * 2 * M_PI;
  mf.set_frame(fr);
  return mf;
}

MetricField make_flat_quotient_z2(double L) {
  MetricField mf = make_flat_r3xs1(L);
  mf.set_z2_quotient_marker(true);
  return mf;
}

MetricField make_model_metric(int m, double L, std::function<Jet(const Jet&)> connection_phi) {
  if (m != 3)
    throw std::domain_error("only m = 3 (4-dimensional total space) is supported");
  if (L <= 0.0) throw std::domain_error("fiber length L must be positive");
  if (!connection_phi) throw std::domain_error("invalid connection data");
  auto fn = [connection_phi](const ChartPoint& p, int order) {
    Jet r = Jet::variable(p.x[0], 0, order);
    Jet th = Jet::variable(p.x[1], 1, order);
    Jet a = connection_phi(th);
    JetMat g = zero_mat(order);
    // dr^2 + r^2 (dth^2 + sin^2 dphi^2) + (dy + a(th) dphi)^2
    g[0][0] = Jet::constant(1.0, order);
    g[1][1] = r * r;
    g[2][2] = Jet::constant(1.0, order);
    g[2][3] = a;
    g[3][2] = a;
    g[3][3] = r * r * th.sin() * th.sin() + a * a;
    return g;
  };
  std::map<std::string, ChartDomain> atlas;
  atlas["polar"] = box({0, 0, 0, 0}, {kInf, M_PI, L, 2 * M_PI}, {1e-3, 1e-3, 0, 0},
                       {false, false, true, true}, {0.5, 0.15, 0, 0}, {12.0, M_PI - 0.15, L, 2 * M_PI}, +1);
  MetricField mf("polar", fn, atlas, {{"L", L}}, L);
  AsymptoticFrame fr;
  fr.torus_measure = L * 2 * M_PI;
  mf.set_frame(fr);
  return mf;
}

MetricField make_kerr(double m, double a) {
  if (m <= 0.0 || std::abs(a) >= m)
    throw std::domain_error("Kerr requires m > 0 and |a| < m");
  const double rp = m + std::sqrt(m * m + a * a);
  const double rm = m - std::sqrt(m * m + a * a);
  auto fn = [m, a](const ChartPoint& p, int order) {
    Jet r = Jet::variable(p.x[0], 0, order);
    Jet th = Jet::variable(p.x[1], 1, order);
    Jet c = th.cos(), s = th.sin();
    Jet rho2 = r * r - (a * a) * c * c;
    Jet Psi = r * r - 2 * m * r - a * a;
    JetMat g = zero_mat(order);
    g[0][0] = rho2 / Psi;
    g[1][1] = rho2;
    Jet A = Psi / rho2;
    Jet B = s * s / rho2;
    Jet u0 = Jet::constant(1.0, order), u1 = a * s * s;
    Jet v0 = Jet::constant(a, order), v1 = -(r * r - a * a);
    g[2][2] = A * u0 * u0 + B * v0 * v0;
    g[2][3] = A * u0 * u1 + B * v0 * v1;
    g[3][2] = g[2][3];
    g[3][3] = A * u1 * u1 + B * v1 * v1;
    return g;
  };
  const double beta = 8 * M_PI * m * rp / (rp - rm);  // tau period from bolt smoothness
  std::map<std::string, ChartDomain> atlas;
  const double mar = 0.04 * rp;
  atlas["bl"] = box({rp, 0, 0, 0}, {kInf, M_PI, beta, 2 * M_PI}, {mar, 1e-3, 0, 0},
                    {false, false, true, true}, {rp + 0.5 * m, 0.15, 0, 0},
                    {rp + 10 * m, M_PI - 0.15, beta, 2 * M_PI}, +1);
  MetricField mf("bl", fn, atlas,
                 {{"m", m}, {"a", a}, {"r_plus", rp}, {"r_minus", rm}, {"beta", beta}}, beta);
  AsymptoticFrame fr;
  fr.torus_measure = beta * 2 * M_PI;
  fr.rho_floor = std::max(1.5, 0.1 * rp);
  mf.set_frame(fr);
  return mf;
}

MetricField make_schwarzschild(double m) { return make_kerr(m, 0.0); }

MetricField make_taub_bolt(double n) {
  if (n <= 0.0) throw std::domain_error("Taub-Bolt requires n > 0");
  const double mtb = 1.25 * n;
  auto fn = [n, mtb](const ChartPoint& p, int order) {
    Jet r = Jet::variable(p.x[0], 0, order);
    Jet th = Jet::variable(p.x[1], 1, order);
    Jet c = th.cos(), s = th.sin();
    Jet rho2 = r * r - n * n;
    Jet Psi = r * r - 2 * mtb * r + n * n;
    JetMat g = zero_mat(order);
    g[0][0] = rho2 / Psi;
    g[1][1] = rho2;
    Jet f = Psi / rho2 * (4 * n * n);
    g[2][2] = f;
    g[2][3] = f * c;
    g[3][2] = g[2][3];
    g[3][3] = rho2 * s * s + f * c * c;
    return g;
  };
  const double L = 8 * M_PI * n;  // psi period 4 pi, asymptotic fiber radius 2n
  std::map<std::string, ChartDomain> atlas;
  atlas["tb"] = box({2 * n, 0, 0, 0}, {kInf, M_PI, 4 * M_PI, 2 * M_PI}, {0.08 * n, 1e-3, 0, 0},
                    {false, false, true, true}, {2.5 * n, 0.15, 0, 0},
                    {14 * n, M_PI - 0.15, 4 * M_PI, 2 * M_PI}, +1);
  MetricField mf("tb", fn, atlas, {{"n", n}, {"m", mtb}}, L);
  AsymptoticFrame fr;
  fr.torus_measure = 4 * M_PI * 2 * M_PI;
  fr.rho_floor = std::max(1.5, 0.5 * n);
  mf.set_frame(fr);
  return mf;
}

ChenTeoRoots chen_teo_roots(double xi) {
  ChenTeoRoots r;
  r.nu = -2 * xi * xi;
  r.x1 = -4 * xi * xi * xi * (1 - xi);
  r.x2 = -xi * (1 - 2 * xi + 2 * xi * xi);
  r.x3 = 1 - 2 * xi;
  r.a3 = 1.0;
  r.a2 = -(r.x1 + r.x2 + r.x3);
  r.a1 = r.x1 * r.x2 + r.x1 * r.x3 + r.x2 * r.x3;
  r.a0 = -r.x1 * r.x2 * r.x3;
  return r;
}

namespace {

/// Chen-Teo components from jets of (x, y); shared by both charts.
JetMat chen_teo_components(const Jet& x, const Jet& y, const ChenTeoRoots& rt, double kappa,
                           int order) {
  const double a0 = rt.a0, a1 = rt.a1, a2 = rt.a2, a3 = rt.a3;
  const double nu = rt.nu;
  Jet X = ((a3 * x + a2) * x + a1) * x + a0;  // monic cubic, a4 = 0
  Jet Y = ((a3 * y + a2) * y + a1) * y + a0;
  Jet F = y * y * X - x * x * Y;
  Jet H = (nu * x + y) * ((nu * x - y) * (a1 - a3 * x * y) - 2 * (1 - nu) * a0);
  Jet Gg = (nu * nu * a0 + 2 * nu * a3 * y * y * y) * X + ((1 - 2 * nu) * a0 - 2 * nu * a1 * x) * Y;
  Jet xmy = x - y;
  Jet W = (kappa * H) / (xmy * xmy * xmy);
  JetMat g = zero_mat(order);
  g[0][0] = W / X;
  g[1][1] = -(W / Y);
  Jet Btt = F / (xmy * H);
  Jet Gf = Gg / F;
  g[2][2] = Btt;
  g[2][3] = Btt * Gf;
  g[3][2] = g[2][3];
  g[3][3] = -(W * X * Y) / (kappa * F) + Btt * Gf * Gf;
  return g;
}

}  // namespace

MetricField make_chen_teo(double kappa, double xi) {
  if (kappa <= 0.0) throw std::domain_error("Chen-Teo requires kappa > 0");
  if (!(xi > 0.5 && xi < 1.0 / std::sqrt(2.0)))
    throw std::domain_error("Chen-Teo requires xi in (1/2, 1/sqrt 2) (root ordering)");
  ChenTeoRoots rt = chen_teo_roots(xi);
  if (!(rt.x1 < rt.x2 && rt.x2 < rt.x3 && rt.nu > -1 && rt.nu < 1))
    throw std::domain_error("Chen-Teo root ordering violated");
  const double cc = -rt.x2 * std::sqrt(kappa * (1 - rt.nu * rt.nu));  // |x2| sqrt(k(1-nu^2))

  auto fn = [rt, kappa, cc](const ChartPoint& p, int order) {
    if (p.chart == "xy") {
      Jet x = Jet::variable(p.x[0], 0, order);
      Jet y = Jet::variable(p.x[1], 1, order);
      return chen_teo_components(x, y, rt, kappa, order);
    }
    // rtheta chart: x = x2 - x2 sqrt(k(1-nu^2))/r cos^2(th/2), y = x2 + ... sin^2(th/2)
    Jet r = Jet::variable(p.x[0], 0, order);
    Jet th = Jet::variable(p.x[1], 1, order);
    Jet half = th * 0.5;
    Jet c2 = half.cos() * half.cos();
    Jet s2 = half.sin() * half.sin();
    Jet x = rt.x2 - (rt.x2 / r) * std::sqrt(kappa * (1 - rt.nu * rt.nu)) * c2;
    Jet y = rt.x2 + (rt.x2 / r) * std::sqrt(kappa * (1 - rt.nu * rt.nu)) * s2;
    return chen_teo_components(x, y, rt, kappa, order);
  };

  const double wx = rt.x3 - rt.x2, wy = rt.x2 - rt.x1;
  std::map<std::string, ChartDomain> atlas;
  atlas["xy"] = box({rt.x2, rt.x1, 0, 0}, {rt.x3, rt.x2, 1, 1},
                    {0.02 * wx, 0.02 * wy, 0, 0}, {false, false, true, true},
                    {rt.x2 + 0.1 * wx, rt.x1 + 0.1 * wy, 0, 0},
                    {rt.x3 - 0.1 * wx, rt.x2 - 0.1 * wy, 1, 1}, -1);
  const double r_tent = std::max(cc / wx, cc / wy);
  atlas["rtheta"] = box({r_tent, 0, 0, 0}, {kInf, M_PI, 1, 1}, {0.05 * r_tent, 1e-3, 0, 0},
                        {false, false, true, true}, {1.4 * r_tent, 0.15, 0, 0},
                        {10 * r_tent, M_PI - 0.15, 1, 1}, -1);
  std::map<std::string, double> params = {
      {"kappa", kappa}, {"xi", xi},   {"nu", rt.nu}, {"x1", rt.x1}, {"x2", rt.x2},
      {"x3", rt.x3},    {"a0", rt.a0}, {"a1", rt.a1}, {"a2", rt.a2}, {"a3", rt.a3},
      {"r_tent", r_tent}, {"cc", cc}};
  MetricField mf("xy", fn, atlas, params, 1.0);
  AsymptoticFrame fr;
  // tau, phi periods are not needed by any computed quantity (they cancel in all
  // ratios and signs); the torus measure is set to 1 and documented.
  fr.torus_measure = 1.0;
  fr.rho_floor = std::max(1.5, 0.2 * r_tent);
  mf.set_frame(fr);
  const double floor2 = fr.rho_floor * fr.rho_floor;
  mf.set_rho_fn([cc, floor2](const ChartPoint& p, int order) {
    Jet r(0);
    if (p.chart == "xy") {
      Jet x = Jet::variable(p.x[0], 0, order);
      Jet y = Jet::variable(p.x[1], 1, order);
      r = cc / (x - y);
    } else {
      r = Jet::variable(p.x[0], 0, order);
    }
    return (r * r + floor2).sqrt();
  });
  return mf;
}

MetricField make_flat_r4() {
  auto fn = [](const ChartPoint& p, int order) {
    Jet r = Jet::variable(p.x[0], 0, order);
    Jet th = Jet::variable(p.x[1], 1, order);
    Jet c = th.cos(), s = th.sin();
    Jet q = r * r * 0.25;
    JetMat g = zero_mat(order);
    g[0][0] = Jet::constant(1.0, order);
    g[1][1] = q;
    g[2][2] = q;
    g[2][3] = q * c;
    g[3][2] = g[2][3];
    g[3][3] = q * s * s + q * c * c;
    return g;
  };
  std::map<std::string, ChartDomain> atlas;
  atlas["polar"] = box({0, 0, 0, 0}, {kInf, M_PI, 4 * M_PI, 2 * M_PI}, {1e-3, 1e-3, 0, 0},
                       {false, false, true, true}, {0.5, 0.15, 0, 0},
                       {12.0, M_PI - 0.15, 4 * M_PI, 2 * M_PI}, +1);
  MetricField mf("polar", fn, atlas, {}, 0.0);
  AsymptoticFrame fr;
  fr.torus_measure = 4 * M_PI * 2 * M_PI;
  mf.set_frame(fr);
  return mf;
}

MetricField model_metric_of(const MetricField& g, MetricKind kind) {
  switch (kind) {
    case MetricKind::FlatR3xS1:
    case MetricKind::FlatQuotientZ2Marker:
    case MetricKind::ModelFibered:
      return g;  // already a model metric
    case MetricKind::Schwarzschild:
    case MetricKind::Kerr: {
      const double beta = g.param("beta");
      auto fn = [](const ChartPoint& p, int order) {
        Jet r = Jet::variable(p.x[0], 0, order);
        Jet th = Jet::variable(p.x[1], 1, order);
        JetMat m = zero_mat(order);
        m[0][0] = Jet::constant(1.0, order);
        m[1][1] = r * r;
        m[2][2] = Jet::constant(1.0, order);
        m[3][3] = r * r * th.sin() * th.sin();
        return m;
      };
      std::map<std::string, ChartDomain> atlas{{"bl", g.domain("bl")}};
      MetricField mf("bl", fn, atlas, {{"beta", beta}}, beta);
      mf.set_frame(g.frame());
      return mf;
    }
    case MetricKind::TaubBolt: {
      const double n = g.param("n");
      auto fn = [n](const ChartPoint& p, int order) {
        Jet r = Jet::variable(p.x[0], 0, order);
        Jet th = Jet::variable(p.x[1], 1, order);
        Jet c = th.cos(), s = th.sin();
        JetMat m = zero_mat(order);
        m[0][0] = Jet::constant(1.0, order);
        m[1][1] = r * r;
        const double f = 4 * n * n;
        m[2][2] = Jet::constant(f, order);
        m[2][3] = c * f;
        m[3][2] = m[2][3];
        m[3][3] = r * r * s * s + f * c * c;
        return m;
      };
      std::map<std::string, ChartDomain> atlas{{"tb", g.domain("tb")}};
      MetricField mf("tb", fn, atlas, {{"n", n}}, g.fiber_length());
      mf.set_frame(g.frame());
      return mf;
    }
    case MetricKind::ChenTeo: {
      // asymptotic constants fitted once from the rtheta chart at large radius
      MetricField self = g;
      const double R = 1e7;
      ChartPoint p{"rtheta", {R, 1.1, 0, 0}};
      Mat4 far = g.values(p);
      const double att = far[2][2];
      const double aphph = far[3][3] / (R * R * std::sin(1.1) * std::sin(1.1));
      const double athth = far[1][1] / (R * R);
      const double arr = far[0][0];
      auto fn = [arr, athth, att, aphph](const ChartPoint& p2, int order) {
        Jet r = Jet::variable(p2.x[0], 0, order);
        Jet th = Jet::variable(p2.x[1], 1, order);
        JetMat m = zero_mat(order);
        m[0][0] = Jet::constant(arr, order);
        m[1][1] = r * r * athth;
        m[2][2] = Jet::constant(att, order);
        m[3][3] = r * r * th.sin() * th.sin() * aphph;
        return m;
      };
      std::map<std::string, ChartDomain> atlas{{"rtheta", g.domain("rtheta")}};
      MetricField mf("rtheta", fn, atlas, {}, g.fiber_length());
      mf.set_frame(g.frame());
      return mf;
    }
  }
  throw std::logic_error("unreachable");
}

MetricField perturb(const MetricField& g, const SymTwoTensorField& h, double s) {
  auto gfn = [g, h, s](const ChartPoint& p, int order) {
    JetMat a = g.components(p, order);
    JetMat b = h.jets(p, order);
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) a[i][j] += b[i][j] * s;
    return a;
  };
  const std::string chart = g.default_chart();
  std::map<std::string, ChartDomain> atlas{{chart, g.domain(chart)}};
  MetricField out(chart, gfn, atlas, g.params(), g.fiber_length());
  out.set_frame(g.frame());
  if (g.z2_quotient_marker()) out.set_z2_quotient_marker(true);
  const double floor = positivity_floor(out);
  if (floor <= 0.0)
    throw std::domain_error("perturbation destroys positive-definiteness (min eig " +
                            std::to_string(floor) + ")");
  return out;
}

double positivity_floor(const MetricField& g, int nsamples, unsigned seed) {
  Pcg32 rng(seed);
  const auto& dom = g.domain(g.default_chart());
  double floor = std::numeric_limits<double>::infinity();
  for (int k = 0; k < nsamples; ++k) {
    ChartPoint p;
    p.chart = g.default_chart();
    for (int i = 0; i < kDim; ++i)
      p.x[i] = dom.sample_lo[i] + rng.uniform() * (dom.sample_hi[i] - dom.sample_lo[i]);
    auto ev = sym4_eigenvalues(g.values(p));
    floor = std::min(floor, ev[0]);
  }
  return floor;
}

MetricField make_catalog_metric(MetricKind kind, const std::map<std::string, double>& params) {
  auto get = [&](const std::string& k, double dflt) {
    auto it = params.find(k);
    return it == params.end() ? dflt : it->second;
  };
  switch (kind) {
    case MetricKind::FlatR3xS1: return make_flat_r3xs1(get("L", 2 * M_PI));
    case MetricKind::FlatQuotientZ2Marker: return make_flat_quotient_z2(get("L", 2 * M_PI));
    case MetricKind::ModelFibered: {
      const double hopf = get("hopf", 0.0);
      return make_model_metric(3, get("L", 2 * M_PI),
                               [hopf](const Jet& th) { return th.cos() * hopf; });
    }
    case MetricKind::Schwarzschild: return make_schwarzschild(get("m", 1.0));
    case MetricKind::Kerr: return make_kerr(get("m", 1.0), get("a", 0.5));
    case MetricKind::TaubBolt: return make_taub_bolt(get("n", 1.0));
    case MetricKind::ChenTeo: return make_chen_teo(get("kappa", 1.0), get("xi", 0.6));
  }
  throw std::logic_error("unreachable");
}

MetricField conformal_flat_family(double L, double A, double sigma) {
  MetricField flat = make_flat_r3xs1(L);
  auto fn = [flat, A, sigma](const ChartPoint& p, int order) {
    JetMat g = flat.components(p, order);
    Jet u = flat.rho_jets(p, order).pow(-sigma) * A + 1.0;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) g[i][j] = g[i][j] * u;
    return g;
  };
  std::map<std::string, ChartDomain> atlas{{"polar", flat.domain("polar")}};
  MetricField mf("polar", fn, atlas, {{"L", L}, {"A", A}, {"sigma", sigma}}, L);
  mf.set_frame(flat.frame());
  return mf;
}

MetricField harmonic_conformal_flat(double L, double A) {
  MetricField flat = make_flat_r3xs1(L);
  auto fn = [flat, A](const ChartPoint& p, int order) {
    JetMat g = flat.components(p, order);
    Jet u = flat.rho_jets(p, order).inverse() * A + 1.0;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) g[i][j] = g[i][j] * u;
    return g;
  };
  std::map<std::string, ChartDomain> atlas{{"polar", flat.domain("polar")}};
  MetricField mf("polar", fn, atlas, {{"L", L}, {"A", A}}, L);
  mf.set_frame(flat.frame());
  return mf;
}

}  // namespace alflab
