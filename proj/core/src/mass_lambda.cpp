#include "alflab/mass_lambda.hpp"

#include <cmath>

namespace alflab {

namespace {

double torus_measure(const MetricField& g) {
  double t = g.frame().torus_measure;
  if (g.z2_quotient_marker()) t *= 0.5;
  return t;
}

struct ThetaRange {
  double lo, hi;
};

ThetaRange theta_range(const MetricField& g) {
  const auto& dom = g.domain(g.default_chart());
  const int ax = g.frame().polar_axis;
  return {dom.lo[ax] + 1.5 * dom.margin[ax], dom.hi[ax] - 1.5 * dom.margin[ax]};
}

ChartPoint rt_point(const MetricField& g, double r, double th) {
  ChartPoint p{g.default_chart(), {}};
  p.x[g.frame().radial_axis] = r;
  p.x[g.frame().polar_axis] = th;
  return p;
}

double r_inner(const MetricField& g) {
  const auto& dom = g.domain(g.default_chart());
  const int ax = g.frame().radial_axis;
  return dom.lo[ax] + 1.5 * dom.margin[ax];
}

}  // namespace

double boundary_mass_integral(const MetricField& g, const MetricField& ref, double R,
                              int ntheta) {
  if (std::abs(g.fiber_length() - ref.fiber_length()) >
      1e-9 * std::max(1.0, std::abs(g.fiber_length())))
    throw std::domain_error("relative mass requires matching fiber lengths");
  const int rax = ref.frame().radial_axis;
  auto tr = theta_range(ref);
  auto integrand = [&](double th) {
    ChartPoint p = rt_point(ref, R, th);
    auto mjr = detail::metric_jets(ref, p, 1);
    auto ch = detail::christoffel_jets(mjr);
    JetMat hj = g.components(p, 1);
    JetMat rj = ref.components(p, 1);
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) hj[i][j] -= rj[i][j];
    // (div h)_r
    Jet nb[kDim][kDim][kDim];
    detail::covder2(ch, hj, nb);
    double divh_r = 0;
    for (int i = 0; i < kDim; ++i)
      for (int k = 0; k < kDim; ++k)
        divh_r += mjr.ginv[i][k].value() * nb[i][k][rax].value();
    // (d Tr h)_r
    Jet trh(1);
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) trh += mjr.ginv[i][j].truncated(1) * hj[i][j];
    const double dtr_r = trh.d(rax).value();
    // <F, n> dA reduces to F_r ref^{rr} sqrt(det ref) dtheta x torus
    const double grr = mjr.ginv[rax][rax].value();
    return (divh_r - dtr_r) * grr * mjr.sqrtg.value();
  };
  return torus_measure(ref) *
         integrate_gl(integrand, tr.lo, tr.hi, std::max(2, ntheta / 12), 12);
}

MassEstimate relative_mass(const MetricField& g, const MetricField& ref,
                           const std::vector<double>& radii, int ntheta) {
  if (radii.size() < 3) throw std::invalid_argument("mass ladder needs >= 3 radii");
  for (size_t i = 1; i < radii.size(); ++i)
    if (radii[i] <= radii[i - 1]) throw std::invalid_argument("mass radii must increase");
  MassEstimate est;
  est.radii = radii;
  for (double R : radii) est.boundary_integrals.push_back(boundary_mass_integral(g, ref, R, ntheta));
  auto rr = richardson_ladder(est.radii, est.boundary_integrals);
  est.extrapolated = rr.limit;
  est.error_estimate = rr.error;
  est.fitted_exponent = rr.exponent;
  est.divergent = rr.divergent;
  return est;
}

namespace {

/// Reduced Laplacian coefficients for the (r, theta) block metrics of the catalog
/// (g^{r theta} = 0 is asserted on samples).
struct Reduced {
  const MetricField* g;
  double theta_sample;

  double sqrtg(double r, double th) const {
    auto mj = detail::metric_jets(*g, rt_point(*g, r, th), 0);
    return mj.sqrtg.value();
  }
  double Pr(double r, double th) const {
    auto mj = detail::metric_jets(*g, rt_point(*g, r, th), 0);
    return mj.sqrtg.value() * mj.ginv[g->frame().radial_axis][g->frame().radial_axis].value();
  }
  double Pth(double r, double th) const {
    auto mj = detail::metric_jets(*g, rt_point(*g, r, th), 0);
    return mj.sqrtg.value() * mj.ginv[g->frame().polar_axis][g->frame().polar_axis].value();
  }
};

Jet grid_jet_1d(const GridFunction1D& f, double r, int rax, int order) {
  std::array<double, kJetSlots> parts{};
  const auto& T = JetTables::get();
  for (int s = 0; s < T.slots_at[order + 1]; ++s) {
    const auto& a = T.midx[s];
    bool pure_r = true;
    for (int k = 0; k < kDim; ++k)
      if (k != rax && a[k] != 0) pure_r = false;
    parts[s] = pure_r ? f.eval(r, a[rax]) : 0.0;
  }
  return Jet::from_partials(parts, order);
}

Jet grid_jet_2d(const GridFunction2D& f, double r, double th, int rax, int thax, int order) {
  std::array<double, kJetSlots> parts{};
  const auto& T = JetTables::get();
  for (int s = 0; s < T.slots_at[order + 1]; ++s) {
    const auto& a = T.midx[s];
    bool rt_only = true;
    for (int k = 0; k < kDim; ++k)
      if (k != rax && k != thax && a[k] != 0) rt_only = false;
    parts[s] = rt_only ? f.eval(r, th, a[rax], a[thax]) : 0.0;
  }
  return Jet::from_partials(parts, order);
}

}  // namespace

WSolution solve_w(const MetricField& g, const WSolveConfig& cfg) {
  WSolution sol;
  sol.mode = cfg.mode;
  sol.r_in = r_inner(g);
  sol.r_out = cfg.r_out;
  const int rax = g.frame().radial_axis;
  const int thax = g.frame().polar_axis;
  auto tr = theta_range(g);

  ScalarField Rfield = cfg.scalar_curvature_override
                           ? *cfg.scalar_curvature_override
                           : ScalarField([gcopy = g](const ChartPoint& p, int order) {
                               return scalar_curvature_jets(gcopy, p, std::min(order, 2));
                             });
  sol.R_used = Rfield;

  const double th_mid = 0.5 * (tr.lo + tr.hi);
  Reduced red{&g, th_mid};

  if (cfg.mode == ReductionMode::Radial1D) {
    RadialProblem prob;
    prob.r0 = sol.r_in;
    prob.r1 = cfg.r_out;
    prob.n = cfg.n;
    const double s0 = std::sin(th_mid);
    prob.p = [&red, th_mid, s0](double r) { return red.Pr(r, th_mid) / s0; };
    prob.w = [&red, th_mid, s0](double r) { return red.sqrtg(r, th_mid) / s0; };
    prob.q = [&Rfield, &g, rax, th_mid](double r) {
      return -0.25 * Rfield.value(rt_point(g, r, th_mid));
    };
    prob.f = [&Rfield, &g, rax, th_mid](double r) {
      return 0.25 * Rfield.value(rt_point(g, r, th_mid));
    };
    prob.inner = Bc{Bc::ZeroFlux, 0, 0};
    prob.outer = Bc{Bc::Robin, -1.0 / cfg.r_out, 0};
    auto rs = solve_radial(prob);
    sol.v1 = rs.u;
    sol.pde_residual = rs.residual;
    double wmin = 1e300;
    for (double v : sol.v1.values()) wmin = std::min(wmin, 1.0 + v);
    sol.w_min = wmin;
    GridFunction1D v1 = sol.v1;
    sol.w_field = ScalarField([v1, rax](const ChartPoint& p, int order) {
      return grid_jet_1d(v1, p.x[rax], rax, order) + 1.0;
    });
  } else {
    EllipticProblem2D prob;
    prob.a0 = sol.r_in;
    prob.a1 = cfg.r_out;
    prob.b0 = tr.lo;
    prob.b1 = tr.hi;
    prob.na = cfg.n;
    prob.nb = cfg.ntheta;
    prob.Pa = [&red](double r, double th) { return red.Pr(r, th); };
    prob.Pb = [&red](double r, double th) { return red.Pth(r, th); };
    prob.W = [&red](double r, double th) { return red.sqrtg(r, th); };
    prob.Q = [&Rfield, &g](double r, double th) {
      return -0.25 * Rfield.value(rt_point(g, r, th));
    };
    prob.F = [&Rfield, &g](double r, double th) {
      return 0.25 * Rfield.value(rt_point(g, r, th));
    };
    prob.bc_a0 = Bc{Bc::ZeroFlux, 0, 0};
    prob.bc_a1 = Bc{Bc::Robin, -1.0 / cfg.r_out, 0};
    prob.bc_b0 = Bc{Bc::ZeroFlux, 0, 0};
    prob.bc_b1 = Bc{Bc::ZeroFlux, 0, 0};
    auto es = solve_elliptic2d(prob);
    sol.v2 = es.u;
    sol.pde_residual = es.residual;
    double wmin = 1e300;
    for (double v : sol.v2.values()) wmin = std::min(wmin, 1.0 + v);
    sol.w_min = wmin;
    GridFunction2D v2 = sol.v2;
    sol.w_field = ScalarField([v2, rax, thax](const ChartPoint& p, int order) {
      return grid_jet_2d(v2, p.x[rax], p.x[thax], rax, thax, order) + 1.0;
    });
  }
  if (sol.w_min <= 0.0)
    throw std::domain_error("w lost positivity: metric outside the admissible neighborhood");
  ScalarField wf = sol.w_field;
  sol.f_field = ScalarField([wf](const ChartPoint& p, int order) {
    return wf.jets(p, order).log() * (-2.0);
  });

  // fge residual: 2 lap f - |df|^2 + R on a sample grid
  double fge = 0;
  for (int i = 1; i <= 12; ++i) {
    const double r = sol.r_in + (cfg.r_out * 0.7 - sol.r_in) * i / 13.0;
    ChartPoint p = rt_point(g, r, th_mid);
    auto mj = detail::metric_jets(g, p, 1);
    const double lapf = laplace_beltrami(g, sol.f_field, p);
    Jet fj = sol.f_field.jets(p, 1);
    Vec4 df;
    for (int k = 0; k < kDim; ++k) df[k] = fj.d(k).value();
    Mat4 ginv;
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) ginv[a][b] = mj.ginv[a][b].value();
    double df2 = 0;
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) df2 += ginv[a][b] * df[a] * df[b];
    fge = std::max(fge, std::abs(2 * lapf - df2 + Rfield.value(p)));
  }
  sol.fge_residual = fge;
  return sol;
}

double reduced_integral(const MetricField& g,
                        const std::function<double(const ChartPoint&)>& integrand, double r0,
                        double r1, int nr, int ntheta) {
  auto tr = theta_range(g);
  auto fr = [&](double r) {
    auto fth = [&](double th) {
      ChartPoint p = rt_point(g, r, th);
      auto mj = detail::metric_jets(g, p, 0);
      return integrand(p) * mj.sqrtg.value();
    };
    return integrate_gl(fth, tr.lo, tr.hi, std::max(1, ntheta / 10), 10);
  };
  return torus_measure(g) * integrate_gl(fr, r0, r1, std::max(1, nr / 10), 10);
}

LambdaCircResult lambda_circ(const MetricField& g, const WSolution& w, double r_max, int nr,
                             int ntheta) {
  LambdaCircResult out;
  out.value = reduced_integral(
      g,
      [&](const ChartPoint& p) { return w.R_used.value(p) * w.w_field.value(p); },
      w.r_in, r_max, nr, ntheta);
  out.gradient_form = reduced_integral(
      g,
      [&](const ChartPoint& p) {
        auto mj = detail::metric_jets(g, p, 0);
        Mat4 ginv;
        for (int a = 0; a < kDim; ++a)
          for (int b = 0; b < kDim; ++b) ginv[a][b] = mj.ginv[a][b].value();
        Jet wj = w.w_field.jets(p, 1);
        Vec4 dw;
        for (int k = 0; k < kDim; ++k) dw[k] = wj.d(k).value();
        double dw2 = 0;
        for (int a = 0; a < kDim; ++a)
          for (int b = 0; b < kDim; ++b) dw2 += ginv[a][b] * dw[a] * dw[b];
        const double wv = wj.value();
        return 4 * dw2 + w.R_used.value(p) * wv * wv;
      },
      w.r_in, r_max, nr, ntheta);
  out.cross_check = std::abs(out.value - out.gradient_form);
  return out;
}

LambdaResult lambda_alf(const MetricField& g, const MetricField& ref, const LambdaConfig& cfg) {
  LambdaResult res;
  res.w = solve_w(g, cfg.solve);
  res.pde_residual = res.w.pde_residual;
  res.w_min = res.w.w_min;

  std::vector<double> radii = cfg.radii;
  if (radii.empty()) {
    const double q = std::pow(2.0, 0.5);
    double R = cfg.solve.r_out * 0.85 / std::pow(q, 5);
    for (int i = 0; i <= 5; ++i) {
      radii.push_back(R);
      R *= q;
    }
  }

  res.relative_mass = relative_mass(g, ref, radii, cfg.ntheta);

  // combined renormalized ladder (the extension formula): volume term minus flux
  std::vector<double> combined;
  for (double R : radii) {
    const double vol = reduced_integral(
        g,
        [&](const ChartPoint& p) { return res.w.R_used.value(p) * res.w.w_field.value(p); },
        res.w.r_in, R);
    combined.push_back(vol - boundary_mass_integral(g, ref, R, cfg.ntheta));
  }
  auto rc = richardson_ladder(radii, combined);
  res.lambda_alf_combined = rc.limit;
  res.combined_error = rc.error;

  // separate ladder for lambda_circ
  std::vector<double> lc;
  for (double R : radii)
    lc.push_back(reduced_integral(
        g,
        [&](const ChartPoint& p) { return res.w.R_used.value(p) * res.w.w_field.value(p); },
        res.w.r_in, R));
  auto rl = richardson_ladder(radii, lc);
  res.lambda_circ_detail = lambda_circ(g, res.w, radii.back());

  if (!rl.divergent && !res.relative_mass.divergent) {
    res.lambda_circ = rl.limit;
    res.lambda_alf = res.lambda_circ - res.relative_mass.extrapolated;
  } else {
    // non-integrable scalar curvature: only the renormalized pair converges
    res.lambda_circ = rl.limit;
    res.lambda_alf = res.lambda_alf_combined;
  }
  return res;
}

MassEstimate weighted_mass(const MetricField& g, const MetricField& ref, const ScalarField& f,
                           const std::vector<double>& radii, int ntheta) {
  MassEstimate base = relative_mass(g, ref, radii, ntheta);
  const int rax = ref.frame().radial_axis;
  auto tr = theta_range(ref);
  MassEstimate est;
  est.radii = radii;
  for (size_t k = 0; k < radii.size(); ++k) {
    const double R = radii[k];
    auto integrand = [&](double th) {
      ChartPoint p = rt_point(ref, R, th);
      auto mj = detail::metric_jets(ref, p, 0);
      Jet fj = f.jets(p, 1);
      const double grr = mj.ginv[rax][rax].value();
      return fj.d(rax).value() * grr * std::exp(-fj.value()) * mj.sqrtg.value();
    };
    const double corr = 2.0 * torus_measure(ref) *
                        integrate_gl(integrand, tr.lo, tr.hi, std::max(2, ntheta / 12), 12);
    est.boundary_integrals.push_back(base.boundary_integrals[k] + corr);
  }
  auto rr = richardson_ladder(est.radii, est.boundary_integrals);
  est.extrapolated = rr.limit;
  est.error_estimate = rr.error;
  est.fitted_exponent = rr.exponent;
  est.divergent = rr.divergent;
  return est;
}

MetricField conformal_metric(const MetricField& g, const ScalarField& f, int m) {
  auto fn = [g, f, m](const ChartPoint& p, int order) {
    JetMat c = g.components(p, order);
    Jet factor = (f.jets(p, order) * (-2.0 / m)).exp();
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) c[i][j] = c[i][j] * factor;
    return c;
  };
  const std::string chart = g.default_chart();
  std::map<std::string, ChartDomain> atlas{{chart, g.domain(chart)}};
  MetricField out(chart, fn, atlas, g.params(), g.fiber_length());
  out.set_frame(g.frame());
  if (g.z2_quotient_marker()) out.set_z2_quotient_marker(true);
  return out;
}

WmlReport verify_wml(const MetricField& g, const MetricField& ref, const LambdaConfig& cfg) {
  LambdaResult lr = lambda_alf(g, ref, cfg);
  std::vector<double> radii = cfg.radii;
  if (radii.empty()) {
    const double q = std::pow(2.0, 0.5);
    double R = cfg.solve.r_out * 0.85 / std::pow(q, 5);
    for (int i = 0; i <= 5; ++i) {
      radii.push_back(R);
      R *= q;
    }
  }
  MassEstimate wm = weighted_mass(g, ref, lr.w.f_field, radii, cfg.ntheta);
  WmlReport rep;
  rep.weighted_mass = wm.extrapolated;
  rep.lambda_alf = lr.lambda_alf;
  rep.defect = std::abs(rep.weighted_mass + rep.lambda_alf);
  const double scale = std::max({std::abs(rep.weighted_mass), std::abs(rep.lambda_alf), 1e-12});
  rep.relative_defect = rep.defect / scale;
  return rep;
}

double shell_volume(const MetricField& g, double r0, double r1, int nr, int ntheta) {
  return reduced_integral(g, [](const ChartPoint&) { return 1.0; }, r0, r1, nr, ntheta);
}

}  // namespace alflab
