#include "alflab/variation.hpp"

#include <cmath>

namespace alflab {

namespace {

ChartPoint rt_point(const MetricField& g, double r, double th, const std::string& chart = "") {
  ChartPoint p{chart.empty() ? g.default_chart() : chart, {}};
  p.x[0] = r;
  p.x[1] = th;
  return p;
}

/// h = 1/2 fhat^3 (omega_- o omega_+) as a jet-valued closure.
struct VariationCore {
  MetricField g;
  ScalarField fhat;
  int kill_axis = 2;
  double kill_coef = 1.0;

  JetVec K_jets(const ChartPoint& p, int order) const {
    JetMat gj = g.components(p, order);
    JetVec K;
    for (int i = 0; i < kDim; ++i) K[i] = gj[i][kill_axis] * kill_coef;
    return K;
  }

  void omegas(const ChartPoint& p, int order, JetMat* omp, JetMat* omm) const {
    const int mo = order + 1;
    auto mj = detail::metric_jets(g, p, mo);
    JetVec K;
    for (int i = 0; i < kDim; ++i) K[i] = mj.g[i][kill_axis] * kill_coef;
    JetMat dK;
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) dK[a][b] = K[b].d(a) - K[a].d(b);
    JetMat st = detail::star2(dK, mj, g.orientation(p.chart), order);
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) {
        (*omp)[a][b] = (dK[a][b].truncated(order) + st[a][b]) * 0.5;
        (*omm)[a][b] = (dK[a][b].truncated(order) - st[a][b]) * 0.5;
      }
  }

  JetMat h_jets(const ChartPoint& p, int order) const {
    JetMat omp, omm;
    omegas(p, order, &omp, &omm);
    auto mj = detail::metric_jets(g, p, order);
    Jet f3 = fhat.jets(p, order);
    f3 = f3 * f3 * f3;
    JetMat h;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) {
        Jet s(order);
        for (int k = 0; k < kDim; ++k)
          for (int l = 0; l < kDim; ++l) s += omm[i][k] * mj.ginv[k][l].truncated(order) * omp[l][j];
        h[i][j] = f3 * s * 0.5;
      }
    return h;
  }
};

ScalarField fhat_field(MetricKind kind, const MetricField& g) {
  switch (kind) {
    case MetricKind::Schwarzschild:
    case MetricKind::Kerr: {
      const double a = g.param("a");
      return ScalarField([a](const ChartPoint& p, int order) {
        Jet r = Jet::variable(p.x[0], 0, order);
        Jet th = Jet::variable(p.x[1], 1, order);
        return r - a * th.cos();
      });
    }
    case MetricKind::TaubBolt: {
      const double n = g.param("n");
      return ScalarField([n](const ChartPoint& p, int order) {
        return Jet::variable(p.x[0], 0, order) + n;
      });
    }
    case MetricKind::ChenTeo: {
      const double nu = g.param("nu");
      const double kap = g.param("kappa");
      const double x2 = g.param("x2");
      const double cc = g.param("cc");
      // positive normalization: fhat = 2 sqrt(kappa) (nu+1)^{-1/3} (nu x + y)/(y - x)
      const double pref = 2.0 * std::sqrt(kap) * std::pow(nu + 1.0, -1.0 / 3.0);
      return ScalarField([nu, pref, x2, cc](const ChartPoint& p, int order) {
        Jet x(0), y(0);
        if (p.chart == "xy") {
          x = Jet::variable(p.x[0], 0, order);
          y = Jet::variable(p.x[1], 1, order);
        } else {
          Jet r = Jet::variable(p.x[0], 0, order);
          Jet th = Jet::variable(p.x[1], 1, order);
          Jet half = th * 0.5;
          x = x2 + (cc / r) * half.cos() * half.cos();
          y = x2 - (cc / r) * half.sin() * half.sin();
        }
        return (nu * x + y) * pref / (y - x);
      });
    }
    default:
      throw std::domain_error("instability variation exists for Kerr/Taub-Bolt/Chen-Teo only");
  }
}

ScalarField potential_field(MetricKind kind, const MetricField& g) {
  switch (kind) {
    case MetricKind::Schwarzschild:
    case MetricKind::Kerr: {
      const double m = g.param("m"), a = g.param("a");
      return ScalarField([m, a](const ChartPoint& p, int order) {
        Jet r = Jet::variable(p.x[0], 0, order);
        Jet th = Jet::variable(p.x[1], 1, order);
        return (1.5 * m) / (r + a * th.cos());
      });
    }
    case MetricKind::TaubBolt: {
      const double n = g.param("n");
      // self-consistent potential for |K| = |grad fhat| normalization:
      // 27n/(32(r-n)) (see module notes; the displayed 3n/(8(r-n)) carries a
      // different K normalization)
      return ScalarField([n](const ChartPoint& p, int order) {
        Jet r = Jet::variable(p.x[0], 0, order);
        return (27.0 * n / 32.0) / (r - n);
      });
    }
    case MetricKind::ChenTeo: {
      const double nu = g.param("nu");
      const double a1 = g.param("a1"), a3 = g.param("a3"), a0 = g.param("a0");
      const double x2 = g.param("x2"), cc = g.param("cc");
      return ScalarField([nu, a1, a3, a0, x2, cc](const ChartPoint& p, int order) {
        Jet x(0), y(0);
        if (p.chart == "xy") {
          x = Jet::variable(p.x[0], 0, order);
          y = Jet::variable(p.x[1], 1, order);
        } else {
          Jet r = Jet::variable(p.x[0], 0, order);
          Jet th = Jet::variable(p.x[1], 1, order);
          Jet half = th * 0.5;
          x = x2 + (cc / r) * half.cos() * half.cos();
          y = x2 - (cc / r) * half.sin() * half.sin();
        }
        Jet H = (nu * x + y) * ((nu * x - y) * (a1 - a3 * x * y) - 2 * (1 - nu) * a0);
        return (x - y) * (nu * x + y) * (a1 - a3 * x * y) * (-3.0 / (nu - 1.0)) / H;
      });
    }
    default:
      throw std::domain_error("no potential for this metric kind");
  }
}

}  // namespace

InstabilityVariation build_variation(MetricKind kind,
                                     const std::map<std::string, double>& params) {
  InstabilityVariation var;
  var.kind = kind;
  var.metric = make_catalog_metric(kind, params);
  var.f_hat = fhat_field(kind, var.metric);

  double kill_coef = 1.0;
  if (kind == MetricKind::TaubBolt) kill_coef = 1.0 / (2.0 * var.metric.param("n"));
  auto core = std::make_shared<VariationCore>(
      VariationCore{var.metric, var.f_hat, 2, kill_coef});

  var.K = OneFormField([core](const ChartPoint& p, int order) { return core->K_jets(p, order); });
  var.omega_plus = TwoFormField([core](const ChartPoint& p, int order) {
    JetMat omp, omm;
    core->omegas(p, order, &omp, &omm);
    return omp;
  });
  var.omega_minus = TwoFormField([core](const ChartPoint& p, int order) {
    JetMat omp, omm;
    core->omegas(p, order, &omp, &omm);
    return omm;
  });
  var.h = SymTwoTensorField(
      [core](const ChartPoint& p, int order) { return core->h_jets(p, order); });
  var.potential_G = potential_field(kind, var.metric);

  // c = lambda fhat^3 is constant for each metric (4m, 9n, 16 sqrt(kappa));
  // measure it from the curvature engine at a sample point.
  {
    const auto& dom = var.metric.domain(var.metric.default_chart());
    ChartPoint p{var.metric.default_chart(), {}};
    for (int i = 0; i < kDim; ++i) p.x[i] = 0.5 * (dom.sample_lo[i] + dom.sample_hi[i]);
    const double lam = weyl_plus_simple_eigenvalue(var.metric, p);
    const double f = var.f_hat.value(p);
    var.c_effective = lam * f * f * f;
  }

  // gauge ansatz primitive
  switch (kind) {
    case MetricKind::Schwarzschild:
    case MetricKind::Kerr: {
      const double m = var.metric.param("m"), a = var.metric.param("a");
      var.ansatz_primitive = ScalarField([m, a](const ChartPoint& p, int order) {
        Jet r = Jet::variable(p.x[0], 0, order);
        Jet th = Jet::variable(p.x[1], 1, order);
        return m * r + 2 * m * m * r.log() + a * m * th.cos();
      });
      break;
    }
    case MetricKind::TaubBolt: {
      const double n = var.metric.param("n");
      var.ansatz_primitive = ScalarField([n](const ChartPoint& p, int order) {
        Jet r = Jet::variable(p.x[0], 0, order);
        return (9.0 * n / 16.0) * r + (81.0 * n * n / 32.0) * r.log();
      });
      break;
    }
    case MetricKind::ChenTeo: {
      // fit c1, c2, c3 from the large-r expansion of G, and the 1/r^2 coefficient
      // of lap r, then c1' = (2/3) c1, c2' = (4/3) c2 - c1' d, c3' = -(2/3) c3.
      const MetricField& g = var.metric;
      const ScalarField& G = var.potential_G;
      std::vector<double> thetas = {0.5, 1.2, 1.9, 2.6};
      std::vector<double> radii;
      const double rbase = g.param("r_tent") * 40.0;
      for (int k = 0; k < 6; ++k) radii.push_back(rbase * std::pow(2.0, k));
      // c1: limit of r G (theta-independent)
      double c1 = 0;
      {
        std::vector<double> vals;
        for (double R : radii) vals.push_back(R * G.value(rt_point(g, R, 1.2, "rtheta")));
        c1 = richardson_ladder(radii, vals).limit;
      }
      // d_j = lim r^2 (G - c1/r) = c2 + c3 cos(theta_j)
      std::vector<double> dj;
      for (double th : thetas) {
        std::vector<double> vals;
        for (double R : radii)
          vals.push_back(R * R * (G.value(rt_point(g, R, th, "rtheta")) - c1 / R));
        dj.push_back(richardson_ladder(radii, vals).limit);
      }
      double sc = 0, scc = 0, sd = 0, sdc = 0;
      for (size_t j = 0; j < thetas.size(); ++j) {
        const double cth = std::cos(thetas[j]);
        sc += cth;
        scc += cth * cth;
        sd += dj[j];
        sdc += dj[j] * cth;
      }
      const double nth = double(thetas.size());
      const double c3 = (nth * sdc - sc * sd) / (nth * scc - sc * sc);
      const double c2 = (sd - c3 * sc) / nth;
      // dtil: lim r^2 (lap r - 2/r)
      double dtil = 0;
      {
        ScalarField rfield([](const ChartPoint& p, int order) {
          return Jet::variable(p.x[0], 0, order);
        });
        std::vector<double> vals;
        for (double R : radii) {
          const double lr = laplace_beltrami(g, rfield, rt_point(g, R, 1.2, "rtheta"));
          vals.push_back(R * R * (lr - 2.0 / R));
        }
        dtil = richardson_ladder(radii, vals).limit;
      }
      const double c1p = (2.0 / 3.0) * c1;
      const double c2p = (4.0 / 3.0) * c2 - c1p * dtil;
      const double c3p = -(2.0 / 3.0) * c3;
      var.ct_ansatz_constants = {c1p, c2p, c3p};
      const double x2 = g.param("x2"), cc = g.param("cc");
      var.ansatz_primitive = ScalarField([c1p, c2p, c3p, x2, cc](const ChartPoint& p, int order) {
        Jet r(0), costh(0);
        if (p.chart == "xy") {
          Jet x = Jet::variable(p.x[0], 0, order);
          Jet y = Jet::variable(p.x[1], 1, order);
          r = cc / (x - y);
          costh = (x + y - 2 * x2) / (x - y);
        } else {
          r = Jet::variable(p.x[0], 0, order);
          costh = Jet::variable(p.x[1], 1, order).cos();
        }
        return c1p * r + c2p * r.log() + c3p * costh;
      });
      break;
    }
    default:
      throw std::domain_error("instability variation exists for Kerr/Taub-Bolt/Chen-Teo only");
  }
  ScalarField prim = var.ansatz_primitive;
  var.ansatz = OneFormField([prim](const ChartPoint& p, int order) {
    Jet u = prim.jets(p, order + 1);
    JetVec out;
    for (int i = 0; i < kDim; ++i) out[i] = u.d(i);
    return out;
  });
  return var;
}

std::optional<ScalarField> closed_form_gauge_phi(MetricKind kind, const MetricField& g) {
  if (kind == MetricKind::Kerr || kind == MetricKind::Schwarzschild) {
    const double m = g.param("m");
    const double rm = g.param("r_minus");
    return ScalarField([m, rm](const ChartPoint& p, int order) {
      Jet r = Jet::variable(p.x[0], 0, order);
      if (rm == 0.0) return Jet::constant(0.0, order);
      return (1.0 - rm / r).log() * (2 * m * m);
    });
  }
  if (kind == MetricKind::TaubBolt) {
    const double n = g.param("n");
    return ScalarField([n](const ChartPoint& p, int order) {
      Jet r = Jet::variable(p.x[0], 0, order);
      return (r / (r - 0.5 * n)).log() * (-81.0 * n * n / 32.0);
    });
  }
  return std::nullopt;
}

namespace {

void assemble_h0(InstabilityVariation& var) {
  ScalarField prim = var.ansatz_primitive;
  ScalarField phi = var.phi;
  var.psi_total = ScalarField([prim, phi](const ChartPoint& p, int order) {
    return prim.jets(p, order) + phi.jets(p, order);
  });
  MetricField g = var.metric;
  ScalarField psi = var.psi_total;
  SymTwoTensorField h = var.h;
  var.h0 = SymTwoTensorField([g, psi, h](const ChartPoint& p, int order) {
    // h0 = h - (Hess psi - (lap psi / 4) g)
    JetMat hj = h.jets(p, order);
    auto mj = detail::metric_jets(g, p, order + 1);
    JetMat hess = hessian_jets(g, psi, p, order);
    Jet lap(order);
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) lap += mj.ginv[i][j].truncated(order) * hess[i][j];
    JetMat out;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        out[i][j] = hj[i][j] - (hess[i][j] - lap * mj.g[i][j].truncated(order) * 0.25);
    return out;
  });
  var.gauge_fixed = true;
}

}  // namespace

void gauge_fix_closed_form(InstabilityVariation& var) {
  auto phi = closed_form_gauge_phi(var.kind, var.metric);
  if (!phi) throw std::domain_error("no closed-form gauge correction for this metric");
  var.phi = *phi;
  assemble_h0(var);
}

void gauge_fix(InstabilityVariation& var, const GaugeSolveConfig& cfg) {
  const MetricField& g = var.metric;
  ScalarField G = var.potential_G;
  ScalarField prim = var.ansatz_primitive;
  auto source_at = [&](const ChartPoint& p) {
    return (4.0 / 3.0) * G.value(p) - laplace_beltrami(g, prim, p);
  };

  if (var.kind != MetricKind::ChenTeo) {
    // (r, theta) solve with degenerate inner edge (horizon/bolt) and axis parity
    const auto& dom = g.domain(g.default_chart());
    const double r0 = dom.lo[0] + 1.5 * dom.margin[0];
    const double th0 = dom.lo[1] + 1.5 * dom.margin[1];
    const double th1 = dom.hi[1] - 1.5 * dom.margin[1];
    EllipticProblem2D prob;
    prob.a0 = r0;
    prob.a1 = cfg.r_out;
    prob.b0 = th0;
    prob.b1 = th1;
    prob.na = cfg.n;
    prob.nb = cfg.ntheta;
    auto red = [&g](double r, double th, int which) {
      ChartPoint p = rt_point(g, r, th);
      auto mj = detail::metric_jets(g, p, 0);
      if (which == 0) return mj.sqrtg.value() * mj.ginv[0][0].value();
      if (which == 1) return mj.sqrtg.value() * mj.ginv[1][1].value();
      return mj.sqrtg.value();
    };
    prob.Pa = [red](double r, double th) { return red(r, th, 0); };
    prob.Pb = [red](double r, double th) { return red(r, th, 1); };
    prob.W = [red](double r, double th) { return red(r, th, 2); };
    prob.Q = [](double, double) { return 0.0; };
    prob.F = [&](double r, double th) { return source_at(rt_point(g, r, th)); };
    prob.bc_a0 = Bc{Bc::ZeroFlux, 0, 0};
    prob.bc_a1 = Bc{Bc::Robin, -1.0 / cfg.r_out, 0};
    prob.bc_b0 = Bc{Bc::ZeroFlux, 0, 0};
    prob.bc_b1 = Bc{Bc::ZeroFlux, 0, 0};
    auto sol = solve_elliptic2d(prob);
    var.gauge_solve_residual = sol.residual;
    GridFunction2D u = sol.u;
    var.phi = ScalarField([u](const ChartPoint& p, int order) {
      std::array<double, kJetSlots> parts{};
      const auto& T = JetTables::get();
      for (int s = 0; s < T.slots_at[order + 1]; ++s) {
        const auto& a = T.midx[s];
        if (a[2] != 0 || a[3] != 0) continue;
        parts[s] = u.eval(p.x[0], p.x[1], a[0], a[1]);
      }
      return Jet::from_partials(parts, order);
    });
  } else {
    // Chen-Teo: solve on the (x, y) rectangle; rod edges are natural zero-flux
    // degenerations, the corner-side truncation edges get homogeneous Dirichlet
    // (any harmonic contamination keeps h0 divergence-free and drops out of the
    // quadratures up to boundary terms).
    const double x1 = g.param("x1"), x2 = g.param("x2"), x3 = g.param("x3");
    const double wx = x3 - x2, wy = x2 - x1;
    const double dx = 0.004 * wx, dy = 0.004 * wy;
    EllipticProblem2D prob;
    prob.a0 = x2 + dx;
    prob.a1 = x3;
    prob.b0 = x1;
    prob.b1 = x2 - dy;
    prob.na = cfg.n;
    prob.nb = cfg.ntheta;
    auto red = [&g](double x, double y, int which) {
      ChartPoint p{"xy", {x, y, 0, 0}};
      auto mj = detail::metric_jets(g, p, 0);
      if (which == 0) return mj.sqrtg.value() * mj.ginv[0][0].value();
      if (which == 1) return mj.sqrtg.value() * mj.ginv[1][1].value();
      return mj.sqrtg.value();
    };
    prob.Pa = [red](double x, double y) { return red(x, y, 0); };
    prob.Pb = [red](double x, double y) { return red(x, y, 1); };
    prob.W = [red](double x, double y) { return red(x, y, 2); };
    prob.Q = [](double, double) { return 0.0; };
    prob.F = [&](double x, double y) { return source_at(ChartPoint{"xy", {x, y, 0, 0}}); };
    prob.bc_a0 = Bc{Bc::Dirichlet, 0, 0};  // corner-side truncation
    prob.bc_a1 = Bc{Bc::ZeroFlux, 0, 0};   // rod x = x3 (X -> 0 degenerate)
    prob.bc_b0 = Bc{Bc::ZeroFlux, 0, 0};   // rod y = x1
    prob.bc_b1 = Bc{Bc::Dirichlet, 0, 0};  // corner-side truncation
    // pack nodes toward the corner edges to resolve the 1/r structure
    const double ga0 = prob.a0, ga1 = prob.a1, gb0 = prob.b0, gb1 = prob.b1;
    prob.map_a = [ga0, ga1](double t) {
      return ga0 + (ga1 - ga0) * (std::exp(2.2 * t) - 1.0) / (std::exp(2.2) - 1.0);
    };
    prob.map_b = [gb0, gb1](double t) {
      return gb1 - (gb1 - gb0) * (std::exp(2.2 * (1 - t)) - 1.0) / (std::exp(2.2) - 1.0);
    };
    auto sol = solve_elliptic2d(prob);
    var.gauge_solve_residual = sol.residual;
    GridFunction2D u = sol.u;
    const double cc = g.param("cc");
    const double X2 = x2;
    var.phi = ScalarField([u, cc, X2](const ChartPoint& p, int order) {
      double X = p.x[0], Y = p.x[1];
      if (p.chart != "xy") {
        const double r = p.x[0], th = p.x[1];
        X = X2 + (cc / r) * std::cos(th / 2) * std::cos(th / 2);
        Y = X2 - (cc / r) * std::sin(th / 2) * std::sin(th / 2);
        // chart transport of jets is not needed: gauge quantities are evaluated
        // in the xy chart throughout
        (void)X;
        (void)Y;
        throw DomainError("phi is evaluated in the xy chart");
      }
      std::array<double, kJetSlots> parts{};
      const auto& T = JetTables::get();
      for (int s = 0; s < T.slots_at[order + 1]; ++s) {
        const auto& a = T.midx[s];
        if (a[2] != 0 || a[3] != 0) continue;
        parts[s] = u.eval(p.x[0], p.x[1], a[0], a[1]);
      }
      return Jet::from_partials(parts, order);
    });
  }
  assemble_h0(var);
}

double gauge_residual_weighted_sup(const InstabilityVariation& var, double r_lo, double r_hi,
                                   int nr, int ntheta) {
  if (!var.gauge_fixed) throw std::logic_error("gauge_fix first");
  const MetricField& g = var.metric;
  double sup = 0;
  auto eval_at = [&](const ChartPoint& p) {
    Vec4 dv = divergence_sym2(g, var.h0, p);
    auto mj = detail::metric_jets(g, p, 0);
    Mat4 ginv;
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) ginv[a][b] = mj.ginv[a][b].value();
    const double rho = g.rho(p);
    return std::pow(rho, 2.75) * pointwise_norm1(dv, ginv);
  };
  if (var.kind != MetricKind::ChenTeo) {
    const auto& dom = g.domain(g.default_chart());
    const double th0 = dom.lo[1] + 4 * dom.margin[1];
    const double th1 = dom.hi[1] - 4 * dom.margin[1];
    for (int i = 0; i < nr; ++i) {
      const double r = r_lo * std::pow(r_hi / r_lo, (i + 0.5) / nr);
      for (int j = 0; j < ntheta; ++j) {
        const double th = th0 + (th1 - th0) * (j + 0.5) / ntheta;
        sup = std::max(sup, eval_at(rt_point(g, r, th)));
      }
    }
  } else {
    const double x1 = g.param("x1"), x2 = g.param("x2"), x3 = g.param("x3");
    const double cc = g.param("cc");
    const double wx = x3 - x2, wy = x2 - x1;
    for (int i = 0; i < nr * ntheta; ++i) {
      // log-spaced in r along interleaved angles, mapped into the rectangle
      const double t = (i + 0.5) / (nr * ntheta);
      const double r = r_lo * std::pow(r_hi / r_lo, t);
      const double th = M_PI * (0.15 + 0.7 * std::fmod(7.3 * i, double(nr)) / nr);
      const double x = x2 + (cc / r) * std::cos(th / 2) * std::cos(th / 2);
      const double y = x2 - (cc / r) * std::sin(th / 2) * std::sin(th / 2);
      if (x <= x2 + 0.02 * wx || x >= x3 - 0.02 * wx) continue;
      if (y <= x1 + 0.02 * wy || y >= x2 - 0.02 * wy) continue;
      sup = std::max(sup, eval_at(ChartPoint{"xy", {x, y, 0, 0}}));
    }
  }
  return sup;
}

namespace {

/// Lichnerowicz of h0 without high derivatives of the solved phi:
/// Lich(h0) = Lich(h) - div0* d(lap psi) and lap psi = (4/3) G up to the solve
/// residual (exact for the closed-form corrections), so
/// Lich(h0) = Lich(h) - (4/3) (Hess G - (lap G / 4) g).
Mat4 lich_h0(const InstabilityVariation& var, const ChartPoint& p) {
  Mat4 L = lichnerowicz(var.metric, var.h, p);
  Mat4 HG = hessian(var.metric, var.potential_G, p);
  const double lapG = laplace_beltrami(var.metric, var.potential_G, p);
  Mat4 gv = var.metric.values(p);
  Mat4 out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      out[i][j] = L[i][j] - (4.0 / 3.0) * (HG[i][j] - 0.25 * lapG * gv[i][j]);
  return out;
}

}  // namespace

SecondVariationReport second_variation(const InstabilityVariation& var,
                                       const QuadratureConfig& qc) {
  if (!var.gauge_fixed) throw std::logic_error("gauge_fix first");
  SecondVariationReport rep;
  rep.c_effective = var.c_effective;
  const MetricField& g = var.metric;

  auto integrate_three = [&](double Rcut) {
    double Ihh = 0, IhH = 0, If3 = 0;
    auto add = [&](const ChartPoint& p, double wmeasure) {
      auto mj = detail::metric_jets(g, p, 0);
      Mat4 ginv;
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) ginv[a][b] = mj.ginv[a][b].value();
      Mat4 L = lich_h0(var, p);
      Mat4 h0v = var.h0.values(p);
      Mat4 hv = var.h.values(p);
      const double f = var.f_hat.value(p);
      Ihh += wmeasure * contract2(L, h0v, ginv);
      IhH += wmeasure * contract2(L, hv, ginv);
      If3 += wmeasure * contract2(hv, hv, ginv) / (f * f * f);
    };
    const double torus = g.frame().torus_measure * (g.z2_quotient_marker() ? 0.5 : 1.0);
    if (var.kind != MetricKind::ChenTeo) {
      const auto& dom = g.domain(g.default_chart());
      const double r0 = dom.lo[0] + 1.5 * dom.margin[0];
      const double th0 = dom.lo[1] + 1.5 * dom.margin[1];
      const double th1 = dom.hi[1] - 1.5 * dom.margin[1];
      GaussLegendre glr(12), glt(12);
      const int pr = std::max(2, qc.nr / 12), pt = std::max(1, qc.ntheta / 12);
      for (int cr = 0; cr < pr; ++cr) {
        const double ra = r0 + (Rcut - r0) * cr / pr, rb = r0 + (Rcut - r0) * (cr + 1) / pr;
        for (size_t ir = 0; ir < glr.x.size(); ++ir) {
          const double r = 0.5 * (ra + rb) + 0.5 * (rb - ra) * glr.x[ir];
          const double wr = 0.5 * (rb - ra) * glr.w[ir];
          for (int ct = 0; ct < pt; ++ct) {
            const double ta = th0 + (th1 - th0) * ct / pt, tb = th0 + (th1 - th0) * (ct + 1) / pt;
            for (size_t it = 0; it < glt.x.size(); ++it) {
              const double th = 0.5 * (ta + tb) + 0.5 * (tb - ta) * glt.x[it];
              const double wt = 0.5 * (tb - ta) * glt.w[it];
              ChartPoint p = rt_point(g, r, th);
              auto mj = detail::metric_jets(g, p, 0);
              add(p, torus * wr * wt * mj.sqrtg.value());
            }
          }
        }
      }
    } else {
      // whole (x, y) rectangle with the corner cut x - y >= cc / Rcut
      const double x1 = g.param("x1"), x2 = g.param("x2"), x3 = g.param("x3");
      const double cc = g.param("cc");
      const double wx = x3 - x2, wy = x2 - x1;
      const double xa = x2 + 0.005 * wx, xb = x3 - 0.005 * wx;
      GaussLegendre glx(12), gly(12);
      const int px = std::max(2, qc.nr / 12), py = std::max(2, qc.ntheta / 6);
      for (int cx = 0; cx < px; ++cx) {
        // grade toward the corner in x
        auto mapx = [&](double t) { return xa + (xb - xa) * (std::exp(2.0 * t) - 1.0) / (std::exp(2.0) - 1.0); };
        const double ta = double(cx) / px, tb = double(cx + 1) / px;
        for (size_t ix = 0; ix < glx.x.size(); ++ix) {
          const double t = 0.5 * (ta + tb) + 0.5 * (tb - ta) * glx.x[ix];
          const double x = mapx(t);
          const double dxdt = (mapx(tb) - mapx(ta)) / (tb - ta);
          const double wxq = 0.5 * (tb - ta) * glx.w[ix] * dxdt;
          const double ylo = x1 + 0.005 * wy;
          const double yhi = std::min(x2 - 0.005 * wy, x - cc / Rcut);
          if (yhi <= ylo) continue;
          for (int cy = 0; cy < py; ++cy) {
            const double ya = ylo + (yhi - ylo) * cy / py, yb = ylo + (yhi - ylo) * (cy + 1) / py;
            for (size_t iy = 0; iy < gly.x.size(); ++iy) {
              const double y = 0.5 * (ya + yb) + 0.5 * (yb - ya) * gly.x[iy];
              const double wyq = 0.5 * (yb - ya) * gly.w[iy];
              ChartPoint p{"xy", {x, y, 0, 0}};
              auto mj = detail::metric_jets(g, p, 0);
              add(p, torus * wxq * wyq * mj.sqrtg.value());
            }
          }
        }
      }
    }
    return std::array<double, 3>{0.5 * Ihh, 0.5 * IhH, 0.5 * var.c_effective * If3};
  };

  double Rmax = qc.r_max;
  if (Rmax == 0) Rmax = 140.0 * (g.has_param("m") ? g.param("m")
                                 : g.has_param("n") ? g.param("n")
                                                    : g.param("r_tent"));
  std::vector<double> rung_R, va, vb, vc;
  for (int k = qc.richardson_rungs - 1; k >= 0; --k) {
    const double R = Rmax / std::pow(std::sqrt(2.0), k);
    auto I = integrate_three(R);
    rung_R.push_back(R);
    va.push_back(I[0]);
    vb.push_back(I[1]);
    vc.push_back(I[2]);
  }
  auto ra = richardson_ladder(rung_R, va);
  auto rb = richardson_ladder(rung_R, vb);
  auto rc = richardson_ladder(rung_R, vc);
  rep.quad_hh = ra.limit;
  rep.quad_hH = rb.limit;
  rep.quad_f3 = rc.limit;
  rep.delta2 = rep.quad_hh;
  const double scale = std::max({std::abs(ra.limit), std::abs(rb.limit), std::abs(rc.limit)});
  rep.spread = (std::max({ra.limit, rb.limit, rc.limit}) -
                std::min({ra.limit, rb.limit, rc.limit})) / scale;

  // literal pointwise extraction of c from Lich h = c f^-3 h, reported as-is
  {
    double cmin = 1e300, cmax = -1e300;
    const int N = 10;
    for (int i = 0; i < N; ++i) {
      ChartPoint p;
      if (var.kind != MetricKind::ChenTeo) {
        const auto& dom = g.domain(g.default_chart());
        const double r = dom.sample_lo[0] + (dom.sample_hi[0] - dom.sample_lo[0]) * (i + 0.5) / N;
        const double th = 0.6 + 1.9 * ((i * 7) % N) / double(N);
        p = rt_point(g, r, th);
      } else {
        const auto& dom = g.domain("xy");
        p = ChartPoint{"xy",
                       {dom.sample_lo[0] + (dom.sample_hi[0] - dom.sample_lo[0]) * (i + 0.5) / N,
                        dom.sample_lo[1] + (dom.sample_hi[1] - dom.sample_lo[1]) *
                                               (((i * 3) % N) + 0.5) / N,
                        0, 0}};
      }
      Mat4 L = lichnerowicz(g, var.h, p);
      Mat4 hv = var.h.values(p);
      const double f3 = std::pow(var.f_hat.value(p), 3);
      double hmax = 0;
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) hmax = std::max(hmax, std::abs(hv[a][b]));
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) {
          if (std::abs(hv[a][b]) < 1e-5 * hmax) continue;
          const double c = L[a][b] * f3 / hv[a][b];
          cmin = std::min(cmin, c);
          cmax = std::max(cmax, c);
        }
    }
    rep.c_pointwise_min = cmin;
    rep.c_pointwise_max = cmax;
    rep.c_pointwise_spread = (cmax - cmin) / std::max(std::abs(cmax), std::abs(cmin));
  }
  return rep;
}

double first_variation(const MetricField& g, const MetricField& ref, const SymTwoTensorField& h,
                       const LambdaConfig& cfg) {
  WSolution w = solve_w(g, cfg.solve);
  ScalarField f = w.f_field;
  auto integrand = [&](const ChartPoint& p) {
    Mat4 ric = ricci_tensor(g, p);
    Mat4 hf = hessian(g, f, p);
    Mat4 ginv = invert(g.values(p));
    Mat4 hv = h.values(p);
    Mat4 ricf;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) ricf[i][j] = ric[i][j] + hf[i][j];
    return -contract2(ricf, hv, ginv) * std::exp(-f.value(p));
  };
  (void)ref;
  return reduced_integral(g, integrand, w.r_in, cfg.solve.r_out * 0.85, 200, 28);
}

RayReport lambda_alf_along_ray(const InstabilityVariation& var, const std::vector<double>& svals,
                               const LambdaConfig& cfg, double half_delta2) {
  if (!var.gauge_fixed) throw std::logic_error("gauge_fix first");
  RayReport rep;
  rep.half_delta2 = half_delta2;
  double num = 0, den = 0;
  for (double s : svals) {
    RayPoint pt;
    pt.s = s;
    if (s == 0.0) {
      pt.lambda = 0.0;
      pt.w_min = 1.0;
    } else {
      MetricField gs = perturb(var.metric, var.h0, s);
      LambdaResult lr = lambda_alf(gs, var.metric, cfg);
      pt.lambda = lr.lambda_alf;
      pt.w_min = lr.w_min;
    }
    rep.points.push_back(pt);
    if (s != 0.0) {
      num += pt.lambda * s * s;
      den += s * s * s * s;
    }
  }
  rep.quadratic_coefficient = den > 0 ? num / den : 0.0;
  return rep;
}

}  // namespace alflab
