#include "alflab/flow.hpp"

#include <cmath>
#include <future>

#include "alflab/spaces.hpp"

namespace alflab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Profiles with mirrored/frozen ghost nodes for stencil evaluation.
struct ExtendedProfiles {
  std::vector<double> z;
  std::array<std::vector<double>, 3> q;
};

ExtendedProfiles extend(const FlowState& s, int ghosts = 3) {
  ExtendedProfiles e;
  const int n = int(s.zeta.size());
  const double h = s.zeta[1] - s.zeta[0];
  for (int k = -ghosts; k < n + ghosts; ++k) e.z.push_back(s.zeta[0] + k * h);
  for (int c = 0; c < 3; ++c) {
    e.q[c].resize(e.z.size());
    for (int k = -ghosts; k < n + ghosts; ++k) {
      double v;
      if (k < 0) {
        if (s.ansatz == FlowAnsatz::TaubBoltU2) {
          v = s.q[c][-k - 1];  // even reflection through the bolt (zeta = 0)
        } else {
          // frozen difference at the inner truncation
          v = s.q_bg[c][0] + (s.q[c][0] - s.q_bg[c][0]);
          v = s.q[c][0];
        }
      } else if (k >= n) {
        // frozen difference at the outer truncation
        const int j = 2 * n - 1 - k;  // mirror index for background extension
        (void)j;
        v = s.q[c][n - 1] - s.q_bg[c][n - 1] + s.q_bg[c][n - 1];
        v = s.q[c][n - 1];
      } else {
        v = s.q[c][k];
      }
      e.q[c][k + ghosts] = v;
    }
  }
  return e;
}

MetricField profile_metric(FlowAnsatz ansatz, const std::array<GridFunction1D, 3>& qf,
                           double z_lo, double z_hi, double bg_param, double torus,
                           const GridFunction1D& r_of_zeta) {
  auto fn = [ansatz, qf](const ChartPoint& p, int order) {
    Jet th = Jet::variable(p.x[1], 1, order);
    std::array<Jet, 3> q;
    for (int c = 0; c < 3; ++c) {
      std::array<double, kJetSlots> parts{};
      const auto& T = JetTables::get();
      for (int s = 0; s < T.slots_at[order + 1]; ++s) {
        const auto& a = T.midx[s];
        bool pure = true;
        for (int k = 1; k < kDim; ++k)
          if (a[k] != 0) pure = false;
        parts[s] = pure ? qf[c].eval(p.x[0], a[0]) : 0.0;
      }
      q[c] = Jet::from_partials(parts, order);
    }
    JetMat g;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) g[i][j] = Jet::constant(0.0, order);
    Jet c = th.cos(), s = th.sin();
    g[0][0] = q[0];
    g[1][1] = q[1];
    if (ansatz == FlowAnsatz::TaubBoltU2) {
      g[2][2] = q[2];
      g[2][3] = q[2] * c;
      g[3][2] = g[2][3];
      g[3][3] = q[1] * s * s + q[2] * c * c;
    } else {
      g[2][2] = q[2];
      g[3][3] = q[1] * s * s;
    }
    return g;
  };
  ChartDomain dom;
  dom.lo = {z_lo, 0, 0, 0};
  dom.hi = {z_hi, M_PI, ansatz == FlowAnsatz::TaubBoltU2 ? 4 * M_PI : bg_param, 2 * M_PI};
  dom.margin = {1e-9, 1e-3, 0, 0};
  dom.periodic = {false, false, true, true};
  dom.sample_lo = {z_lo + 0.1 * (z_hi - z_lo), 0.15, 0, 0};
  dom.sample_hi = {z_hi - 0.1 * (z_hi - z_lo), M_PI - 0.15, 1, 1};
  dom.orientation = 1;
  std::map<std::string, ChartDomain> atlas{{"flow", dom}};
  MetricField mf("flow", fn, atlas, {}, ansatz == FlowAnsatz::TaubBoltU2 ? 8 * M_PI * bg_param
                                                                         : bg_param);
  AsymptoticFrame fr;
  fr.torus_measure = torus;
  mf.set_frame(fr);
  if (ansatz == FlowAnsatz::TaubBoltU2 && !r_of_zeta.empty()) {
    GridFunction1D rz = r_of_zeta;
    mf.set_rho_fn([rz](const ChartPoint& p, int order) {
      std::array<double, kJetSlots> parts{};
      const auto& T = JetTables::get();
      for (int s = 0; s < T.slots_at[order + 1]; ++s) {
        const auto& a = T.midx[s];
        bool pure = true;
        for (int k = 1; k < kDim; ++k)
          if (a[k] != 0) pure = false;
        parts[s] = pure ? rz.eval(p.x[0], a[0]) : 0.0;
      }
      Jet r = Jet::from_partials(parts, order);
      return (r * r + 2.25).sqrt();
    });
  }
  return mf;
}

std::array<GridFunction1D, 3> grid_functions(const FlowState& s) {
  ExtendedProfiles e = extend(s);
  return {GridFunction1D(e.z, e.q[0]), GridFunction1D(e.z, e.q[1]),
          GridFunction1D(e.z, e.q[2])};
}

std::array<GridFunction1D, 3> grid_functions_bg(const FlowState& s) {
  FlowState b = s;
  b.q = s.q_bg;
  return grid_functions(b);
}

}  // namespace

MetricField state_metric(const FlowState& s) {
  return profile_metric(s.ansatz, grid_functions(s), s.zeta.front() - 1e-8,
                        s.zeta.back() + 1e-8, s.bg_param, s.torus_measure, s.r_of_zeta);
}

MetricField background_metric(const FlowState& s) {
  return profile_metric(s.ansatz, grid_functions_bg(s), s.zeta.front() - 1e-8,
                        s.zeta.back() + 1e-8, s.bg_param, s.torus_measure, s.r_of_zeta);
}

FlowState make_taub_bolt_flow_state(const InstabilityVariation& var, double sval, int n_nodes,
                                    double zeta_max) {
  if (var.kind != MetricKind::TaubBolt)
    throw std::domain_error("Taub-Bolt flow state needs the Taub-Bolt variation");
  const double n = var.metric.param("n");
  const double mtb = 1.25 * n;
  FlowState st;
  st.ansatz = FlowAnsatz::TaubBoltU2;
  st.bg_param = n;
  st.torus_measure = var.metric.frame().torus_measure;

  // proper distance from the bolt: dz = sqrt(rho2 / Psi) dr, integrable via r = 2n + u^2
  auto dz_du = [n, mtb](double u) {
    const double r = 2 * n + u * u;
    const double rho2 = r * r - n * n;
    const double rmhalf = r - 0.5 * n;  // Psi = (r - 2n)(r - n/2)
    return 2.0 * std::sqrt(rho2 / rmhalf);
  };
  // build r(z) on a fine table
  const int M = 4000;
  std::vector<double> ztab(M + 1), rtab(M + 1);
  ztab[0] = 0;
  rtab[0] = 2 * n;
  const double u_max = std::sqrt(8.0 * zeta_max);  // generous range, truncated later
  double acc = 0;
  for (int i = 1; i <= M; ++i) {
    const double u0 = u_max * (i - 1) / M, u1 = u_max * i / M;
    acc += integrate_gl([&](double u) { return dz_du(u); }, u0, u1, 1, 8);
    ztab[i] = acc;
    rtab[i] = 2 * n + u1 * u1;
  }
  GridFunction1D r_of_z(ztab, rtab);
  st.r_of_zeta = r_of_z;

  const double h = zeta_max / n_nodes;
  for (int i = 0; i < n_nodes; ++i) st.zeta.push_back((i + 0.5) * h);

  MetricField gtb = var.metric;
  SymTwoTensorField h0 = var.h0;
  for (int c = 0; c < 3; ++c) {
    st.q[c].resize(n_nodes);
    st.q_bg[c].resize(n_nodes);
  }
  for (int i = 0; i < n_nodes; ++i) {
    const double z = st.zeta[i];
    const double r = r_of_z.eval(z);
    const double drdz = r_of_z.eval(z, 1);
    ChartPoint p{"tb", {r, 1.1, 0, 0}};
    Mat4 gv = gtb.values(p);
    Mat4 hv = var.gauge_fixed ? h0.values(p) : Mat4{};
    // background (q1 = 1 in the proper-distance gauge)
    st.q_bg[0][i] = 1.0;
    st.q_bg[1][i] = gv[1][1];
    st.q_bg[2][i] = gv[2][2];
    st.q[0][i] = 1.0 + sval * hv[0][0] * drdz * drdz;
    st.q[1][i] = gv[1][1] + sval * hv[1][1];
    st.q[2][i] = gv[2][2] + sval * hv[2][2];
  }
  return st;
}

FlowState make_flat_flow_state(double L, const std::function<double(double)>& q1,
                               const std::function<double(double)>& q2,
                               const std::function<double(double)>& q3, int n_nodes, double r_in,
                               double r_out) {
  FlowState st;
  st.ansatz = FlowAnsatz::FlatFiber;
  st.bg_param = L;
  st.torus_measure = L * 2 * M_PI;
  const double h = (r_out - r_in) / n_nodes;
  for (int i = 0; i < n_nodes; ++i) st.zeta.push_back(r_in + (i + 0.5) * h);
  for (int c = 0; c < 3; ++c) {
    st.q[c].resize(n_nodes);
    st.q_bg[c].resize(n_nodes);
  }
  for (int i = 0; i < n_nodes; ++i) {
    const double r = st.zeta[i];
    st.q[0][i] = q1(r);
    st.q[1][i] = q2(r);
    st.q[2][i] = q3(r);
    st.q_bg[0][i] = 1.0;
    st.q_bg[1][i] = r * r;
    st.q_bg[2][i] = 1.0;
  }
  return st;
}

Mat4 deturck_rhs_at(const MetricField& g, const MetricField& background, const ChartPoint& p) {
  auto mj = detail::metric_jets(g, p, 2);
  auto ch = detail::christoffel_jets(mj);
  auto mjb = detail::metric_jets(background, p, 2);
  auto chb = detail::christoffel_jets(mjb);
  Mat4 ric = ricci_tensor(g, p);
  // W^k = g^{pq}(Gamma^k_pq - Gammabar^k_pq), as order-1 jets
  JetVec W;
  for (int k = 0; k < kDim; ++k) {
    Jet s(1);
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b)
        s += mj.ginv[a][b].truncated(1) *
             (ch.G[k][a][b].truncated(1) - chb.G[k][a][b].truncated(1));
    W[k] = s;
  }
  // lower with g, then Lie_W g = nabla_i W_j + nabla_j W_i
  JetVec Wl;
  for (int i = 0; i < kDim; ++i) {
    Jet s(1);
    for (int k = 0; k < kDim; ++k) s += mj.g[i][k].truncated(1) * W[k];
    Wl[i] = s;
  }
  Mat4 out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double di = Wl[j].d(i).value();
      double dj = Wl[i].d(j).value();
      for (int k = 0; k < kDim; ++k) {
        di -= ch.G[k][i][j].value() * Wl[k].value();
        dj -= ch.G[k][j][i].value() * Wl[k].value();
      }
      out[i][j] = -2.0 * ric[i][j] + di + dj;
    }
  return out;
}

RhsResult deturck_rhs(const FlowState& s) {
  const int n = int(s.zeta.size());
  RhsResult res;
  for (int c = 0; c < 3; ++c) res.dq[c].assign(n, 0.0);
  MetricField g = state_metric(s);
  MetricField bg = background_metric(s);
  const double th_s = 1.1;
  double worst = 0;
  for (int i = 0; i < n; ++i) {
    ChartPoint p{"flow", {s.zeta[i], th_s, 0, 0}};
    Mat4 R = deturck_rhs_at(g, bg, p);
    const double a1 = R[0][0], a2 = R[1][1], a3 = R[2][2];
    res.dq[0][i] = a1;
    res.dq[1][i] = a2;
    res.dq[2][i] = a3;
    // ansatz-span check: R must equal a1 dz^2 + a2 (s1^2+s2^2) + a3 s3^2
    const double cth = std::cos(th_s), sth = std::sin(th_s);
    double scale = std::max({std::abs(a1), std::abs(a2), std::abs(a3), 1e-14});
    double viol = 0;
    if (s.ansatz == FlowAnsatz::TaubBoltU2) {
      viol = std::max(std::abs(R[2][3] - a3 * cth),
                      std::abs(R[3][3] - (a2 * sth * sth + a3 * cth * cth)));
    } else {
      viol = std::max(std::abs(R[2][3]), std::abs(R[3][3] - a2 * sth * sth));
    }
    for (int a = 0; a < kDim; ++a)
      for (int b = a + 1; b < kDim; ++b)
        if (!(a == 2 && b == 3)) viol = std::max(viol, std::abs(R[a][b]));
    worst = std::max(worst, viol / scale);
  }
  res.ansatz_residual = worst;
  const double h = s.zeta[1] - s.zeta[0];
  double invq1_max = 0;
  for (int i = 0; i < n; ++i) invq1_max = std::max(invq1_max, 1.0 / s.q[0][i]);
  res.cfl_dt = 0.2 * h * h / invq1_max;
  return res;
}

FlowState step(const FlowState& s, double dt) {
  RhsResult k1 = deturck_rhs(s);
  if (dt > k1.cfl_dt)
    throw std::runtime_error("CFL violation: dt " + std::to_string(dt) + " exceeds bound " +
                             std::to_string(k1.cfl_dt));
  FlowState mid = s;
  const int n = int(s.zeta.size());
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < n; ++i) mid.q[c][i] += 0.5 * dt * k1.dq[c][i];
  RhsResult k2 = deturck_rhs(mid);
  FlowState out = s;
  out.t = s.t + dt;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < n; ++i) out.q[c][i] += dt * k2.dq[c][i];
  // outer frozen difference: pin the outermost nodes to the initial tail
  for (int c = 0; c < 3; ++c)
    for (int i = std::max(0, n - 2); i < n; ++i) out.q[c][i] = s.q[c][i];
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < n; ++i)
      if (!(out.q[c][i] > 0.0) && !(s.ansatz == FlowAnsatz::TaubBoltU2 && i == 0))
        throw std::runtime_error("positivity loss in flow profile q" + std::to_string(c + 1));
  out.cfl_history.push_back(dt / k1.cfl_dt);
  return out;
}

namespace {

MonitorSample monitor(const FlowState& s, const FlowConfig& cfg, double mass_R) {
  MonitorSample out;
  out.t = s.t;
  MetricField g = state_metric(s);
  MetricField bg = background_metric(s);
  if (cfg.monitor_mass) out.mass = boundary_mass_integral(g, bg, mass_R, 24);
  if (cfg.monitor_lambda) {
    LambdaConfig lc = cfg.lambda_cfg;
    if (lc.solve.r_out == 0 || lc.solve.r_out > s.zeta.back())
      lc.solve.r_out = s.zeta.back() * 0.9;
    LambdaResult lr = lambda_alf(g, bg, lc);
    out.lambda_alf = lr.lambda_alf;
  }
  // decay order of g - g_RF along the grid
  {
    std::vector<double> radii;
    const double zlo = s.zeta.front() + 0.3 * (s.zeta.back() - s.zeta.front());
    const double zhi = s.zeta.back() * 0.95;
    for (int k = 0; k < 5; ++k) radii.push_back(zlo * std::pow(zhi / zlo, k / 4.0));
    bool ok = radii.back() / radii.front() >= 10.0;
    if (ok) {
      auto fit = decay_order_fit_metric_diff(g, bg, radii, 6);
      out.decay_order = fit.vanishes ? 99.0 : fit.estimated_order;
    } else {
      // short grids: slope from the two end radii
      auto sup_at = [&](double R) {
        ChartPoint p{"flow", {R, 1.1, 0, 0}};
        Mat4 d{};
        Mat4 a = g.values(p), b = bg.values(p);
        for (int i = 0; i < kDim; ++i)
          for (int j = 0; j < kDim; ++j) d[i][j] = a[i][j] - b[i][j];
        return pointwise_norm2(d, invert(b)) + 1e-300;
      };
      out.decay_order = -std::log(sup_at(zhi) / sup_at(zlo)) / std::log(zhi / zlo);
    }
  }
  {
    double sup = 0;
    for (size_t i = 0; i < s.zeta.size(); ++i)
      for (int c = 0; c < 3; ++c)
        sup = std::max(sup, std::abs(s.q[c][i] - s.q_bg[c][i]) /
                                std::max(1.0, std::abs(s.q_bg[c][i])));
    out.distance_sup = sup;
  }
  return out;
}

}  // namespace

MonitorReport run_flow(FlowState s, const FlowConfig& cfg) {
  MonitorReport rep;
  double dt = cfg.dt;
  {
    RhsResult r0 = deturck_rhs(s);
    if (dt == 0) dt = 0.8 * r0.cfl_dt;
    if (dt > r0.cfl_dt) throw std::runtime_error("requested dt violates the CFL bound");
  }
  double mass_R = cfg.mass_radius;
  if (mass_R == 0) mass_R = s.zeta.front() + 0.7 * (s.zeta.back() - s.zeta.front());

  std::vector<std::future<MonitorSample>> pending;
  auto snapshot_monitor = [&](const FlowState& snap) {
    // monitors run concurrently with the next steps on a snapshot copy
    pending.push_back(std::async(std::launch::async,
                                 [snap, &cfg, mass_R]() { return monitor(snap, cfg, mass_R); }));
  };

  snapshot_monitor(s);
  int k = 0;
  while (s.t < cfg.T - 1e-12) {
    const double step_dt = std::min(dt, cfg.T - s.t);
    s = step(s, step_dt);
    ++k;
    if (k % cfg.monitor_stride == 0 || s.t >= cfg.T - 1e-12) snapshot_monitor(s);
  }
  for (auto& f : pending) rep.series.push_back(f.get());

  rep.lambda_min_increment = kInf;
  double mass0 = rep.series.front().mass;
  double decay0 = rep.series.front().decay_order;
  rep.min_distance = kInf;
  for (size_t i = 0; i < rep.series.size(); ++i) {
    const auto& m = rep.series[i];
    if (i > 0)
      rep.lambda_min_increment =
          std::min(rep.lambda_min_increment, m.lambda_alf - rep.series[i - 1].lambda_alf);
    rep.mass_drift = std::max(rep.mass_drift,
                              std::abs(m.mass - mass0) /
                                  std::max(std::abs(mass0), 1e-12));
    rep.decay_drift = std::max(rep.decay_drift, decay0 - m.decay_order);
    rep.min_distance = std::min(rep.min_distance, m.distance_sup);
  }
  if (rep.series.size() < 2) rep.lambda_min_increment = 0;
  return rep;
}

}  // namespace alflab
