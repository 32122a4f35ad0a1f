#include "runner.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "alflab/catalog.hpp"
#include "alflab/rng.hpp"
#include "alflab/flow.hpp"
#include "alflab/spaces.hpp"
#include "alflab/variation.hpp"
#include "alflab/version.hpp"

namespace alflab::cli {

using json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["subcommand"] = c.subcommand;
  j["metric"] = {{"kind", c.metric_kind}};
  for (auto& [k, v] : c.metric_params) j["metric"][k] = v;
  j["reference"] = {{"kind", c.reference}, {"L", c.reference_L}};
  j["numeric"] = {{"grid", c.grid},   {"ntheta", c.ntheta}, {"r_out", c.r_out},
                  {"tol", c.tol},     {"tau", c.tau},       {"k", c.k},
                  {"alpha", c.alpha}, {"s", c.s},           {"T", c.T},
                  {"dt", c.dt},       {"jobs", c.jobs},     {"ray", c.ray},
                  {"r", c.point_r},   {"theta", c.point_theta}};
  j["numeric"]["radii"] = c.radii;
  j["numeric"]["s_values"] = c.s_values;
  j["output"] = {{"prefix", c.output_prefix}, {"seed", c.seed}};
  return j;
}

json report_shell(const ExperimentConfig& c) {
  json j;
  j["tool"] = {{"name", "alflab"}, {"version", kVersion}};
  j["config"] = config_json(c);
  return j;
}

void write_json(const ExperimentConfig& c, const json& j) {
  std::ofstream out(c.output_prefix + ".json");
  out << j.dump(2) << "\n";
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << fmt(r[i]);
    out << "\n";
  }
}

std::vector<double> default_radii(double r_out) {
  std::vector<double> radii;
  const double q = std::sqrt(2.0);
  double R = 0.85 * r_out / std::pow(q, 5);
  for (int i = 0; i <= 5; ++i) {
    radii.push_back(R);
    R *= q;
  }
  return radii;
}

MetricField build_metric(const ExperimentConfig& c) {
  auto kind = metric_kind_from_string(c.metric_kind);
  if (!kind) {
    std::string names;
    for (MetricKind k : {MetricKind::FlatR3xS1, MetricKind::FlatQuotientZ2Marker,
                         MetricKind::ModelFibered, MetricKind::Schwarzschild, MetricKind::Kerr,
                         MetricKind::TaubBolt, MetricKind::ChenTeo})
      names += (names.empty() ? "" : ", ") + to_string(k);
    throw std::invalid_argument("unknown metric '" + c.metric_kind + "'; known: " + names);
  }
  // conformal flat test families are addressable through flat-r3xs1 + A, sigma
  if (*kind == MetricKind::FlatR3xS1 && c.metric_params.count("A")) {
    const double L = c.metric_params.count("L") ? c.metric_params.at("L") : 2 * M_PI;
    const double A = c.metric_params.at("A");
    if (c.metric_params.count("sigma"))
      return conformal_flat_family(L, A, c.metric_params.at("sigma"));
    return harmonic_conformal_flat(L, A);
  }
  return make_catalog_metric(*kind, c.metric_params);
}

MetricField build_reference(const ExperimentConfig& c, const MetricField& g) {
  if (c.reference == "self") return g;
  if (c.reference == "flat") {
    MetricField f = make_flat_r3xs1(c.reference_L > 0 ? c.reference_L : g.fiber_length());
    return f;
  }
  auto kind = metric_kind_from_string(c.metric_kind);
  return model_metric_of(g, kind.value_or(MetricKind::FlatR3xS1));
}

ChartPoint default_point(const ExperimentConfig& c, const MetricField& g) {
  const auto& dom = g.domain(g.default_chart());
  ChartPoint p{g.default_chart(), {}};
  for (int i = 0; i < kDim; ++i) p.x[i] = 0.5 * (dom.sample_lo[i] + dom.sample_hi[i]);
  if (c.point_r > 0) p.x[g.frame().radial_axis] = c.point_r;
  if (c.point_theta > 0) p.x[g.frame().polar_axis] = c.point_theta;
  return p;
}

int run_catalog(const ExperimentConfig& c, std::ostream& log) {
  json j = report_shell(c);
  MetricField g = build_metric(c);
  json entry;
  entry["kind"] = c.metric_kind;
  for (auto& [k, v] : g.params()) entry[k] = v;
  entry["fiber_length"] = g.fiber_length();
  entry["positivity_floor"] = positivity_floor(g);
  double ric_sup = 0;
  Pcg32 rng(c.seed);
  const auto& dom = g.domain(g.default_chart());
  for (int i = 0; i < 20; ++i) {
    ChartPoint p{g.default_chart(), {}};
    for (int k = 0; k < kDim; ++k)
      p.x[k] = dom.sample_lo[k] + rng.uniform() * (dom.sample_hi[k] - dom.sample_lo[k]);
    Mat4 ric = ricci_tensor(g, p);
    Mat4 ginv = invert(g.values(p));
    ric_sup = std::max(ric_sup, pointwise_norm2(ric, ginv));
  }
  entry["ricci_sup_sample"] = ric_sup;
  entry["weyl_plus_simple_at_sample"] = weyl_plus_simple_eigenvalue(g, default_point(c, g));
  j["result"] = entry;
  write_json(c, j);
  log << j.dump(2) << "\n";
  return 0;
}

int run_curvature(const ExperimentConfig& c, std::ostream& log) {
  json j = report_shell(c);
  MetricField g = build_metric(c);
  ChartPoint p = default_point(c, g);
  CurvatureBundle b = curvature_at(g, p);
  json r;
  r["chart"] = p.chart;
  r["point"] = {p.x[0], p.x[1], p.x[2], p.x[3]};
  r["scalar"] = b.scalar;
  json ric = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int k = 0; k < 4; ++k) row.push_back(b.ricci[i][k]);
    ric.push_back(row);
  }
  r["ricci"] = ric;
  r["weyl_plus_eigenvalues"] = b.weyl_plus_eigenvalues;
  r["weyl_plus_simple"] = b.weyl_plus_simple;
  json chr = json::array();
  for (int k = 0; k < 4; ++k)
    for (int a = 0; a < 4; ++a)
      for (int bb = a; bb < 4; ++bb)
        if (std::abs(b.christoffel[k][a][bb]) > 1e-14)
          chr.push_back({{"k", k}, {"i", a}, {"j", bb}, {"value", b.christoffel[k][a][bb]}});
  r["christoffel_nonzero"] = chr;
  r["bianchi_contracted_residual"] = contracted_bianchi_residual(g, p);
  j["result"] = r;
  write_json(c, j);
  log << j.dump(2) << "\n";
  return 0;
}

int run_spaces(const ExperimentConfig& c, std::ostream& log) {
  json j = report_shell(c);
  MetricField g = build_metric(c);
  MetricField ref = build_reference(c, g);
  json r;
  r["exceptional"] = json::array();
  for (int m = 3; m <= 8; ++m)
    r["exceptional"].push_back({{"m", m},
                                {"set", exceptional_values(m)},
                                {"tau", c.tau},
                                {"is_exceptional", is_exceptional(c.tau, m)}});
  json hd = json::array();
  for (int k = 0; k <= 5; ++k) hd.push_back(harmonic_poly_dim(3, k));
  r["harmonic_poly_dim_m3"] = hd;
  SymTwoTensorField diff([g, ref](const ChartPoint& p, int order) {
    JetMat a = g.components(p, order);
    JetMat b = ref.components(p, order);
    for (int i = 0; i < kDim; ++i)
      for (int q = 0; q < kDim; ++q) a[i][q] -= b[i][q];
    return a;
  });
  SamplerConfig sc;
  sc.seed = c.seed;
  auto est = weighted_holder_norm(diff, g, c.tau, std::min(c.k, 1), c.alpha, sc);
  r["weighted_norm"] = {{"tau", est.tau},
                        {"k", est.k},
                        {"alpha", est.alpha},
                        {"sup", est.sup_value},
                        {"samples", est.sample_count},
                        {"argmax_r", est.argmax_point.x[0]}};
  std::vector<double> radii = c.radii.empty() ? default_radii(c.r_out) : c.radii;
  if (radii.back() / radii.front() < 10.0) {
    double base = radii.front();
    radii = {base, base * 2.3, base * 5.2, base * 11.0};
  }
  auto fit = decay_order_fit_metric_diff(g, ref, radii);
  r["decay_fit"] = {{"order", fit.estimated_order},
                    {"residual", fit.fit_residual},
                    {"vanishes", fit.vanishes}};
  auto hardy = hardy_constant_estimate(g, radii.front(), radii.back(), c.grid);
  r["hardy"] = {{"value", hardy.value}, {"error", hardy.error_estimate}};
  j["result"] = r;
  write_json(c, j);
  log << j.dump(2) << "\n";
  return 0;
}

int run_mass(const ExperimentConfig& c, std::ostream& log) {
  json j = report_shell(c);
  MetricField g = build_metric(c);
  MetricField ref = build_reference(c, g);
  std::vector<double> radii = c.radii.empty() ? default_radii(c.r_out) : c.radii;
  MassEstimate est = relative_mass(g, ref, radii, c.ntheta);
  json r;
  r["radii"] = est.radii;
  r["boundary_integrals"] = est.boundary_integrals;
  r["extrapolated"] = est.extrapolated;
  r["error_estimate"] = est.error_estimate;
  r["fitted_exponent"] = est.fitted_exponent;
  r["divergent"] = est.divergent;
  j["result"] = r;
  write_json(c, j);
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < est.radii.size(); ++i)
    rows.push_back({est.radii[i], est.boundary_integrals[i]});
  write_csv(c.output_prefix + "_ladder.csv", {"R", "flux_integral"}, rows);
  log << j.dump(2) << "\n";
  return est.divergent ? 2 : 0;
}

int run_lambda(const ExperimentConfig& c, std::ostream& log) {
  json j = report_shell(c);
  MetricField g = build_metric(c);
  MetricField ref = build_reference(c, g);
  LambdaConfig lc;
  lc.solve.n = c.grid;
  lc.solve.ntheta = c.ntheta;
  lc.solve.r_out = c.r_out;
  lc.solve.tol = c.tol;
  lc.radii = c.radii;
  lc.ntheta = c.ntheta;
  LambdaResult lr = lambda_alf(g, ref, lc);
  json r;
  r["lambda_alf"] = lr.lambda_alf;
  r["lambda_alf_combined"] = lr.lambda_alf_combined;
  r["combined_error"] = lr.combined_error;
  r["lambda_circ"] = lr.lambda_circ;
  r["lambda_circ_cross_check"] = lr.lambda_circ_detail.cross_check;
  r["relative_mass"] = lr.relative_mass.extrapolated;
  r["mass_error"] = lr.relative_mass.error_estimate;
  r["mass_divergent"] = lr.relative_mass.divergent;
  r["w_min"] = lr.w_min;
  r["pde_residual"] = lr.pde_residual;
  j["result"] = r;
  write_json(c, j);
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < lr.relative_mass.radii.size(); ++i)
    rows.push_back({lr.relative_mass.radii[i], lr.relative_mass.boundary_integrals[i]});
  write_csv(c.output_prefix + "_ladder.csv", {"R", "mass_flux"}, rows);
  log << j.dump(2) << "\n";
  const bool ok = lr.w_min > 0 && std::isfinite(lr.lambda_alf);
  return ok ? 0 : 2;
}

int run_instability(const ExperimentConfig& c, std::ostream& log) {
  json j = report_shell(c);
  auto kind = metric_kind_from_string(c.metric_kind);
  if (!kind || (*kind != MetricKind::Kerr && *kind != MetricKind::TaubBolt &&
                *kind != MetricKind::ChenTeo && *kind != MetricKind::Schwarzschild))
    throw std::invalid_argument("instability needs kerr, taub-bolt or chen-teo");
  InstabilityVariation var = build_variation(*kind, c.metric_params);
  GaugeSolveConfig gc;
  gc.n = std::min(c.grid, 400);
  gc.ntheta = std::min(c.ntheta * 2, 160);
  gc.r_out = c.r_out;
  gauge_fix(var, gc);
  const auto& dom = var.metric.domain(var.metric.default_chart());
  const double rlo = dom.sample_lo[0];
  double rhi = c.r_out * 0.5;
  if (*kind == MetricKind::ChenTeo) rhi = var.metric.param("r_tent") * 20;
  const double resid = gauge_residual_weighted_sup(var, rlo, rhi);
  QuadratureConfig qc;
  qc.r_max = c.r_out * 0.9;
  if (*kind == MetricKind::ChenTeo) qc.r_max = var.metric.param("r_tent") * 30;
  SecondVariationReport sv = second_variation(var, qc);
  json r;
  r["delta2"] = sv.delta2;
  r["three_way"] = {sv.quad_hh, sv.quad_hH, sv.quad_f3};
  r["three_way_spread"] = sv.spread;
  r["c_effective"] = sv.c_effective;
  r["c_pointwise"] = {{"min", sv.c_pointwise_min},
                      {"max", sv.c_pointwise_max},
                      {"spread", sv.c_pointwise_spread}};
  r["gauge_residual_weighted_sup"] = resid;
  r["gauge_solve_residual"] = var.gauge_solve_residual;
  r["unstable"] = sv.delta2 > 0;
  if (c.ray && *kind == MetricKind::TaubBolt) {
    LambdaConfig lc;
    lc.solve.n = c.grid;
    lc.solve.r_out = c.r_out;
    std::vector<double> svals = c.s_values;
    if (svals.empty()) svals = {-c.s, 0.0, c.s};
    RayReport ray = lambda_alf_along_ray(var, svals, lc, 0.5 * sv.delta2);
    json pts = json::array();
    std::vector<std::vector<double>> rows;
    for (auto& p : ray.points) {
      pts.push_back({{"s", p.s}, {"lambda", p.lambda}, {"w_min", p.w_min}});
      rows.push_back({p.s, p.lambda, p.w_min});
    }
    r["ray"] = {{"points", pts},
                {"quadratic_coefficient", ray.quadratic_coefficient},
                {"half_delta2", ray.half_delta2}};
    write_csv(c.output_prefix + "_ray.csv", {"s", "lambda_alf", "w_min"}, rows);
  }
  j["result"] = r;
  write_json(c, j);
  log << j.dump(2) << "\n";
  return sv.delta2 > 0 ? 0 : 2;
}

int run_flow(const ExperimentConfig& c, std::ostream& log) {
  json j = report_shell(c);
  auto kind = metric_kind_from_string(c.metric_kind);
  FlowState st;
  if (kind && *kind == MetricKind::TaubBolt) {
    InstabilityVariation var = build_variation(MetricKind::TaubBolt, c.metric_params);
    gauge_fix_closed_form(var);
    st = make_taub_bolt_flow_state(var, c.s, c.grid, c.r_out);
  } else if (kind && (*kind == MetricKind::FlatR3xS1)) {
    const double L = c.metric_params.count("L") ? c.metric_params.at("L") : 2 * M_PI;
    const double A = c.metric_params.count("A") ? c.metric_params.at("A") : 0.05;
    MetricField m = harmonic_conformal_flat(L, A);
    auto q = [m](double r, int which) {
      ChartPoint p{"polar", {r, M_PI / 2, 0, 0}};
      Mat4 v = m.values(p);
      return which == 0 ? v[0][0] : which == 1 ? v[1][1] : v[2][2];
    };
    st = make_flat_flow_state(
        L, [q](double r) { return q(r, 0); }, [q](double r) { return q(r, 1); },
        [q](double r) { return q(r, 2); }, c.grid, 2.0, c.r_out);
  } else {
    throw std::invalid_argument("flow supports taub-bolt and flat-r3xs1 initial data");
  }
  FlowConfig fc;
  fc.T = c.T;
  fc.dt = c.dt;
  fc.lambda_cfg.solve.n = 220;
  MonitorReport rep = run_flow(st, fc);
  json r;
  r["samples"] = rep.series.size();
  r["lambda_min_increment"] = rep.lambda_min_increment;
  r["mass_drift"] = rep.mass_drift;
  r["decay_drift"] = rep.decay_drift;
  r["min_distance"] = rep.min_distance;
  j["result"] = r;
  write_json(c, j);
  std::vector<std::vector<double>> rows;
  for (auto& mrow : rep.series)
    rows.push_back({mrow.t, mrow.lambda_alf, mrow.mass, mrow.decay_order, mrow.distance_sup});
  write_csv(c.output_prefix + "_series.csv",
            {"t", "lambda_alf", "mass", "decay_order", "distance_sup"}, rows);
  // version-tagged flat binary snapshot of the final state
  {
    std::ofstream snap(c.output_prefix + ".alfsnap", std::ios::binary);
    const char magic[8] = {'A', 'L', 'F', 'S', 'N', 'A', 'P', '1'};
    snap.write(magic, 8);
    std::uint32_t counts[2] = {std::uint32_t(st.zeta.size()), 3};
    snap.write(reinterpret_cast<const char*>(counts), sizeof counts);
    snap.write(reinterpret_cast<const char*>(st.zeta.data()),
               std::streamsize(st.zeta.size() * sizeof(double)));
  }
  log << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int run(const ExperimentConfig& cfg, std::ostream& log) {
  try {
    if (cfg.subcommand == "catalog") return run_catalog(cfg, log);
    if (cfg.subcommand == "curvature") return run_curvature(cfg, log);
    if (cfg.subcommand == "spaces") return run_spaces(cfg, log);
    if (cfg.subcommand == "mass") return run_mass(cfg, log);
    if (cfg.subcommand == "lambda") return run_lambda(cfg, log);
    if (cfg.subcommand == "instability") return run_instability(cfg, log);
    if (cfg.subcommand == "flow") return run_flow(cfg, log);
    log << "unknown subcommand '" << cfg.subcommand << "'\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    log << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    log << "numeric failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace alflab::cli
