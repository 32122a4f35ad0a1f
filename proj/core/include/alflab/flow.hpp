#pragma once

#include "alflab/variation.hpp"

namespace alflab {

enum class FlowAnsatz { TaubBoltU2, FlatFiber };

/// Cohomogeneity-one flow state: three radial profiles on a fixed staggered grid.
/// TaubBoltU2: g = q1 dz^2 + q2 (s1^2+s2^2) + q3 s3^2 in the bolt proper-distance
/// coordinate z (chart "flow": (z, theta, psi, phi)); FlatFiber:
/// g = q1 dr^2 + q2 dOmega^2 + q3 dy^2 (chart "flow": (r, theta, y, phi)).
struct FlowState {
  FlowAnsatz ansatz = FlowAnsatz::TaubBoltU2;
  double t = 0;
  std::vector<double> zeta;                 // interior staggered nodes
  std::array<std::vector<double>, 3> q;     // profiles at the nodes
  std::array<std::vector<double>, 3> q_bg;  // background profiles (DeTurck reference)
  GridFunction1D r_of_zeta;                 // TB: r(z); flat: identity
  double bg_param = 1.0;                    // n (TB) or L (flat)
  double torus_measure = 1.0;
  std::vector<double> cfl_history;
};

/// Metric field reconstructed from profiles (jets in z via local stencils).
MetricField state_metric(const FlowState& s);
/// The DeTurck background in the same chart.
MetricField background_metric(const FlowState& s);

/// Taub-Bolt U(2) state from g_TB + s h0 (h0 from the gauge-fixed variation).
FlowState make_taub_bolt_flow_state(const InstabilityVariation& var, double s, int n_nodes,
                                    double zeta_max);
/// Flat-fiber state from radial profile closures (q1, q2, q3 as functions of r).
FlowState make_flat_flow_state(double L, const std::function<double(double)>& q1,
                               const std::function<double(double)>& q2,
                               const std::function<double(double)>& q3, int n_nodes, double r_in,
                               double r_out);

struct RhsResult {
  std::array<std::vector<double>, 3> dq;
  double ansatz_residual = 0;  // relative off-ansatz content of the full-tensor RHS
  double cfl_dt = 0;           // stability bound for explicit stepping
};

/// -2 Ric(g) + Lie_W g reduced to the ansatz; the full 4x4 right-hand side is
/// checked to lie in the ansatz span.
RhsResult deturck_rhs(const FlowState& s);

/// Pointwise full-tensor RHS for a closed-form metric (fixed-point and
/// linearization oracles).
Mat4 deturck_rhs_at(const MetricField& g, const MetricField& background, const ChartPoint& p);

/// One RK2 (midpoint) step; throws on CFL violation or positivity loss.
FlowState step(const FlowState& s, double dt);

struct MonitorSample {
  double t = 0;
  double lambda_alf = 0;
  double mass = 0;
  double decay_order = 0;
  double distance_sup = 0;  // sup |g - g_RF| over the grid (frame-normalized)
};

struct MonitorReport {
  std::vector<MonitorSample> series;
  double lambda_min_increment = 0;  // min over consecutive samples of the lambda increment
  double mass_drift = 0;            // max |m(t) - m(0)| (relative where meaningful)
  double decay_drift = 0;           // max decay-order drop from the initial fit
  double min_distance = 0;          // min over t of distance_sup (non-return witness)
};

struct FlowConfig {
  double T = 1.0;
  double dt = 0;           // 0: auto from CFL
  int monitor_stride = 10;
  double mass_radius = 0;  // 0: auto (inside the domain)
  LambdaConfig lambda_cfg; // radial reduction settings for the lambda monitor
  bool monitor_lambda = true;
  bool monitor_mass = true;
};

MonitorReport run_flow(FlowState s, const FlowConfig& cfg);

}  // namespace alflab
