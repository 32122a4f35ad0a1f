#pragma once

#include "alflab/catalog.hpp"
#include "alflab/mass_lambda.hpp"

namespace alflab {

/// The conformally-Kahler instability variation and its gauge-fixed form.
/// K is the 1-form dual of the Killing field J grad f_hat (normalized so that
/// |K| = |grad f_hat|), omega_pm the (anti-)self-dual halves of dK, and
/// h = 1/2 f_hat^3 (omega_- o omega_+). The potential G satisfies div h = dG.
struct InstabilityVariation {
  MetricKind kind = MetricKind::Kerr;
  MetricField metric;
  ScalarField f_hat;
  OneFormField K;
  TwoFormField omega_plus, omega_minus;
  SymTwoTensorField h;
  ScalarField potential_G;
  ScalarField ansatz_primitive;  // closed-form part of psi (div h = (3/4) lap psi)
  OneFormField ansatz;           // d(ansatz_primitive)
  ScalarField phi;               // decaying correction (solved; closed form exists
                                 // for Kerr and Taub-Bolt and is used as oracle)
  ScalarField psi_total;
  SymTwoTensorField h0;          // gauge-fixed, divergence-free
  bool gauge_fixed = false;
  double c_effective = 0;        // lambda * f_hat^3 (constant; 4m / 9n / 16 sqrt(kappa))
  double gauge_solve_residual = 0;
  // Chen-Teo fitted ansatz constants (c1', c2', c3') and the fitted 1/r^2
  // coefficient of lap r; zero for the closed-form metrics.
  std::array<double, 3> ct_ansatz_constants{};
};

InstabilityVariation build_variation(MetricKind kind,
                                     const std::map<std::string, double>& params = {});

struct GaugeSolveConfig {
  int n = 320;          // radial / x nodes
  int ntheta = 96;      // polar / y nodes
  double r_out = 160.0; // truncation (in units of the metric scale)
};

/// Solves lap phi = (4/3) G - lap(ansatz primitive) with decaying closure and
/// assembles h0 = h - div0*(d psi). Fills phi, psi_total, h0.
void gauge_fix(InstabilityVariation& var, const GaugeSolveConfig& cfg);

/// Closed-form gauge correction where available (Kerr, Taub-Bolt; Schwarzschild = 0).
std::optional<ScalarField> closed_form_gauge_phi(MetricKind kind, const MetricField& g);

/// Installs the closed-form phi instead of solving (test/oracle path).
void gauge_fix_closed_form(InstabilityVariation& var);

/// Weighted-sup of |div h0|_g rho^{2+3/4} over an interior sample.
double gauge_residual_weighted_sup(const InstabilityVariation& var, double r_lo, double r_hi,
                                   int nr = 24, int ntheta = 9);

struct SecondVariationReport {
  double delta2 = 0;       // (1/2) int <Lich h0, h0>
  double quad_hh = 0;      // same as delta2
  double quad_hH = 0;      // (1/2) int <Lich h0, h>
  double quad_f3 = 0;      // (1/2) c int f^-3 |h|^2 with c = lambda f^3
  double spread = 0;       // relative three-way spread
  double c_effective = 0;
  // literal pointwise extraction of c from Lich h = c f^-3 h (reported as-is)
  double c_pointwise_min = 0, c_pointwise_max = 0, c_pointwise_spread = 0;
};

struct QuadratureConfig {
  double r_max = 0;        // 0: use the gauge solve truncation
  int nr = 160, ntheta = 24;
  int richardson_rungs = 4;
};

SecondVariationReport second_variation(const InstabilityVariation& var,
                                       const QuadratureConfig& qc = {});

/// First variation of lambda_ALF: -int <Ric + Hess f_g, h> e^{-f_g}.
double first_variation(const MetricField& g, const MetricField& ref, const SymTwoTensorField& h,
                       const LambdaConfig& cfg);

struct RayPoint {
  double s = 0;
  double lambda = 0;
  double w_min = 1;
};
struct RayReport {
  std::vector<RayPoint> points;
  double quadratic_coefficient = 0;  // fitted lambda(s)/s^2
  double half_delta2 = 0;
};

/// lambda_ALF(g_RF + s h0, g_RF) along the ray (Taub-Bolt class: radial reduction).
RayReport lambda_alf_along_ray(const InstabilityVariation& var, const std::vector<double>& svals,
                               const LambdaConfig& cfg, double half_delta2);

}  // namespace alflab
