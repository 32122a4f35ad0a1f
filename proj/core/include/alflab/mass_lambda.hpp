#pragma once

#include <optional>

#include "alflab/curvature.hpp"
#include "alflab/elliptic.hpp"

namespace alflab {

struct MassEstimate {
  std::vector<double> radii;
  std::vector<double> boundary_integrals;
  double extrapolated = 0;
  double error_estimate = 0;
  double fitted_exponent = 0;
  bool divergent = false;
};

/// Flux of div_ref(g - ref) - grad Tr_ref(g - ref) through {r = R}, with the
/// reference metric's connection, unit normal and area element.
double boundary_mass_integral(const MetricField& g, const MetricField& ref, double R,
                              int ntheta = 48);

MassEstimate relative_mass(const MetricField& g, const MetricField& ref,
                           const std::vector<double>& radii, int ntheta = 48);

enum class ReductionMode { Radial1D, RTheta2D };

struct WSolveConfig {
  ReductionMode mode = ReductionMode::Radial1D;
  int n = 768;
  int ntheta = 48;
  double r_out = 120.0;
  double tol = 1e-8;
  std::optional<ScalarField> scalar_curvature_override;
};

struct WSolution {
  ReductionMode mode = ReductionMode::Radial1D;
  GridFunction1D v1;    // v = w - 1
  GridFunction2D v2;
  double r_in = 0, r_out = 0;
  double w_min = 1;
  double pde_residual = 0;   // -4 dw + R w restored on the grid, scaled
  double fge_residual = 0;   // 2 df - |df|^2 + R
  ScalarField w_field;       // grid-backed, jets through order 3
  ScalarField f_field;       // f = -2 log w
  ScalarField R_used;        // the scalar-curvature field the solve used
};

/// Unique decaying solution of -4 lap w + R w = 0, w -> 1 at infinity, on the
/// symmetry-reduced truncated domain. Throws std::domain_error when w loses
/// positivity (metric outside the admissible neighborhood).
WSolution solve_w(const MetricField& g, const WSolveConfig& cfg);

struct LambdaCircResult {
  double value = 0;             // integral of R w
  double gradient_form = 0;     // integral of 4|dw|^2 + R w^2 on the same domain
  double cross_check = 0;       // |difference|
};
LambdaCircResult lambda_circ(const MetricField& g, const WSolution& w, double r_max,
                             int nr = 220, int ntheta = 32);

struct LambdaResult {
  WSolution w;
  double lambda_circ = 0;
  LambdaCircResult lambda_circ_detail;
  MassEstimate relative_mass;
  double lambda_alf = 0;
  double lambda_alf_combined = 0;  // single-ladder renormalized limit (diagnostic)
  double combined_error = 0;
  double pde_residual = 0;
  double w_min = 1;
};

struct LambdaConfig {
  WSolveConfig solve;
  std::vector<double> radii;     // mass / combined ladder (defaults filled if empty)
  int ntheta = 48;
};

LambdaResult lambda_alf(const MetricField& g, const MetricField& ref, const LambdaConfig& cfg);

/// m_f(g, ref) = m(g, ref) + 2 lim int <grad f, n> e^{-f} over growing spheres.
MassEstimate weighted_mass(const MetricField& g, const MetricField& ref, const ScalarField& f,
                           const std::vector<double>& radii, int ntheta = 48);

/// Conformal metric e^{-2 f / m} g (m = 3 for the 4-d catalog).
MetricField conformal_metric(const MetricField& g, const ScalarField& f, int m = 3);

struct WmlReport {
  double weighted_mass = 0;
  double lambda_alf = 0;
  double defect = 0;          // |m_f + lambda|
  double relative_defect = 0;
};
WmlReport verify_wml(const MetricField& g, const MetricField& ref, const LambdaConfig& cfg);

/// Volume of a coordinate shell (quadrature utility shared by tests and reports).
double shell_volume(const MetricField& g, double r0, double r1, int nr = 160, int ntheta = 64);

/// Reduced-measure integral of a pointwise integrand over [r_in, r_out]:
/// torus x int integrand(r, theta) sqrt(det g) dr dtheta (halved under Z2 marker).
double reduced_integral(const MetricField& g,
                        const std::function<double(const ChartPoint&)>& integrand, double r0,
                        double r1, int nr = 220, int ntheta = 32);

}  // namespace alflab
