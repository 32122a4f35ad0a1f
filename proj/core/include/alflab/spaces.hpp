#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alflab/geometry.hpp"

namespace alflab {

/// rho > 1 weight tied to a metric's asymptotic frame.
struct WeightFunction {
  const MetricField* metric = nullptr;
  bool fiber_invariant = true;
  double operator()(const ChartPoint& p) const { return metric->rho(p); }
  Jet jets(const ChartPoint& p, int order) const { return metric->rho_jets(p, order); }
};

struct WeightedNormEstimate {
  double tau = 0;
  int k = 0;
  double alpha = 0;
  double sup_value = 0;
  ChartPoint argmax_point;
  int sample_count = 0;
};

struct DecayFit {
  double estimated_order = 0;   // +inf flag when the field vanishes identically
  double fit_residual = 0;
  std::vector<double> radii_used;
  bool vanishes = false;
};

struct FiberStructure {
  int fiber_axis = 2;
  double period = 1.0;
  int quadrature_points = 64;
};

/// u = u^pi (fiber integral) + decomposition remainder; u_perp = u - u^pi / L.
struct FiberDecomposition {
  ScalarField u_pi;
  ScalarField u_perp;
};
FiberDecomposition fiber_decompose(const ScalarField& u, const FiberStructure& fs);

struct SamplerConfig {
  std::uint64_t seed = 1;
  int samples_per_stratum = 48;
  int strata = 8;            // nested annuli rho in [rho0 2^k, rho0 2^{k+1}]
  double rho0 = 2.0;
  int holder_pairs = 8;      // dyadic separations per sample point
  int refine_rounds = 3;
};

WeightedNormEstimate weighted_holder_norm(const ScalarField& s, const MetricField& g,
                                          double tau, int k, double alpha,
                                          const SamplerConfig& cfg);
WeightedNormEstimate weighted_holder_norm(const SymTwoTensorField& s, const MetricField& g,
                                          double tau, int k, double alpha,
                                          const SamplerConfig& cfg);

/// Least-squares slope of log sup_{dB_R} |field| against log R, negated.
DecayFit decay_order_fit(const ScalarField& s, const MetricField& g,
                         const std::vector<double>& radii, int angular_samples = 24);
DecayFit decay_order_fit(const SymTwoTensorField& s, const MetricField& g,
                         const std::vector<double>& radii, int angular_samples = 24);
/// Decay order of g - g_ref measured in the g_ref frame.
DecayFit decay_order_fit_metric_diff(const MetricField& g, const MetricField& g_ref,
                                     const std::vector<double>& radii, int angular_samples = 24);

/// Exceptional decay rates Lambda = Z \ (0, m-2) of the Laplacian on ALF manifolds.
std::string exceptional_values(int m);
bool is_exceptional(double tau, int m);

/// dim of degree-k homogeneous harmonic polynomials on R^m.
long harmonic_poly_dim(int m, int k);

struct HardyEstimate {
  double value = 0;          // smallest Rayleigh quotient on the discrete space
  double error_estimate = 0; // grid-halving spread
  int grid = 0;
  int iterations = 0;
};

/// Smallest Rayleigh quotient int |grad phi|^2 / int phi^2 rho^-2 over the radial
/// P1 space with zero boundary data on the truncated annulus [r0, r1].
HardyEstimate hardy_constant_estimate(const MetricField& g, double r0, double r1, int grid);

}  // namespace alflab
