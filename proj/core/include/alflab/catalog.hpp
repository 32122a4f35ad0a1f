#pragma once

#include <optional>
#include <string>

#include "alflab/geometry.hpp"

namespace alflab {

enum class MetricKind {
  FlatR3xS1,
  FlatQuotientZ2Marker,
  ModelFibered,
  Schwarzschild,
  Kerr,
  TaubBolt,
  ChenTeo,
};

struct CatalogEntry {
  MetricKind kind;
  std::map<std::string, double> params;
  double asymptotic_order;  // documented decay eta toward the model metric
};

std::string to_string(MetricKind k);
std::optional<MetricKind> metric_kind_from_string(const std::string& s);

/// Flat product metric on R^3 x S^1 with circle length L > 0.
/// Chart "polar": (r, theta, y, phi), y the fiber coordinate in [0, L).
MetricField make_flat_r3xs1(double L);

/// Same metric carrying the Z2-quotient marker; integrals computed on the cover are
/// divided by 2 downstream.
MetricField make_flat_quotient_z2(double L);

/// Model metric dr^2 + r^2 sigma + (dy + a(theta) dphi)^2 with fiber length L;
/// connection given as the phi-coefficient a(theta) on the sphere chart (m = 3 only).
MetricField make_model_metric(int m, double L, std::function<Jet(const Jet&)> connection_phi);

/// Euclidean Kerr, parameters m > 0, |a| < m; chart "bl": (r, theta, tau, phi),
/// domain r > r_plus. a = 0 is Schwarzschild.
MetricField make_kerr(double m, double a);
MetricField make_schwarzschild(double m);

/// Taub-Bolt with nut parameter n > 0 (mass fixed to 5n/4); chart "tb":
/// (r, theta, psi, phi), domain r > 2n, psi period 4 pi.
MetricField make_taub_bolt(double n);

/// Chen-Teo in the cubic two-parameter family (kappa > 0, xi in (1/2, 1/sqrt 2)).
/// Ground-truth chart "xy": (x, y, tau, phi); derived chart "rtheta": (r, theta, tau, phi)
/// via the asymptotic reparametrization.
MetricField make_chen_teo(double kappa, double xi);

/// Flat R^4 in polar coordinates (r, theta, psi, phi) over the Hopf S^3 (no fiber at
/// infinity; used by the Hardy-constant estimator).
MetricField make_flat_r4();

/// The exact ALF model metric of a catalog entry, in the same chart.
MetricField model_metric_of(const MetricField& g, MetricKind kind);

/// g_RF + s h, with jets summed componentwise. Verifies positive-definiteness on a
/// deterministic sample and throws std::domain_error on failure.
MetricField perturb(const MetricField& g, const SymTwoTensorField& h, double s);

/// Smallest metric eigenvalue over a deterministic interior sample (positivity sweep).
double positivity_floor(const MetricField& g, int nsamples = 64, unsigned seed = 12345);

/// Construct a catalog metric by kind + named parameters (CLI entry point).
MetricField make_catalog_metric(MetricKind kind, const std::map<std::string, double>& params);

/// Conformal multiple (1 + A rho^{-sigma}) g, smooth via the rho smoothing; the
/// family used by the mass/lambda test suites.
MetricField conformal_flat_family(double L, double A, double sigma);
/// Conformal factor exp(2 A u(rho)) with u harmonic (= 1/rho) outside the core and
/// smoothly capped inside; integrable scalar curvature. Exact mass 12 pi A L x (3-1)...
MetricField harmonic_conformal_flat(double L, double A);

struct ChenTeoRoots {
  double nu, x1, x2, x3;
  double a0, a1, a2, a3;  // monic cubic coefficients (a4 = 0)
};
ChenTeoRoots chen_teo_roots(double xi);

}  // namespace alflab
