#pragma once

#include "alflab/geometry.hpp"

namespace alflab {

/// Christoffel symbols, curvature tensors, and the self-dual Weyl spectrum at a point.
/// Curvature convention: R^m_{jkl} = d_k G^m_{lj} - d_l G^m_{kj} + G G - G G,
/// R_{ijkl} = g_{im} R^m_{jkl}, Ric_{jl} = R^k_{jkl}; scalar curvature of the round
/// sphere is positive. This matches the sign the closed-form Weyl eigenvalues require.
struct CurvatureBundle {
  ChartPoint point;
  double christoffel[kDim][kDim][kDim];  // Gamma^k_{ij}
  double riemann[kDim][kDim][kDim][kDim];
  Mat4 ricci;
  double scalar = 0.0;
  std::array<double, 3> weyl_plus_eigenvalues{};  // ascending
  double weyl_plus_simple = 0.0;                  // the simple (multiplicity-1) eigenvalue
};

namespace detail {
struct MetricJets {
  JetMat g;
  JetMat ginv;
  Jet sqrtg;
  int order;
};
MetricJets metric_jets(const MetricField& m, const ChartPoint& p, int order);

struct ChristoffelJets {
  Jet G[kDim][kDim][kDim];
  int order;
};
ChristoffelJets christoffel_jets(const MetricJets& mj);

/// (nabla_k T)_{ij} for a (0,2)-tensor of jets, one order lower.
void covder2(const ChristoffelJets& ch, const JetMat& T, Jet out[kDim][kDim][kDim]);

/// Hodge star of an antisymmetric jet 2-form, with the chart orientation sign.
JetMat star2(const JetMat& om, const MetricJets& mj, int orient, int order);
}  // namespace detail

CurvatureBundle curvature_at(const MetricField& m, const ChartPoint& p);

Mat4 ricci_tensor(const MetricField& m, const ChartPoint& p);
double scalar_curvature(const MetricField& m, const ChartPoint& p);
/// Scalar curvature as jets (order <= 2 supported; needs metric jets of order+2).
Jet scalar_curvature_jets(const MetricField& m, const ChartPoint& p, int order);

/// |nabla R - 2 div Ric|_g at the point (contracted second Bianchi; needs order-3 jets).
double contracted_bianchi_residual(const MetricField& m, const ChartPoint& p);
/// Max over index patterns of the first-Bianchi / pair-symmetry residuals, relative.
double riemann_symmetry_residual(const MetricField& m, const ChartPoint& p);

double laplace_beltrami(const MetricField& m, const ScalarField& u, const ChartPoint& p);
Mat4 hessian(const MetricField& m, const ScalarField& u, const ChartPoint& p);
JetMat hessian_jets(const MetricField& m, const ScalarField& u, const ChartPoint& p, int order);

Vec4 divergence_sym2(const MetricField& m, const SymTwoTensorField& h, const ChartPoint& p);
/// div_f s = div s - s(grad f, .), the e^{f} div(e^{-f} .) weighted divergence.
Vec4 weighted_divergence(const MetricField& m, const ScalarField& f, const SymTwoTensorField& h,
                         const ChartPoint& p);

/// Traceless part of the symmetrized covariant derivative of a 1-form.
Mat4 div_star_traceless(const MetricField& m, const OneFormField& w, const ChartPoint& p);
JetMat div_star_traceless_jets(const MetricField& m, const OneFormField& w, const ChartPoint& p,
                               int order);

/// Lichnerowicz Laplacian: rough Laplacian + 2 R_{ikjl} h^{kl} - Ric h - h Ric
/// (the Ricci terms vanish on the Ricci-flat catalog backgrounds).
Mat4 lichnerowicz(const MetricField& m, const SymTwoTensorField& h, const ChartPoint& p);

Mat4 lie_derivative_metric(const MetricField& m, const VectorField& X, const ChartPoint& p);

std::array<double, 3> weyl_plus_eigenvalues(const MetricField& m, const ChartPoint& p);
double weyl_plus_simple_eigenvalue(const MetricField& m, const ChartPoint& p);

}  // namespace alflab
