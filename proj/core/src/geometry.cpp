#include "alflab/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace alflab {

JetMat MetricField::components(const ChartPoint& p, int order) const {
  if (order > kMaxJetOrder)
    throw std::out_of_range("jet order exceeds capability (max 4)");
  const auto& dom = domain(p.chart);
  if (!dom.contains(p.x))
    throw DomainError("point outside chart domain '" + p.chart + "'");
  return fn_(p, order);
}

const ChartDomain& MetricField::domain(const std::string& chart) const {
  auto it = atlas_.find(chart);
  if (it == atlas_.end()) throw DomainError("unknown chart '" + chart + "'");
  return it->second;
}

double MetricField::param(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::out_of_range("unknown metric parameter '" + name + "'");
  return it->second;
}

Jet MetricField::rho_jets(const ChartPoint& p, int order) const {
  if (rho_fn_) return rho_fn_(p, order);
  const auto& f = frame_;
  Jet r = Jet::variable(p.x[f.radial_axis], f.radial_axis, order);
  Jet s = r - f.rho_shift;
  return (s * s + f.rho_floor * f.rho_floor).sqrt();
}

Mat4 invert(const Mat4& m) {
  Eigen::Matrix4d em;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) em(i, j) = m[i][j];
  Eigen::Matrix4d inv = em.inverse();
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i][j] = inv(i, j);
  return r;
}

double det(const Mat4& m) {
  Eigen::Matrix4d em;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) em(i, j) = m[i][j];
  return em.determinant();
}

JetMat jet_invert(const JetMat& G, int order) {
  // Gauss-Jordan in the jet ring, pivoting on values.
  JetMat A;
  JetMat I;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      A[i][j] = G[i][j].truncated(std::min(order, G[i][j].order()));
      I[i][j] = Jet::constant(i == j ? 1.0 : 0.0, order);
    }
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(A[r][col].value()) > std::abs(A[piv][col].value())) piv = r;
    std::swap(A[col], A[piv]);
    std::swap(I[col], I[piv]);
    Jet inv = A[col][col].inverse();
    for (int j = 0; j < 4; ++j) {
      A[col][j] = A[col][j] * inv;
      I[col][j] = I[col][j] * inv;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      Jet f = A[r][col];
      if (f.value() == 0.0) {
        bool zero = true;
        for (int s = 0; s < JetTables::get().slots_at[f.order() + 1]; ++s)
          if (f.coeff(s) != 0.0) { zero = false; break; }
        if (zero) continue;
      }
      for (int j = 0; j < 4; ++j) {
        A[r][j] -= f * A[col][j];
        I[r][j] -= f * I[col][j];
      }
    }
  }
  return I;
}

Jet jet_det(const JetMat& m, int order) {
  // Laplace expansion over 4 rows; 24 terms with precomputed signs.
  static const int perm[24][4] = {
      {0, 1, 2, 3}, {0, 1, 3, 2}, {0, 2, 1, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}, {0, 3, 2, 1},
      {1, 0, 2, 3}, {1, 0, 3, 2}, {1, 2, 0, 3}, {1, 2, 3, 0}, {1, 3, 0, 2}, {1, 3, 2, 0},
      {2, 0, 1, 3}, {2, 0, 3, 1}, {2, 1, 0, 3}, {2, 1, 3, 0}, {2, 3, 0, 1}, {2, 3, 1, 0},
      {3, 0, 1, 2}, {3, 0, 2, 1}, {3, 1, 0, 2}, {3, 1, 2, 0}, {3, 2, 0, 1}, {3, 2, 1, 0}};
  static const int sign[24] = {1, -1, -1, 1,  1,  -1, -1, 1,  1,  -1, -1, 1,
                               1, -1, -1, 1,  1,  -1, -1, 1,  1,  -1, -1, 1};
  Jet s = Jet::constant(0.0, order);
  for (int p = 0; p < 24; ++p) {
    Jet t = m[0][perm[p][0]].truncated(order);
    for (int i = 1; i < 4; ++i) t = t * m[i][perm[p][i]];
    s += (sign[p] > 0) ? t : -t;
  }
  return s;
}

std::array<double, 4> sym4_eigenvalues(const Mat4& m) {
  Eigen::Matrix4d em;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) em(i, j) = m[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(em, Eigen::EigenvaluesOnly);
  std::array<double, 4> out;
  for (int i = 0; i < 4; ++i) out[i] = es.eigenvalues()(i);
  return out;
}

std::array<double, 3> sym3_eigenvalues(const std::array<std::array<double, 3>, 3>& m) {
  // closed-form symmetric 3x3 eigensolver (trigonometric method)
  const double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
  const double q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
  if (p1 == 0.0) {
    std::array<double, 3> d{m[0][0], m[1][1], m[2][2]};
    std::sort(d.begin(), d.end());
    return d;
  }
  const double p2 = (m[0][0] - q) * (m[0][0] - q) + (m[1][1] - q) * (m[1][1] - q) +
                    (m[2][2] - q) * (m[2][2] - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  std::array<std::array<double, 3>, 3> B;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) B[i][j] = (m[i][j] - (i == j ? q : 0.0)) / p;
  const double detB =
      B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) -
      B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
      B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0]);
  double r = std::clamp(detB / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  std::array<double, 3> out{e3, e2, e1};
  std::sort(out.begin(), out.end());
  return out;
}

Mat4 raise_first(const Mat4& h, const Mat4& ginv) {
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0;
      for (int k = 0; k < 4; ++k) s += ginv[i][k] * h[k][j];
      r[i][j] = s;
    }
  return r;
}

Mat4 raise_both(const Mat4& h, const Mat4& ginv) {
  Mat4 t = raise_first(h, ginv);
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0;
      for (int k = 0; k < 4; ++k) s += t[i][k] * ginv[j][k];
      r[i][j] = s;
    }
  return r;
}

Mat4 lower_both(const Mat4& h, const Mat4& g) { return raise_both(h, g); }

double contract2(const Mat4& S, const Mat4& T, const Mat4& ginv) {
  double s = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) s += ginv[i][k] * ginv[j][l] * S[i][j] * T[k][l];
  return s;
}

double pointwise_norm2(const Mat4& T, const Mat4& ginv) {
  return std::sqrt(std::max(0.0, contract2(T, T, ginv)));
}

double pointwise_norm1(const Vec4& w, const Mat4& ginv) {
  double s = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += ginv[i][j] * w[i] * w[j];
  return std::sqrt(std::max(0.0, s));
}

double trace(const Mat4& h, const Mat4& ginv) {
  double s = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += ginv[i][j] * h[i][j];
  return s;
}

}  // namespace alflab
