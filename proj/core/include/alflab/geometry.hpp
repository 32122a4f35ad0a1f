#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "alflab/jet.hpp"

namespace alflab {

struct ChartPoint {
  std::string chart;
  std::array<double, kDim> x{};

  double operator[](int i) const { return x[i]; }
};

/// Open box with exclusion margins near coordinate singularities (axis, bolt/horizon).
/// Evaluation requests inside a margin are rejected; solvers impose regularity
/// conditions there instead.
struct ChartDomain {
  std::array<double, kDim> lo{};
  std::array<double, kDim> hi{};         // +inf allowed
  std::array<double, kDim> margin{};     // exclusion margin at each finite edge
  std::array<bool, kDim> periodic{};     // periodic coordinates are never rejected
  int orientation = 1;                   // sign of the chart coordinate orientation
  // bounded box used by deterministic interior sampling (tests, positivity sweeps)
  std::array<double, kDim> sample_lo{};
  std::array<double, kDim> sample_hi{};

  bool contains(const std::array<double, kDim>& x) const {
    for (int k = 0; k < kDim; ++k) {
      if (periodic[k]) continue;
      if (x[k] < lo[k] + margin[k] || x[k] > hi[k] - margin[k]) return false;
    }
    return true;
  }
};

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using JetMat = std::array<std::array<Jet, kDim>, kDim>;
using JetVec = std::array<Jet, kDim>;

struct Vec4 {
  std::array<double, kDim> v{};
  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }
};

struct Mat4 {
  std::array<std::array<double, kDim>, kDim> m{};
  std::array<double, kDim>& operator[](int i) { return m[i]; }
  const std::array<double, kDim>& operator[](int i) const { return m[i]; }
};

/// Structural metadata of the asymptotic region: which coordinates play the roles
/// of radius, polar angle, and the periodic directions, plus the total measure of
/// the periodic torus (product of periods) used by reduced integrals.
struct AsymptoticFrame {
  int radial_axis = 0;
  int polar_axis = 1;
  std::array<bool, kDim> invariant_axis{false, false, true, true};
  double torus_measure = 1.0;   // integral over the periodic directions
  double rho_shift = 0.0;       // rho = sqrt((r - shift)^2 + rho_floor^2)-style smoothing
  double rho_floor = 1.5;
};

class MetricField;

/// Scalar field with exact jets.
class ScalarField {
 public:
  using Fn = std::function<Jet(const ChartPoint&, int order)>;
  ScalarField() = default;
  explicit ScalarField(Fn fn) : fn_(std::move(fn)) {}
  Jet jets(const ChartPoint& p, int order) const { return fn_(p, order); }
  double value(const ChartPoint& p) const { return fn_(p, 0).value(); }
  explicit operator bool() const { return bool(fn_); }

 private:
  Fn fn_;
};

class OneFormField {
 public:
  using Fn = std::function<JetVec(const ChartPoint&, int order)>;
  OneFormField() = default;
  explicit OneFormField(Fn fn) : fn_(std::move(fn)) {}
  JetVec jets(const ChartPoint& p, int order) const { return fn_(p, order); }
  Vec4 values(const ChartPoint& p) const {
    auto j = fn_(p, 0);
    Vec4 v;
    for (int i = 0; i < kDim; ++i) v[i] = j[i].value();
    return v;
  }
  explicit operator bool() const { return bool(fn_); }

 private:
  Fn fn_;
};

/// Antisymmetric 2-form field (antisymmetry verified on construction points by tests).
class TwoFormField {
 public:
  using Fn = std::function<JetMat(const ChartPoint&, int order)>;
  TwoFormField() = default;
  explicit TwoFormField(Fn fn) : fn_(std::move(fn)) {}
  JetMat jets(const ChartPoint& p, int order) const { return fn_(p, order); }
  explicit operator bool() const { return bool(fn_); }

 private:
  Fn fn_;
};

class SymTwoTensorField {
 public:
  using Fn = std::function<JetMat(const ChartPoint&, int order)>;
  SymTwoTensorField() = default;
  explicit SymTwoTensorField(Fn fn) : fn_(std::move(fn)) {}
  JetMat jets(const ChartPoint& p, int order) const { return fn_(p, order); }
  Mat4 values(const ChartPoint& p) const {
    auto j = fn_(p, 0);
    Mat4 m;
    for (int i = 0; i < kDim; ++i)
      for (int k = 0; k < kDim; ++k) m[i][k] = j[i][k].value();
    return m;
  }
  explicit operator bool() const { return bool(fn_); }

 private:
  Fn fn_;
};

/// Vector field (contravariant components).
class VectorField {
 public:
  using Fn = std::function<JetVec(const ChartPoint&, int order)>;
  VectorField() = default;
  explicit VectorField(Fn fn) : fn_(std::move(fn)) {}
  JetVec jets(const ChartPoint& p, int order) const { return fn_(p, order); }
  explicit operator bool() const { return bool(fn_); }

 private:
  Fn fn_;
};

/// Chart-based smooth metric with exact derivatives through order 4.
/// Immutable after construction; safe to share across threads.
class MetricField {
 public:
  using ComponentFn = std::function<JetMat(const ChartPoint&, int order)>;

  MetricField() = default;
  MetricField(std::string default_chart, ComponentFn fn,
              std::map<std::string, ChartDomain> atlas,
              std::map<std::string, double> params, double fiber_length)
      : default_chart_(std::move(default_chart)),
        fn_(std::move(fn)),
        atlas_(std::move(atlas)),
        params_(std::move(params)),
        fiber_length_(fiber_length) {}

  /// Metric components as jets; throws DomainError outside the chart domain,
  /// std::out_of_range for order > 4.
  JetMat components(const ChartPoint& p, int order) const;

  Mat4 values(const ChartPoint& p) const {
    auto j = components(p, 0);
    Mat4 m;
    for (int i = 0; i < kDim; ++i)
      for (int k = 0; k < kDim; ++k) m[i][k] = j[i][k].value();
    return m;
  }

  const ChartDomain& domain(const std::string& chart) const;
  const std::string& default_chart() const { return default_chart_; }
  double param(const std::string& name) const;
  bool has_param(const std::string& name) const { return params_.count(name) > 0; }
  const std::map<std::string, double>& params() const { return params_; }
  double fiber_length() const { return fiber_length_; }
  int orientation(const std::string& chart) const { return domain(chart).orientation; }

  const AsymptoticFrame& frame() const { return frame_; }
  void set_frame(AsymptoticFrame f) { frame_ = f; }

  bool z2_quotient_marker() const { return z2_marker_; }
  void set_z2_quotient_marker(bool b) { z2_marker_ = b; }

  /// Smoothed radius function rho > 1, equal to the radial coordinate up to the
  /// floor smoothing; invariant under the periodic directions.
  Jet rho_jets(const ChartPoint& p, int order) const;
  double rho(const ChartPoint& p) const { return rho_jets(p, 0).value(); }
  /// Charts whose radius is not a plain coordinate install an override.
  void set_rho_fn(std::function<Jet(const ChartPoint&, int)> fn) { rho_fn_ = std::move(fn); }

  ChartPoint point(double r, double th, const std::string& chart = "") const {
    return ChartPoint{chart.empty() ? default_chart_ : chart, {r, th, 0.0, 0.0}};
  }

 private:
  std::string default_chart_;
  ComponentFn fn_;
  std::map<std::string, ChartDomain> atlas_;
  std::map<std::string, double> params_;
  double fiber_length_ = 1.0;
  AsymptoticFrame frame_{};
  std::function<Jet(const ChartPoint&, int)> rho_fn_;
  bool z2_marker_ = false;
};

// ---- pointwise dense linear algebra ----

Mat4 invert(const Mat4& m);
double det(const Mat4& m);
JetMat jet_invert(const JetMat& m, int order);
Jet jet_det(const JetMat& m, int order);

/// Eigenvalues of a symmetric 4x4 (ascending), for positivity sweeps.
std::array<double, 4> sym4_eigenvalues(const Mat4& m);
/// Eigenvalues of a symmetric 3x3 (ascending), closed-form solver.
std::array<double, 3> sym3_eigenvalues(const std::array<std::array<double, 3>, 3>& m);

// ---- index gymnastics on pointwise values ----

/// Raise one slot of a covariant symmetric 2-tensor: h^i_j = g^{ik} h_{kj}.
Mat4 raise_first(const Mat4& h, const Mat4& ginv);
/// Fully raise: h^{ij}.
Mat4 raise_both(const Mat4& h, const Mat4& ginv);
/// Lower both slots of a contravariant 2-tensor.
Mat4 lower_both(const Mat4& h, const Mat4& g);
/// Full contraction <S, T>_g = S_{ij} T_{kl} g^{ik} g^{jl}.
double contract2(const Mat4& S, const Mat4& T, const Mat4& ginv);
/// Pointwise norm |T|_g of a (0,2)-tensor.
double pointwise_norm2(const Mat4& T, const Mat4& ginv);
/// Pointwise norm of a 1-form.
double pointwise_norm1(const Vec4& w, const Mat4& ginv);
double trace(const Mat4& h, const Mat4& ginv);

}  // namespace alflab
