#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>

namespace alflab {

inline constexpr int kDim = 4;        // chart dimension (all catalog metrics are 4-d)
inline constexpr int kMaxJetOrder = 4;
inline constexpr int kJetSlots = 70;  // multi-indices |a| <= 4 in 4 variables

/// Static multi-index tables shared by all jets. Built once at startup.
struct JetTables {
  std::array<std::array<std::uint8_t, kDim>, kJetSlots> midx{};  // graded order
  std::array<int, kMaxJetOrder + 2> slots_at{};                  // #slots with |a| <= o
  // product table: for every target slot g, pairs (i,j) with midx[i]+midx[j] == midx[g]
  std::array<int, kJetSlots + 1> pair_begin{};
  std::array<std::array<std::uint16_t, 2>, 495> pairs{};
  std::array<int, kJetSlots> shift_up[kDim];  // slot of midx + e_k (or -1)
  std::array<double, kJetSlots> alpha_fact{};  // prod(a_i!)

  int slot_of(int a0, int a1, int a2, int a3) const;

  static const JetTables& get();

 private:
  JetTables();
};

/// Truncated multivariate Taylor expansion in the 4 chart coordinates.
/// Coefficients are Taylor coefficients (derivative / alpha!), so multiplication
/// is plain coefficient convolution. Order is tracked at runtime, capped at 4.
class Jet {
 public:
  Jet() : order_(0) { c_.fill(0.0); }
  explicit Jet(int order) : order_(order) {
    assert(order >= 0 && order <= kMaxJetOrder);
    c_.fill(0.0);
  }

  static Jet constant(double v, int order) {
    Jet j(order);
    j.c_[0] = v;
    return j;
  }
  /// Seed jet for coordinate `var`: value + unit first derivative.
  static Jet variable(double v, int var, int order) {
    Jet j(order);
    j.c_[0] = v;
    if (order >= 1) j.c_[1 + var] = 1.0;
    return j;
  }

  int order() const { return order_; }
  double value() const { return c_[0]; }
  double coeff(int slot) const { return c_[slot]; }
  double& coeff(int slot) { return c_[slot]; }

  /// Partial derivative value; vars lists differentiation directions with multiplicity,
  /// e.g. deriv({0,0,1}) = d^3 f / dr^2 dtheta.
  double deriv(std::initializer_list<int> vars) const;

  /// Derivative jet d/dx_k, one order lower.
  Jet d(int k) const;

  /// Copy truncated to a lower order.
  Jet truncated(int order) const;

  Jet operator-() const {
    Jet r(order_);
    const int n = JetTables::get().slots_at[order_];
    for (int i = 0; i < n; ++i) r.c_[i] = -c_[i];
    return r;
  }
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator+=(double s) { c_[0] += s; return *this; }
  Jet& operator-=(double s) { c_[0] -= s; return *this; }
  Jet& operator*=(double s);

  friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
  friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
  friend Jet operator+(Jet a, double s) { a += s; return a; }
  friend Jet operator+(double s, Jet a) { a += s; return a; }
  friend Jet operator-(Jet a, double s) { a -= s; return a; }
  friend Jet operator-(double s, const Jet& a) { return (-a) + s; }
  friend Jet operator*(Jet a, double s) { a *= s; return a; }
  friend Jet operator*(double s, Jet a) { a *= s; return a; }
  friend Jet operator/(Jet a, double s) { a *= (1.0 / s); return a; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b) { return a * b.inverse(); }
  friend Jet operator/(double s, const Jet& b) { return b.inverse() * s; }

  /// Compose with a univariate function given scaled derivatives
  /// ders[k] = f^(k)(value()) / k!, k = 0..order.
  Jet compose(const std::array<double, kMaxJetOrder + 1>& ders) const;

  Jet inverse() const;
  Jet sqrt() const;
  Jet log() const;
  Jet exp() const;
  Jet sin() const;
  Jet cos() const;
  Jet pow(double p) const;

  /// Build a jet from raw partial-derivative values indexed like JetTables::midx.
  static Jet from_partials(const std::array<double, kJetSlots>& partials, int order);

 private:
  int order_;
  std::array<double, kJetSlots> c_;
};

inline Jet sqrt(const Jet& j) { return j.sqrt(); }
inline Jet log(const Jet& j) { return j.log(); }
inline Jet exp(const Jet& j) { return j.exp(); }
inline Jet sin(const Jet& j) { return j.sin(); }
inline Jet cos(const Jet& j) { return j.cos(); }
inline Jet pow(const Jet& j, double p) { return j.pow(p); }

}  // namespace alflab
