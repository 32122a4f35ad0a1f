#include "alflab/jet.hpp"

#include <algorithm>
#include <vector>

namespace alflab {

namespace {
int factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }
}  // namespace

JetTables::JetTables() {
  // graded multi-index enumeration
  int slot = 0;
  slots_at[0] = 0;
  for (int total = 0; total <= kMaxJetOrder; ++total) {
    for (int a0 = total; a0 >= 0; --a0)
      for (int a1 = total - a0; a1 >= 0; --a1)
        for (int a2 = total - a0 - a1; a2 >= 0; --a2) {
          const int a3 = total - a0 - a1 - a2;
          midx[slot] = {std::uint8_t(a0), std::uint8_t(a1), std::uint8_t(a2), std::uint8_t(a3)};
          ++slot;
        }
    slots_at[total + 1] = slot;
  }
  // note: the enumeration above must place the 4 first-order slots right after the
  // constant slot in coordinate order; Jet::variable relies on slots 1..4.
  // Fix ordering of first-order block explicitly:
  // with the loops above, total=1 gives (1,0,0,0),(0,1,0,0),(0,0,1,0),(0,0,0,1) - ok.

  auto slot_of = [&](std::array<int, kDim> a) -> int {
    for (int s = 0; s < kJetSlots; ++s) {
      bool eq = true;
      for (int k = 0; k < kDim; ++k)
        if (int(midx[s][k]) != a[k]) { eq = false; break; }
      if (eq) return s;
    }
    return -1;
  };

  for (int k = 0; k < kDim; ++k)
    for (int s = 0; s < kJetSlots; ++s) {
      std::array<int, kDim> a{int(midx[s][0]), int(midx[s][1]), int(midx[s][2]), int(midx[s][3])};
      a[k] += 1;
      shift_up[k][s] = slot_of(a);
    }

  for (int s = 0; s < kJetSlots; ++s) {
    double f = 1.0;
    for (int k = 0; k < kDim; ++k) f *= factorial(midx[s][k]);
    alpha_fact[s] = f;
  }

  // product pairs grouped by target slot
  std::vector<std::array<std::uint16_t, 2>> tmp[kJetSlots];
  for (int i = 0; i < kJetSlots; ++i)
    for (int j = 0; j < kJetSlots; ++j) {
      std::array<int, kDim> a;
      int total = 0;
      for (int k = 0; k < kDim; ++k) {
        a[k] = int(midx[i][k]) + int(midx[j][k]);
        total += a[k];
      }
      if (total > kMaxJetOrder) continue;
      tmp[slot_of(a)].push_back({std::uint16_t(i), std::uint16_t(j)});
    }
  int at = 0;
  for (int g = 0; g < kJetSlots; ++g) {
    pair_begin[g] = at;
    for (auto& p : tmp[g]) pairs[at++] = p;
  }
  pair_begin[kJetSlots] = at;
}

int JetTables::slot_of(int a0, int a1, int a2, int a3) const {
  for (int s = 0; s < kJetSlots; ++s)
    if (midx[s][0] == a0 && midx[s][1] == a1 && midx[s][2] == a2 && midx[s][3] == a3) return s;
  return -1;
}

const JetTables& JetTables::get() {
  static const JetTables t;
  return t;
}

Jet Jet::from_partials(const std::array<double, kJetSlots>& partials, int order) {
  const auto& T = JetTables::get();
  Jet j(order);
  for (int s = 0; s < T.slots_at[order + 1]; ++s) j.c_[s] = partials[s] / T.alpha_fact[s];
  return j;
}

double Jet::deriv(std::initializer_list<int> vars) const {
  std::array<int, kDim> a{0, 0, 0, 0};
  for (int v : vars) a[v] += 1;
  const auto& T = JetTables::get();
  for (int s = 0; s < T.slots_at[order_ + 1]; ++s) {
    bool eq = true;
    for (int k = 0; k < kDim; ++k)
      if (int(T.midx[s][k]) != a[k]) { eq = false; break; }
    if (eq) return c_[s] * T.alpha_fact[s];
  }
  throw std::out_of_range("jet derivative order exceeds jet order");
}

Jet Jet::d(int k) const {
  if (order_ == 0) throw std::out_of_range("cannot differentiate an order-0 jet");
  const auto& T = JetTables::get();
  Jet r(order_ - 1);
  const int n = T.slots_at[order_];
  for (int s = 0; s < n; ++s) {
    const int src = T.shift_up[k][s];
    r.c_[s] = c_[src] * (int(T.midx[s][k]) + 1);
  }
  return r;
}

Jet Jet::truncated(int order) const {
  assert(order <= order_);
  Jet r(order);
  const int n = JetTables::get().slots_at[order + 1];
  for (int i = 0; i < n; ++i) r.c_[i] = c_[i];
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  order_ = std::min(order_, o.order_);
  const int n = JetTables::get().slots_at[order_ + 1];
  for (int i = 0; i < n; ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  order_ = std::min(order_, o.order_);
  const int n = JetTables::get().slots_at[order_ + 1];
  for (int i = 0; i < n; ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  const int n = JetTables::get().slots_at[order_ + 1];
  for (int i = 0; i < n; ++i) c_[i] *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  const auto& T = JetTables::get();
  const int order = std::min(a.order_, b.order_);
  Jet r(order);
  const int nslots = T.slots_at[order + 1];
  for (int g = 0; g < nslots; ++g) {
    double acc = 0.0;
    for (int p = T.pair_begin[g]; p < T.pair_begin[g + 1]; ++p) {
      const int i = T.pairs[p][0], j = T.pairs[p][1];
      if (i < nslots && j < nslots) acc += a.c_[i] * b.c_[j];
    }
    r.c_[g] = acc;
  }
  return r;
}

Jet Jet::compose(const std::array<double, kMaxJetOrder + 1>& ders) const {
  Jet u = *this;
  u.c_[0] = 0.0;  // (x - x0) part
  Jet r = Jet::constant(ders[order_], order_);
  for (int k = order_ - 1; k >= 0; --k) {
    r = r * u;
    r.c_[0] += ders[k];
  }
  return r;
}

Jet Jet::inverse() const {
  const double v = c_[0];
  if (v == 0.0) throw std::domain_error("jet inverse at zero value");
  std::array<double, kMaxJetOrder + 1> d{};
  double p = 1.0 / v;
  for (int k = 0; k <= order_; ++k) {
    d[k] = p;
    p *= -1.0 / v;
  }
  return compose(d);
}

Jet Jet::pow(double pw) const {
  const double v = c_[0];
  std::array<double, kMaxJetOrder + 1> d{};
  double coef = 1.0;
  d[0] = std::pow(v, pw);
  for (int k = 1; k <= order_; ++k) {
    coef *= (pw - (k - 1)) / k;
    d[k] = coef * std::pow(v, pw - k);
  }
  return compose(d);
}

Jet Jet::sqrt() const { return pow(0.5); }

Jet Jet::log() const {
  const double v = c_[0];
  if (v <= 0.0) throw std::domain_error("jet log of non-positive value");
  std::array<double, kMaxJetOrder + 1> d{};
  d[0] = std::log(v);
  double p = 1.0 / v;
  for (int k = 1; k <= order_; ++k) {
    d[k] = ((k % 2) ? p : -p) / k;
    p /= v;
  }
  return compose(d);
}

Jet Jet::exp() const {
  const double e = std::exp(c_[0]);
  std::array<double, kMaxJetOrder + 1> d{};
  double f = 1.0;
  for (int k = 0; k <= order_; ++k) {
    d[k] = e / f;
    f *= (k + 1);
  }
  return compose(d);
}

Jet Jet::sin() const {
  const double s = std::sin(c_[0]), c = std::cos(c_[0]);
  const double tab[4] = {s, c, -s, -c};
  std::array<double, kMaxJetOrder + 1> d{};
  double f = 1.0;
  for (int k = 0; k <= order_; ++k) {
    d[k] = tab[k % 4] / f;
    f *= (k + 1);
  }
  return compose(d);
}

Jet Jet::cos() const {
  const double s = std::sin(c_[0]), c = std::cos(c_[0]);
  const double tab[4] = {c, -s, -c, s};
  std::array<double, kMaxJetOrder + 1> d{};
  double f = 1.0;
  for (int k = 0; k <= order_; ++k) {
    d[k] = tab[k % 4] / f;
    f *= (k + 1);
  }
  return compose(d);
}

}  // namespace alflab
