#pragma once

#include <cassert>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace alflab {

/// Gauss-Legendre nodes/weights on [-1, 1] (Newton on Legendre polynomials; cached).
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n) : x(n), w(n) {
    for (int i = 0; i < n; ++i) {
      double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        double dt = p1 / dp;
        t -= dt;
        if (std::abs(dt) < 1e-15) break;
      }
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      x[n - 1 - i] = t;
      w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
  }
};

inline double integrate_gl(const std::function<double(double)>& f, double a, double b,
                           int panels = 8, int order = 12) {
  static thread_local std::vector<GaussLegendre> cache;
  while (int(cache.size()) <= order) cache.emplace_back(int(cache.size()) + 1);
  const GaussLegendre& gl = cache[order - 1];
  double s = 0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h, hal = 0.5 * h;
    for (size_t i = 0; i < gl.x.size(); ++i) s += gl.w[i] * f(mid + hal * gl.x[i]) * hal;
  }
  return s;
}

/// Fornberg finite-difference weights: for nodes xs (size n) and expansion point x0,
/// returns w[d][j] with f^(d)(x0) ~= sum_j w[d][j] f(xs[j]), d = 0..maxd.
inline std::vector<std::vector<double>> fornberg_weights(double x0,
                                                         const std::vector<double>& xs,
                                                         int maxd) {
  const int n = int(xs.size());
  std::vector<std::vector<double>> c(maxd + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, maxd);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

/// Grid function on a strictly increasing 1-d node set; evaluation and derivatives
/// through local polynomial stencils (Fornberg weights on `width` nearest nodes).
class GridFunction1D {
 public:
  GridFunction1D() = default;
  GridFunction1D(std::vector<double> nodes, std::vector<double> values, int width = 7)
      : x_(std::move(nodes)), u_(std::move(values)), width_(width) {
    if (x_.size() != u_.size() || x_.size() < 2)
      throw std::invalid_argument("grid function needs matching node/value arrays");
  }

  double eval(double x, int deriv = 0) const {
    const int n = int(x_.size());
    const int w = std::min(width_, n);
    int lo = int(std::lower_bound(x_.begin(), x_.end(), x) - x_.begin()) - w / 2;
    lo = std::max(0, std::min(lo, n - w));
    std::vector<double> xs(x_.begin() + lo, x_.begin() + lo + w);
    auto c = fornberg_weights(x, xs, deriv);
    double s = 0;
    for (int j = 0; j < w; ++j) s += c[deriv][j] * u_[lo + j];
    return s;
  }

  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return u_; }
  std::vector<double>& values() { return u_; }
  bool empty() const { return x_.empty(); }

 private:
  std::vector<double> x_, u_;
  int width_ = 7;
};

/// Tensor-product grid function on a structured (a, b) grid.
class GridFunction2D {
 public:
  GridFunction2D() = default;
  GridFunction2D(std::vector<double> a, std::vector<double> b, std::vector<double> values,
                 int width = 7)
      : a_(std::move(a)), b_(std::move(b)), v_(std::move(values)), width_(width) {
    if (v_.size() != a_.size() * b_.size())
      throw std::invalid_argument("grid function dimension mismatch");
  }

  double eval(double a, double b, int da = 0, int db = 0) const {
    const int na = int(a_.size()), nb = int(b_.size());
    const int wa = std::min(width_, na), wb = std::min(width_, nb);
    int la = int(std::lower_bound(a_.begin(), a_.end(), a) - a_.begin()) - wa / 2;
    la = std::max(0, std::min(la, na - wa));
    int lb = int(std::lower_bound(b_.begin(), b_.end(), b) - b_.begin()) - wb / 2;
    lb = std::max(0, std::min(lb, nb - wb));
    std::vector<double> xs(a_.begin() + la, a_.begin() + la + wa);
    std::vector<double> ys(b_.begin() + lb, b_.begin() + lb + wb);
    auto ca = fornberg_weights(a, xs, da);
    auto cb = fornberg_weights(b, ys, db);
    double s = 0;
    for (int i = 0; i < wa; ++i) {
      double row = 0;
      for (int j = 0; j < wb; ++j) row += cb[db][j] * v_[(la + i) * nb + (lb + j)];
      s += ca[da][i] * row;
    }
    return s;
  }

  const std::vector<double>& anodes() const { return a_; }
  const std::vector<double>& bnodes() const { return b_; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }
  double& at(int i, int j) { return v_[i * b_.size() + j]; }
  double at(int i, int j) const { return v_[i * b_.size() + j]; }
  bool empty() const { return v_.empty(); }

 private:
  std::vector<double> a_, b_;
  std::vector<double> v_;
  int width_ = 7;
};

struct RichardsonResult {
  double limit = 0;
  double error = 0;        // spread of the last extrapolation step
  double exponent = 0;     // fitted correction exponent
  bool divergent = false;
};

/// Extrapolate a(R_k) -> a_inf assuming a = a_inf + c R^{-p} on a geometric ladder.
/// The exponent is fitted from successive triples; flags a non-contracting tail.
inline RichardsonResult richardson_ladder(const std::vector<double>& R,
                                          const std::vector<double>& a) {
  RichardsonResult out;
  const int n = int(a.size());
  if (n < 3) throw std::invalid_argument("richardson ladder needs >= 3 rungs");
  const double q = R[n - 1] / R[n - 2];
  const double d1 = a[n - 2] - a[n - 3];
  const double d2 = a[n - 1] - a[n - 2];
  const double scale = std::max({std::abs(a[n - 1]), std::abs(a[0]), 1e-300});
  if (std::abs(d2) >= std::abs(d1) && std::abs(d2) > 1e-11 * scale) {
    out.divergent = true;
    out.limit = a[n - 1];
    out.error = std::abs(d2);
    return out;
  }
  double p = 2.0;
  if (d1 != 0.0 && d2 != 0.0 && d2 / d1 > 0) p = -std::log(d2 / d1) / std::log(q);
  out.exponent = p;
  const double fac = std::pow(q, p) - 1.0;
  out.limit = (fac > 1e-12) ? a[n - 1] + d2 / fac : a[n - 1];
  double prev = out.limit;
  if (n >= 4) {
    const double d1p = a[n - 3] - a[n - 4];
    const double d2p = a[n - 2] - a[n - 3];
    double pp = p;
    if (d1p != 0.0 && d2p != 0.0 && d2p / d1p > 0)
      pp = -std::log(d2p / d1p) / std::log(R[n - 2] / R[n - 3]);
    const double facp = std::pow(R[n - 2] / R[n - 3], pp) - 1.0;
    prev = (facp > 1e-12) ? a[n - 2] + d2p / facp : a[n - 2];
  }
  out.error = std::abs(out.limit - prev) + 0.1 * std::abs(a[n - 1] - out.limit) + 1e-14 * scale;
  return out;
}

}  // namespace alflab
