#include "alflab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "alflab/curvature.hpp"
#include "alflab/rng.hpp"

namespace alflab {

FiberDecomposition fiber_decompose(const ScalarField& u, const FiberStructure& fs) {
  if (fs.period <= 0) throw std::domain_error("no fiber structure (period <= 0)");
  const int N = fs.quadrature_points;
  const int ax = fs.fiber_axis;
  const double L = fs.period;
  auto upi_fn = [u, N, ax, L](const ChartPoint& p, int order) {
    // trapezoid on the closed orbit = equal-weight periodic rule (spectral accuracy)
    Jet acc(order);
    for (int i = 0; i < N; ++i) {
      ChartPoint q = p;
      q.x[ax] = std::fmod(p.x[ax] + L * i / N, L);
      Jet j = u.jets(q, order);
      // the fiber derivative slots of the integrand average out; keep full jets
      acc += j;
    }
    return acc * (L / N);
  };
  ScalarField upi{upi_fn};
  auto uperp_fn = [u, upi, L](const ChartPoint& p, int order) {
    return u.jets(p, order) - upi.jets(p, order) * (1.0 / L);
  };
  return FiberDecomposition{upi, ScalarField{uperp_fn}};
}

namespace {

struct FrameScales {
  // model orthonormal frame scale per coordinate axis, used to compare tensor
  // components at nearby points (the g0-frame choice documented in the module notes)
  std::array<double, kDim> s;
};

FrameScales frame_scales(const MetricField& g, const ChartPoint& p) {
  Mat4 gv = g.values(p);
  FrameScales f;
  for (int i = 0; i < kDim; ++i) f.s[i] = std::sqrt(std::max(gv[i][i], 1e-300));
  return f;
}

double scalar_terms(const ScalarField& s, const MetricField& g, const ChartPoint& p, int k,
                    Mat4* ginv_out) {
  // sum_{i<=k} rho^i |nabla^i s|_g   (k <= 2)
  auto mj = detail::metric_jets(g, p, std::max(1, k));
  Mat4 ginv;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) ginv[i][j] = mj.ginv[i][j].value();
  if (ginv_out) *ginv_out = ginv;
  const double rho = g.rho(p);
  Jet uj = s.jets(p, k);
  double total = std::abs(uj.value());
  if (k >= 1) {
    Vec4 du;
    for (int i = 0; i < kDim; ++i) du[i] = uj.d(i).value();
    total += rho * pointwise_norm1(du, ginv);
  }
  if (k >= 2) {
    Mat4 hess = hessian(g, s, p);
    total += rho * rho * pointwise_norm2(hess, ginv);
  }
  return total;
}

double tensor_terms(const SymTwoTensorField& s, const MetricField& g, const ChartPoint& p,
                    int k) {
  auto mj = detail::metric_jets(g, p, std::max(1, k));
  Mat4 ginv;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) ginv[i][j] = mj.ginv[i][j].value();
  const double rho = g.rho(p);
  JetMat hj = s.jets(p, k);
  Mat4 hv;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) hv[i][j] = hj[i][j].value();
  double total = pointwise_norm2(hv, ginv);
  if (k >= 1) {
    auto ch = detail::christoffel_jets(mj);
    Jet nb[kDim][kDim][kDim];
    detail::covder2(ch, hj, nb);
    double nrm2 = 0;
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b)
        for (int c = 0; c < kDim; ++c)
          for (int a2 = 0; a2 < kDim; ++a2)
            for (int b2 = 0; b2 < kDim; ++b2)
              for (int c2 = 0; c2 < kDim; ++c2)
                nrm2 += ginv[a][a2] * ginv[b][b2] * ginv[c][c2] * nb[a][b][c].value() *
                        nb[a2][b2][c2].value();
    total += rho * std::sqrt(std::max(0.0, nrm2));
  }
  return total;
}

ChartPoint sample_point(const MetricField& g, Pcg32& rng, double rho_lo, double rho_hi) {
  const auto& dom = g.domain(g.default_chart());
  const auto& fr = g.frame();
  ChartPoint p;
  p.chart = g.default_chart();
  for (int i = 0; i < kDim; ++i)
    p.x[i] = dom.sample_lo[i] + rng.uniform() * (dom.sample_hi[i] - dom.sample_lo[i]);
  // place the radial coordinate to hit the requested rho stratum
  const double target = rng.uniform(rho_lo, rho_hi);
  const double lo = dom.lo[fr.radial_axis] + 2 * dom.margin[fr.radial_axis];
  p.x[fr.radial_axis] = std::max(lo, target);
  return p;
}

template <class Terms, class HolderDiff>
WeightedNormEstimate norm_estimate(const MetricField& g, double tau, int k, double alpha,
                                   const SamplerConfig& cfg, Terms&& terms,
                                   HolderDiff&& holder_diff) {
  Pcg32 rng(cfg.seed);
  WeightedNormEstimate est;
  est.tau = tau; est.k = k; est.alpha = alpha;
  est.argmax_point = ChartPoint{g.default_chart(), {}};
  auto eval_at = [&](const ChartPoint& p) -> double {
    const double rho = g.rho(p);
    double v = terms(p);
    // Holder seminorm over pairs at dyadic separations inside B_{rho/2}(x),
    // distances measured in the model metric (module-notes choice)
    double sem = 0;
    for (int pair = 0; pair < cfg.holder_pairs; ++pair) {
      const double dist = rho * 0.5 * std::pow(2.0, -(pair % 6));
      ChartPoint q = p;
      // random direction in the (radial, polar) plane; periodic directions are
      // isometries for every catalog field and add nothing to the seminorm
      const double ang = rng.uniform(0, 2 * M_PI);
      FrameScales fs = frame_scales(g, p);
      const auto& fr = g.frame();
      q.x[fr.radial_axis] += dist * std::cos(ang) / fs.s[fr.radial_axis];
      q.x[fr.polar_axis] += dist * std::sin(ang) / fs.s[fr.polar_axis];
      const auto& dom = g.domain(p.chart);
      if (!dom.contains(q.x)) continue;
      const double diff = holder_diff(p, q);
      sem = std::max(sem, diff / std::pow(dist, alpha));
    }
    return std::pow(rho, tau) * (v + std::pow(rho, k + alpha) * sem);
  };
  for (int s = 0; s < cfg.strata; ++s) {
    const double lo = cfg.rho0 * std::pow(2.0, s);
    const double hi = cfg.rho0 * std::pow(2.0, s + 1);
    for (int i = 0; i < cfg.samples_per_stratum; ++i) {
      ChartPoint p = sample_point(g, rng, lo, hi);
      double v;
      try {
        v = eval_at(p);
      } catch (const DomainError&) {
        continue;
      }
      ++est.sample_count;
      if (v > est.sup_value) {
        est.sup_value = v;
        est.argmax_point = p;
      }
    }
  }
  // radial-ray refinement around the running argmax
  ChartPoint best = est.argmax_point;
  double radius = 0.2;
  for (int round = 0; round < cfg.refine_rounds; ++round) {
    for (int i = 0; i < cfg.samples_per_stratum / 2; ++i) {
      ChartPoint p = best;
      const auto& fr = g.frame();
      p.x[fr.radial_axis] *= (1.0 + radius * (rng.uniform() - 0.5));
      p.x[fr.polar_axis] += radius * (rng.uniform() - 0.5);
      const auto& dom = g.domain(p.chart);
      if (!dom.contains(p.x)) continue;
      double v;
      try {
        v = eval_at(p);
      } catch (const DomainError&) {
        continue;
      }
      ++est.sample_count;
      if (v > est.sup_value) {
        est.sup_value = v;
        est.argmax_point = p;
        best = p;
      }
    }
    radius *= 0.5;
  }
  return est;
}

}  // namespace

WeightedNormEstimate weighted_holder_norm(const ScalarField& s, const MetricField& g,
                                          double tau, int k, double alpha,
                                          const SamplerConfig& cfg) {
  if (k > 2) throw std::out_of_range("insufficient jet order for k > 2 norms");
  auto terms = [&](const ChartPoint& p) { return scalar_terms(s, g, p, k, nullptr); };
  auto hdiff = [&](const ChartPoint& p, const ChartPoint& q) {
    if (k == 0) return std::abs(s.value(p) - s.value(q));
    // compare the k-th derivative data componentwise in the model frame
    Jet jp = s.jets(p, k), jq = s.jets(q, k);
    FrameScales fp = frame_scales(g, p);
    double d = 0;
    if (k == 1) {
      for (int i = 0; i < kDim; ++i)
        d = std::max(d, std::abs(jp.d(i).value() - jq.d(i).value()) / fp.s[i]);
    } else {
      for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
          d = std::max(d, std::abs(jp.d(i).d(j).value() - jq.d(i).d(j).value()) /
                              (fp.s[i] * fp.s[j]));
    }
    return d;
  };
  return norm_estimate(g, tau, k, alpha, cfg, terms, hdiff);
}

WeightedNormEstimate weighted_holder_norm(const SymTwoTensorField& s, const MetricField& g,
                                          double tau, int k, double alpha,
                                          const SamplerConfig& cfg) {
  if (k > 1) throw std::out_of_range("insufficient jet order for k > 1 tensor norms");
  auto terms = [&](const ChartPoint& p) { return tensor_terms(s, g, p, k); };
  auto hdiff = [&](const ChartPoint& p, const ChartPoint& q) {
    Mat4 a = s.values(p), b = s.values(q);
    FrameScales fp = frame_scales(g, p);
    double d = 0;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        d = std::max(d, std::abs(a[i][j] - b[i][j]) / (fp.s[i] * fp.s[j]));
    return d;
  };
  return norm_estimate(g, tau, k, alpha, cfg, terms, hdiff);
}

namespace {

template <class SupFn>
DecayFit decay_fit_impl(const MetricField& g, const std::vector<double>& radii, SupFn&& supfn) {
  if (radii.size() < 4 || radii.back() / radii.front() < 10.0)
    throw std::domain_error("decay fit needs >= 4 radii spanning a decade");
  for (size_t i = 1; i < radii.size(); ++i)
    if (radii[i] <= radii[i - 1]) throw std::domain_error("radius grid must be increasing");
  DecayFit fit;
  fit.radii_used = radii;
  std::vector<double> lx, ly;
  for (double R : radii) {
    const double v = supfn(R);
    if (v < 1e-280) continue;
    lx.push_back(std::log(R));
    ly.push_back(std::log(v));
  }
  if (lx.size() < 2) {
    fit.vanishes = true;
    fit.estimated_order = std::numeric_limits<double>::infinity();
    return fit;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(lx.size());
  for (size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double res = 0;
  for (size_t i = 0; i < lx.size(); ++i)
    res = std::max(res, std::abs(ly[i] - slope * lx[i] - icpt));
  fit.estimated_order = -slope;
  fit.fit_residual = res;
  return fit;
}

}  // namespace

DecayFit decay_order_fit(const ScalarField& s, const MetricField& g,
                         const std::vector<double>& radii, int angular_samples) {
  auto supfn = [&](double R) {
    double v = 0;
    const auto& dom = g.domain(g.default_chart());
    const auto& fr = g.frame();
    for (int i = 0; i < angular_samples; ++i) {
      ChartPoint p{g.default_chart(), {}};
      for (int k = 0; k < kDim; ++k) p.x[k] = 0.5 * (dom.sample_lo[k] + dom.sample_hi[k]);
      p.x[fr.radial_axis] = R;
      const double lo = dom.lo[fr.polar_axis] + 2 * dom.margin[fr.polar_axis];
      const double hi = dom.hi[fr.polar_axis] - 2 * dom.margin[fr.polar_axis];
      p.x[fr.polar_axis] = lo + (hi - lo) * (i + 0.5) / angular_samples;
      v = std::max(v, std::abs(s.value(p)));
    }
    return v;
  };
  return decay_fit_impl(g, radii, supfn);
}

DecayFit decay_order_fit(const SymTwoTensorField& s, const MetricField& g,
                         const std::vector<double>& radii, int angular_samples) {
  auto supfn = [&](double R) {
    double v = 0;
    const auto& dom = g.domain(g.default_chart());
    const auto& fr = g.frame();
    for (int i = 0; i < angular_samples; ++i) {
      ChartPoint p{g.default_chart(), {}};
      for (int k = 0; k < kDim; ++k) p.x[k] = 0.5 * (dom.sample_lo[k] + dom.sample_hi[k]);
      p.x[fr.radial_axis] = R;
      const double lo = dom.lo[fr.polar_axis] + 2 * dom.margin[fr.polar_axis];
      const double hi = dom.hi[fr.polar_axis] - 2 * dom.margin[fr.polar_axis];
      p.x[fr.polar_axis] = lo + (hi - lo) * (i + 0.5) / angular_samples;
      Mat4 ginv = invert(g.values(p));
      v = std::max(v, pointwise_norm2(s.values(p), ginv));
    }
    return v;
  };
  return decay_fit_impl(g, radii, supfn);
}

DecayFit decay_order_fit_metric_diff(const MetricField& g, const MetricField& g_ref,
                                     const std::vector<double>& radii, int angular_samples) {
  SymTwoTensorField diff{[&g, &g_ref](const ChartPoint& p, int order) {
    JetMat a = g.components(p, order);
    JetMat b = g_ref.components(p, order);
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) a[i][j] -= b[i][j];
    return a;
  }};
  auto supfn = [&](double R) {
    double v = 0;
    const auto& dom = g.domain(g.default_chart());
    const auto& fr = g.frame();
    for (int i = 0; i < angular_samples; ++i) {
      ChartPoint p{g.default_chart(), {}};
      for (int k = 0; k < kDim; ++k) p.x[k] = 0.5 * (dom.sample_lo[k] + dom.sample_hi[k]);
      p.x[fr.radial_axis] = R;
      const double lo = dom.lo[fr.polar_axis] + 2 * dom.margin[fr.polar_axis];
      const double hi = dom.hi[fr.polar_axis] - 2 * dom.margin[fr.polar_axis];
      p.x[fr.polar_axis] = lo + (hi - lo) * (i + 0.5) / angular_samples;
      Mat4 ginv = invert(g_ref.values(p));
      v = std::max(v, pointwise_norm2(diff.values(p), ginv));
    }
    return v;
  };
  return decay_fit_impl(g, radii, supfn);
}

std::string exceptional_values(int m) {
  if (m < 3) throw std::domain_error("exceptional values need m >= 3");
  return "Z \\ (0, " + std::to_string(m - 2) + ")";
}

bool is_exceptional(double tau, int m) {
  if (m < 3) throw std::domain_error("exceptional values need m >= 3");
  const double r = std::round(tau);
  if (std::abs(tau - r) > 1e-12) return false;
  return !(r > 0.0 && r < double(m - 2));
}

namespace {
long binom(long n, long k) {
  if (n < 0 || k < 0 || k > n) return 0;
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
}  // namespace

long harmonic_poly_dim(int m, int k) {
  if (m < 1 || k < 0) throw std::domain_error("harmonic_poly_dim needs m >= 1, k >= 0");
  return binom(m + k - 1, m - 1) - binom(m + k - 3, m - 1);
}

HardyEstimate hardy_constant_estimate(const MetricField& g, double r0, double r1, int grid) {
  // radial P1 Rayleigh quotient: K phi = lambda M phi with
  // K_ij = int p(r) phi_i' phi_j',  M_ij = int w(r) rho^-2 phi_i phi_j,
  // p = sqrt(g) g^{rr} / sin th, w = sqrt(g) / sin th at a reference polar angle.
  auto coeffs = [&](double r) {
    ChartPoint p{g.default_chart(), {}};
    const auto& dom = g.domain(g.default_chart());
    for (int k = 0; k < kDim; ++k) p.x[k] = 0.5 * (dom.sample_lo[k] + dom.sample_hi[k]);
    p.x[g.frame().radial_axis] = r;
    p.x[g.frame().polar_axis] = M_PI / 2;
    auto mj = detail::metric_jets(g, p, 0);
    const double sg = mj.sqrtg.value();
    const double grr = mj.ginv[g.frame().radial_axis][g.frame().radial_axis].value();
    const double rho = g.rho(p);
    return std::pair<double, double>{sg * grr, sg / (rho * rho)};
  };
  auto solve = [&](int n, int* iters) {
    const double h = (r1 - r0) / (n + 1);
    std::vector<double> Kd(n, 0), Ko(n - 1, 0), Md(n, 0), Mo(n - 1, 0);
    // 2-point Gauss per element
    const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
    for (int e = 0; e <= n; ++e) {
      const double a = r0 + e * h;
      for (double t : gp) {
        const double r = a + t * h;
        auto [pc, wc] = coeffs(r);
        const double wgt = 0.5 * h;
        // basis: node e-1 has value (1-t), node e has value t on this element
        const double dphi = 1.0 / h;
        if (e >= 1 && e <= n) {
          Kd[e - 1] += wgt * pc * dphi * dphi;
          Md[e - 1] += wgt * wc * (1 - t) * (1 - t);
        }
        if (e >= 0 && e <= n - 1) {
          Kd[e] += wgt * pc * dphi * dphi;
          Md[e] += wgt * wc * t * t;
        }
        if (e >= 1 && e <= n - 1) {
          Ko[e - 1] += wgt * pc * (-dphi) * dphi;
          Mo[e - 1] += wgt * wc * (1 - t) * t;
        }
      }
    }
    // inverse power iteration on K x = lambda M x
    std::vector<double> x(n, 1.0), y(n);
    double lam = 0;
    int it = 0;
    for (; it < 500; ++it) {
      // y = M x
      for (int i = 0; i < n; ++i) {
        y[i] = Md[i] * x[i];
        if (i > 0) y[i] += Mo[i - 1] * x[i - 1];
        if (i < n - 1) y[i] += Mo[i] * x[i + 1];
      }
      // solve K z = y (Thomas)
      std::vector<double> c(n - 1), d(n), z(n);
      double den = Kd[0];
      d[0] = y[0] / den;
      for (int i = 1; i < n; ++i) {
        c[i - 1] = Ko[i - 1] / den;
        den = Kd[i] - Ko[i - 1] * c[i - 1];
        d[i] = (y[i] - Ko[i - 1] * d[i - 1]) / den;
      }
      z[n - 1] = d[n - 1];
      for (int i = n - 2; i >= 0; --i) z[i] = d[i] - c[i] * z[i + 1];
      // Rayleigh quotient
      double xKx = 0, xMx = 0;
      for (int i = 0; i < n; ++i) {
        double Kz = Kd[i] * z[i];
        double Mz = Md[i] * z[i];
        if (i > 0) { Kz += Ko[i - 1] * z[i - 1]; Mz += Mo[i - 1] * z[i - 1]; }
        if (i < n - 1) { Kz += Ko[i] * z[i + 1]; Mz += Mo[i] * z[i + 1]; }
        xKx += z[i] * Kz;
        xMx += z[i] * Mz;
      }
      const double lam_new = xKx / xMx;
      const double nz = std::sqrt(xMx);
      for (int i = 0; i < n; ++i) x[i] = z[i] / nz;
      if (std::abs(lam_new - lam) < 1e-13 * std::abs(lam_new) && it > 3) {
        lam = lam_new;
        break;
      }
      lam = lam_new;
    }
    if (it >= 500) throw std::runtime_error("Hardy eigeniteration did not converge");
    if (iters) *iters = it;
    return lam;
  };
  HardyEstimate est;
  est.grid = grid;
  const double coarse = solve(grid / 2, nullptr);
  est.value = solve(grid, &est.iterations);
  est.error_estimate = std::abs(coarse - est.value);
  return est;
}

}  // namespace alflab
