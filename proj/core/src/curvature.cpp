#include "alflab/curvature.hpp"

#include <cmath>

namespace alflab {
namespace detail {

MetricJets metric_jets(const MetricField& m, const ChartPoint& p, int order) {
  MetricJets mj;
  mj.order = order;
  mj.g = m.components(p, order);
  mj.ginv = jet_invert(mj.g, order);
  mj.sqrtg = jet_det(mj.g, order).sqrt();
  return mj;
}

ChristoffelJets christoffel_jets(const MetricJets& mj) {
  ChristoffelJets ch;
  const int o = mj.order - 1;
  ch.order = o;
  Jet dg[kDim][kDim][kDim];
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) dg[i][j][k] = mj.g[i][j].d(k);
  for (int k = 0; k < kDim; ++k)
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j) {
        Jet s(o);
        for (int l = 0; l < kDim; ++l)
          s += mj.ginv[k][l].truncated(o) * (dg[i][l][j] + dg[j][l][i] - dg[i][j][l]);
        ch.G[k][i][j] = s * 0.5;
        ch.G[k][j][i] = ch.G[k][i][j];
      }
  return ch;
}

void covder2(const ChristoffelJets& ch, const JetMat& T, Jet out[kDim][kDim][kDim]) {
  const int o = std::min(ch.order, T[0][0].order() - 1);
  for (int k = 0; k < kDim; ++k)
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) {
        Jet s = T[i][j].d(k).truncated(o);
        for (int p = 0; p < kDim; ++p)
          s -= ch.G[p][k][i].truncated(o) * T[p][j].truncated(o) +
               ch.G[p][k][j].truncated(o) * T[i][p].truncated(o);
        out[k][i][j] = s;
      }
}

namespace {
struct Eps4 {
  int perm[24][4];
  int sign[24];
  Eps4() {
    int idx = 0;
    int a[4];
    for (a[0] = 0; a[0] < 4; ++a[0])
      for (a[1] = 0; a[1] < 4; ++a[1])
        for (a[2] = 0; a[2] < 4; ++a[2])
          for (a[3] = 0; a[3] < 4; ++a[3]) {
            bool distinct = true;
            for (int i = 0; i < 4 && distinct; ++i)
              for (int j = i + 1; j < 4; ++j)
                if (a[i] == a[j]) { distinct = false; break; }
            if (!distinct) continue;
            int s = 1;
            for (int i = 0; i < 4; ++i)
              for (int j = i + 1; j < 4; ++j)
                if (a[i] > a[j]) s = -s;
            for (int i = 0; i < 4; ++i) perm[idx][i] = a[i];
            sign[idx] = s;
            ++idx;
          }
  }
};
const Eps4& eps4() {
  static const Eps4 e;
  return e;
}
}  // namespace

JetMat star2(const JetMat& om, const MetricJets& mj, int orient, int order) {
  JetMat out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) out[i][j] = Jet::constant(0.0, order);
  const auto& E = eps4();
  Jet sg = mj.sqrtg.truncated(order);
  for (int p = 0; p < 24; ++p) {
    const int a = E.perm[p][0], b = E.perm[p][1], c = E.perm[p][2], d = E.perm[p][3];
    Jet acc(order);
    for (int cp = 0; cp < kDim; ++cp)
      for (int dp = 0; dp < kDim; ++dp) {
        acc += mj.ginv[c][cp].truncated(order) * mj.ginv[d][dp].truncated(order) *
               om[cp][dp].truncated(order);
      }
    out[a][b] += acc * sg * (0.5 * E.sign[p] * orient);
  }
  return out;
}

}  // namespace detail

using detail::ChristoffelJets;
using detail::MetricJets;

namespace {

/// Riemann (all indices down) values plus objects reused downstream.
struct RiemannData {
  double R[kDim][kDim][kDim][kDim];
  Mat4 g, ginv;
  Mat4 ric;
  double scalar;
  MetricJets mj;
  ChristoffelJets ch;
};

RiemannData riemann_data(const MetricField& m, const ChartPoint& p, int order = 2) {
  RiemannData rd = {.R = {}, .g = {}, .ginv = {}, .ric = {}, .scalar = 0.0,
                    .mj = detail::metric_jets(m, p, order),
                    .ch = {}};
  rd.ch = detail::christoffel_jets(rd.mj);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      rd.g[i][j] = rd.mj.g[i][j].value();
      rd.ginv[i][j] = rd.mj.ginv[i][j].value();
    }
  double Rud[kDim][kDim][kDim][kDim];
  for (int mi = 0; mi < kDim; ++mi)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) {
          double s = rd.ch.G[mi][l][j].d(k).value() - rd.ch.G[mi][k][j].d(l).value();
          for (int q = 0; q < kDim; ++q)
            s += rd.ch.G[mi][k][q].value() * rd.ch.G[q][l][j].value() -
                 rd.ch.G[mi][l][q].value() * rd.ch.G[q][k][j].value();
          Rud[mi][j][k][l] = s;
        }
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) {
          double s = 0;
          for (int mi = 0; mi < kDim; ++mi) s += rd.g[i][mi] * Rud[mi][j][k][l];
          rd.R[i][j][k][l] = s;
        }
  for (int j = 0; j < kDim; ++j)
    for (int l = 0; l < kDim; ++l) {
      double s = 0;
      for (int k = 0; k < kDim; ++k) s += Rud[k][j][k][l];
      rd.ric[j][l] = s;
    }
  rd.scalar = trace(rd.ric, rd.ginv);
  return rd;
}

/// W+ operator matrix in an orthonormal coframe; eigenvalues with the convention
/// pinned by the catalog closed forms (type-D spectrum {-l/2, -l/2, l}).
std::array<std::array<double, 3>, 3> weyl_plus_matrix(const RiemannData& rd, int orient) {
  // Weyl = Riemann - Kulkarni-Nomizu corrections (vanish when Ricci-flat)
  double W[kDim][kDim][kDim][kDim];
  const auto& g = rd.g;
  const auto& ric = rd.ric;
  const double sc = rd.scalar;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) {
          double kn = (g[i][k] * ric[j][l] - g[i][l] * ric[j][k] -
                       g[j][k] * ric[i][l] + g[j][l] * ric[i][k]) / 2.0;
          double sg = sc * (g[i][k] * g[j][l] - g[i][l] * g[j][k]) / 6.0;
          W[i][j][k][l] = rd.R[i][j][k][l] - kn + sg;
        }
  // orthonormal coframe E with E^T E = g via Cholesky (orientation-preserving)
  Mat4 L{};  // lower-triangular, g = L L^T
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = g[i][j];
      for (int k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
      L[i][j] = (i == j) ? std::sqrt(s) : s / L[j][j];
    }
  // E = L^T, coframe theta^A = E[A][i] dx^i; need dx^i = Einv[i][A] theta^A
  Mat4 E{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) E[i][j] = L[j][i];
  Mat4 Einv = invert(E);
  double Wf[kDim][kDim][kDim][kDim] = {};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double s = 0;
          for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
              for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l)
                  s += W[i][j][k][l] * Einv[i][a] * Einv[j][b] * Einv[k][c] * Einv[l][d];
          Wf[a][b][c][d] = s;
        }
  // self-dual frame 2-form combos
  const int o = orient;
  int pairs[3][2][2] = {{{0, 1}, {2, 3}}, {{0, 2}, {1, 3}}, {{0, 3}, {1, 2}}};
  int s2[3] = {o, -o, o};
  double F[3][kDim][kDim] = {};
  for (int A = 0; A < 3; ++A) {
    F[A][pairs[A][0][0]][pairs[A][0][1]] = 1;
    F[A][pairs[A][0][1]][pairs[A][0][0]] = -1;
    F[A][pairs[A][1][0]][pairs[A][1][1]] = s2[A];
    F[A][pairs[A][1][1]][pairs[A][1][0]] = -s2[A];
  }
  std::array<std::array<double, 3>, 3> M{};
  for (int A = 0; A < 3; ++A)
    for (int B = 0; B < 3; ++B) {
      double s = 0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          for (int c = 0; c < 4; ++c)
            for (int d = 0; d < 4; ++d) s += Wf[a][b][c][d] * F[A][a][b] * F[B][c][d];
      M[A][B] = s / 4.0;
    }
  return M;
}

}  // namespace

CurvatureBundle curvature_at(const MetricField& m, const ChartPoint& p) {
  RiemannData rd = riemann_data(m, p);
  CurvatureBundle b;
  b.point = p;
  for (int k = 0; k < kDim; ++k)
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) b.christoffel[k][i][j] = rd.ch.G[k][i][j].value();
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) b.riemann[i][j][k][l] = rd.R[i][j][k][l];
  b.ricci = rd.ric;
  b.scalar = rd.scalar;
  auto M = weyl_plus_matrix(rd, m.orientation(p.chart));
  b.weyl_plus_eigenvalues = sym3_eigenvalues(M);
  const auto& e = b.weyl_plus_eigenvalues;
  // simple eigenvalue of the type-D spectrum: the one farthest from the other two
  const double d01 = std::abs(e[0] - e[1]), d12 = std::abs(e[1] - e[2]);
  b.weyl_plus_simple = (d01 > d12) ? e[0] : e[2];
  return b;
}

Mat4 ricci_tensor(const MetricField& m, const ChartPoint& p) {
  return riemann_data(m, p).ric;
}

double scalar_curvature(const MetricField& m, const ChartPoint& p) {
  return riemann_data(m, p).scalar;
}

Jet scalar_curvature_jets(const MetricField& m, const ChartPoint& p, int order) {
  MetricJets mj = detail::metric_jets(m, p, order + 2);
  ChristoffelJets ch = detail::christoffel_jets(mj);
  Jet sc = Jet::constant(0.0, order);
  for (int j = 0; j < kDim; ++j)
    for (int l = 0; l < kDim; ++l) {
      Jet ric(order);
      for (int k = 0; k < kDim; ++k) {
        Jet s = ch.G[k][l][j].d(k).truncated(order) - ch.G[k][k][j].d(l).truncated(order);
        for (int q = 0; q < kDim; ++q)
          s += ch.G[k][k][q].truncated(order) * ch.G[q][l][j].truncated(order) -
               ch.G[k][l][q].truncated(order) * ch.G[q][k][j].truncated(order);
        ric += s;
      }
      sc += mj.ginv[j][l].truncated(order) * ric;
    }
  return sc;
}

double contracted_bianchi_residual(const MetricField& m, const ChartPoint& p) {
  // nabla_j R - 2 (div Ric)_j, computed from order-3 metric jets
  MetricJets mj = detail::metric_jets(m, p, 3);
  ChristoffelJets ch = detail::christoffel_jets(mj);  // order-2 jets
  // Ricci as order-1 jets
  JetMat ric;
  for (int j = 0; j < kDim; ++j)
    for (int l = 0; l < kDim; ++l) {
      Jet s(1);
      for (int k = 0; k < kDim; ++k) {
        Jet t = ch.G[k][l][j].d(k).truncated(1) - ch.G[k][k][j].d(l).truncated(1);
        for (int q = 0; q < kDim; ++q)
          t += ch.G[k][k][q].truncated(1) * ch.G[q][l][j].truncated(1) -
               ch.G[k][l][q].truncated(1) * ch.G[q][k][j].truncated(1);
        s += t;
      }
      ric[j][l] = s;
    }
  // scalar jets
  Jet sc(1);
  for (int j = 0; j < kDim; ++j)
    for (int l = 0; l < kDim; ++l) sc += mj.ginv[j][l].truncated(1) * ric[j][l];
  // div Ric
  Jet nr[kDim][kDim][kDim];
  detail::covder2(ch, ric, nr);
  Vec4 res;
  for (int j = 0; j < kDim; ++j) {
    double divr = 0;
    for (int i = 0; i < kDim; ++i)
      for (int k = 0; k < kDim; ++k) divr += mj.ginv[i][k].value() * nr[i][k][j].value();
    res[j] = sc.d(j).value() - 2.0 * divr;
  }
  Mat4 ginv;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) ginv[i][j] = mj.ginv[i][j].value();
  return pointwise_norm1(res, ginv);
}

double riemann_symmetry_residual(const MetricField& m, const ChartPoint& p) {
  RiemannData rd = riemann_data(m, p);
  double scale = 0, res = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          scale = std::max(scale, std::abs(rd.R[i][j][k][l]));
          res = std::max(res, std::abs(rd.R[i][j][k][l] + rd.R[j][i][k][l]));
          res = std::max(res, std::abs(rd.R[i][j][k][l] - rd.R[k][l][i][j]));
          res = std::max(res,
                         std::abs(rd.R[i][j][k][l] + rd.R[i][k][l][j] + rd.R[i][l][j][k]));
        }
  return scale > 0 ? res / scale : res;
}

double laplace_beltrami(const MetricField& m, const ScalarField& u, const ChartPoint& p) {
  MetricJets mj = detail::metric_jets(m, p, 1);
  ChristoffelJets ch = detail::christoffel_jets(mj);
  Jet uj = u.jets(p, 2);
  double s = 0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double hess = uj.d(i).d(j).value();
      for (int k = 0; k < kDim; ++k) hess -= ch.G[k][i][j].value() * uj.d(k).value();
      s += mj.ginv[i][j].value() * hess;
    }
  return s;
}

Mat4 hessian(const MetricField& m, const ScalarField& u, const ChartPoint& p) {
  auto j = hessian_jets(m, u, p, 0);
  Mat4 r;
  for (int i = 0; i < kDim; ++i)
    for (int k = 0; k < kDim; ++k) r[i][k] = j[i][k].value();
  return r;
}

JetMat hessian_jets(const MetricField& m, const ScalarField& u, const ChartPoint& p, int order) {
  MetricJets mj = detail::metric_jets(m, p, order + 1);
  ChristoffelJets ch = detail::christoffel_jets(mj);
  Jet uj = u.jets(p, order + 2);
  JetMat out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      Jet s = uj.d(i).d(j).truncated(order);
      for (int k = 0; k < kDim; ++k)
        s -= ch.G[k][i][j].truncated(order) * uj.d(k).truncated(order);
      out[i][j] = s;
    }
  return out;
}

Vec4 divergence_sym2(const MetricField& m, const SymTwoTensorField& h, const ChartPoint& p) {
  MetricJets mj = detail::metric_jets(m, p, 1);
  ChristoffelJets ch = detail::christoffel_jets(mj);
  JetMat hj = h.jets(p, 1);
  Jet nb[kDim][kDim][kDim];
  detail::covder2(ch, hj, nb);
  Vec4 out;
  for (int j = 0; j < kDim; ++j) {
    double s = 0;
    for (int i = 0; i < kDim; ++i)
      for (int k = 0; k < kDim; ++k) s += mj.ginv[i][k].value() * nb[i][k][j].value();
    out[j] = s;
  }
  return out;
}

Vec4 weighted_divergence(const MetricField& m, const ScalarField& f, const SymTwoTensorField& h,
                         const ChartPoint& p) {
  Vec4 d = divergence_sym2(m, h, p);
  MetricJets mj = detail::metric_jets(m, p, 0);
  Jet fj = f.jets(p, 1);
  Mat4 hv = h.values(p);
  for (int j = 0; j < kDim; ++j) {
    double s = 0;
    for (int i = 0; i < kDim; ++i)
      for (int k = 0; k < kDim; ++k)
        s += hv[j][i] * mj.ginv[i][k].value() * fj.d(k).value();
    d[j] -= s;
  }
  return d;
}

JetMat div_star_traceless_jets(const MetricField& m, const OneFormField& w, const ChartPoint& p,
                               int order) {
  MetricJets mj = detail::metric_jets(m, p, order + 1);
  ChristoffelJets ch = detail::christoffel_jets(mj);
  JetVec wj = w.jets(p, order + 1);
  JetMat sym;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      Jet di = wj[j].d(i).truncated(order);
      Jet dj = wj[i].d(j).truncated(order);
      Jet s = (di + dj) * 0.5;
      for (int k = 0; k < kDim; ++k)
        s -= ch.G[k][i][j].truncated(order) * wj[k].truncated(order);
      sym[i][j] = s;
    }
  Jet divw(order);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) divw += mj.ginv[i][j].truncated(order) * sym[i][j];
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      sym[i][j] -= divw * mj.g[i][j].truncated(order) * 0.25;
  return sym;
}

Mat4 div_star_traceless(const MetricField& m, const OneFormField& w, const ChartPoint& p) {
  auto j = div_star_traceless_jets(m, w, p, 0);
  Mat4 r;
  for (int i = 0; i < kDim; ++i)
    for (int k = 0; k < kDim; ++k) r[i][k] = j[i][k].value();
  return r;
}

Mat4 lichnerowicz(const MetricField& m, const SymTwoTensorField& h, const ChartPoint& p) {
  RiemannData rd = riemann_data(m, p, 3);
  JetMat hj = h.jets(p, 2);
  // first covariant derivative (jets order 1)
  Jet T[kDim][kDim][kDim];
  detail::covder2(rd.ch, hj, T);
  // second covariant derivative, contracted
  Mat4 lap{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double s = 0;
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) {
          double nab2 = T[l][i][j].d(k).value();
          for (int q = 0; q < kDim; ++q)
            nab2 -= rd.ch.G[q][k][l].value() * T[q][i][j].value() +
                    rd.ch.G[q][k][i].value() * T[l][q][j].value() +
                    rd.ch.G[q][k][j].value() * T[l][i][q].value();
          s += rd.ginv[k][l] * nab2;
        }
      lap[i][j] = s;
    }
  Mat4 hv;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) hv[i][j] = hj[i][j].value();
  Mat4 hup = raise_both(hv, rd.ginv);
  Mat4 out{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double rm = 0;
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) rm += rd.R[i][k][j][l] * hup[k][l];
      double ric_h = 0;
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l)
          ric_h += rd.ric[i][k] * rd.ginv[k][l] * hv[l][j] +
                   hv[i][k] * rd.ginv[k][l] * rd.ric[l][j];
      out[i][j] = lap[i][j] + 2.0 * rm - ric_h;
    }
  return out;
}

Mat4 lie_derivative_metric(const MetricField& m, const VectorField& X, const ChartPoint& p) {
  MetricJets mj = detail::metric_jets(m, p, 1);
  ChristoffelJets ch = detail::christoffel_jets(mj);
  JetVec Xj = X.jets(p, 1);
  // lower X with jets: X_i = g_{ik} X^k
  JetVec Xl;
  for (int i = 0; i < kDim; ++i) {
    Jet s(1);
    for (int k = 0; k < kDim; ++k) s += mj.g[i][k].truncated(1) * Xj[k];
    Xl[i] = s;
  }
  Mat4 out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double di = Xl[j].d(i).value();
      double dj = Xl[i].d(j).value();
      for (int k = 0; k < kDim; ++k) {
        di -= ch.G[k][i][j].value() * Xl[k].value();
        dj -= ch.G[k][j][i].value() * Xl[k].value();
      }
      out[i][j] = di + dj;
    }
  return out;
}

std::array<double, 3> weyl_plus_eigenvalues(const MetricField& m, const ChartPoint& p) {
  RiemannData rd = riemann_data(m, p);
  return sym3_eigenvalues(weyl_plus_matrix(rd, m.orientation(p.chart)));
}

double weyl_plus_simple_eigenvalue(const MetricField& m, const ChartPoint& p) {
  auto e = weyl_plus_eigenvalues(m, p);
  const double d01 = std::abs(e[0] - e[1]), d12 = std::abs(e[1] - e[2]);
  return (d01 > d12) ? e[0] : e[2];
}

}  // namespace alflab
