#include "alflab/elliptic.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>

namespace alflab {

namespace {

std::vector<double> make_nodes(double r0, double r1, int n, double grade) {
  std::vector<double> r(n);
  if (grade == 1.0) {
    for (int i = 0; i < n; ++i) r[i] = r0 + (r1 - r0) * (i + 0.5) / n;
    return r;
  }
  // geometric spacing ratio `grade`, packed toward r0; staggered nodes
  double h0 = (r1 - r0) * (grade - 1.0) / (std::pow(grade, n) - 1.0);
  double edge = r0, h = h0;
  for (int i = 0; i < n; ++i) {
    r[i] = edge + 0.5 * h;
    edge += h;
    h *= grade;
  }
  return r;
}

}  // namespace

RadialSolution solve_radial(const RadialProblem& prob) {
  const int n = prob.n;
  std::vector<double> r = make_nodes(prob.r0, prob.r1, n, prob.grade);
  // staggered nodes: cell edges at midpoints, boundary edges at r0, r1
  std::vector<double> edge(n + 1);
  edge[0] = prob.r0;
  edge[n] = prob.r1;
  for (int i = 1; i < n; ++i) edge[i] = 0.5 * (r[i - 1] + r[i]);

  std::vector<double> diag(n, 0), lower(n - 1, 0), upper(n - 1, 0), rhs(n, 0);
  for (int i = 0; i < n; ++i) {
    const double cell = edge[i + 1] - edge[i];
    const double wi = prob.w(r[i]);
    // outgoing flux through edge i+1
    if (i < n - 1) {
      const double pe = prob.p(edge[i + 1]);
      const double h = r[i + 1] - r[i];
      const double c = pe / (h * wi * cell);
      diag[i] -= c;
      upper[i] += c;
    } else {
      switch (prob.outer.type) {
        case Bc::ZeroFlux: break;
        case Bc::Neumann: {
          const double pe = prob.p(edge[n]);
          rhs[i] -= pe * prob.outer.a / (wi * cell);
          break;
        }
        case Bc::Robin: {
          // u'(r1) = a u(r1) + b with u(r1) extrapolated from the last node:
          // u(r1) ~= u_i + (r1 - r_i) u'(r1)
          const double pe = prob.p(edge[n]);
          const double d = r[n - 1];
          const double dx = prob.r1 - d;
          const double den = 1.0 - prob.outer.a * dx;
          const double c = pe / (wi * cell);
          diag[i] += c * prob.outer.a / den;
          rhs[i] -= c * prob.outer.b / den;
          break;
        }
        case Bc::Dirichlet: {
          const double pe = prob.p(edge[n]);
          const double h = prob.r1 - r[i];
          const double c = pe / (h * wi * cell);
          diag[i] -= c;
          rhs[i] -= c * prob.outer.a;
          break;
        }
      }
    }
    // incoming flux through edge i
    if (i > 0) {
      const double pe = prob.p(edge[i]);
      const double h = r[i] - r[i - 1];
      const double c = pe / (h * wi * cell);
      diag[i] -= c;
      lower[i - 1] += c;
    } else {
      switch (prob.inner.type) {
        case Bc::ZeroFlux: break;
        case Bc::Neumann: {
          const double pe = prob.p(edge[0]);
          rhs[i] += pe * prob.inner.a / (wi * cell);
          break;
        }
        case Bc::Robin: {
          const double pe = prob.p(edge[0]);
          const double dx = r[0] - prob.r0;
          const double den = 1.0 + prob.inner.a * dx;
          const double c = pe / (wi * cell);
          diag[i] += c * prob.inner.a / den;
          rhs[i] += c * prob.inner.b / den;
          break;
        }
        case Bc::Dirichlet: {
          const double pe = prob.p(edge[0]);
          const double h = r[i] - prob.r0;
          const double c = pe / (h * wi * cell);
          diag[i] -= c;
          rhs[i] -= c * prob.inner.a;
          break;
        }
      }
    }
    diag[i] += prob.q(r[i]);
    rhs[i] += prob.f(r[i]);
  }

  // Thomas solve
  std::vector<double> c(n - 1), d(n), u(n);
  double den = diag[0];
  d[0] = rhs[0] / den;
  for (int i = 1; i < n; ++i) {
    c[i - 1] = upper[i - 1] / den;
    den = diag[i] - lower[i - 1] * c[i - 1];
    d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / den;
  }
  u[n - 1] = d[n - 1];
  for (int i = n - 2; i >= 0; --i) u[i] = d[i] - c[i] * u[i + 1];

  RadialSolution sol;
  sol.u = GridFunction1D(r, u);
  // 4th-order interior residual as an a-posteriori accuracy proxy
  double res = 0, scale = 1e-300;
  for (int i = 4; i < n - 4; ++i) {
    const double du = sol.u.eval(r[i], 1);
    const double x = r[i];
    const double hloc = r[i + 1] - r[i];
    const double dpu = (prob.p(x + hloc) * sol.u.eval(x + hloc, 1) -
                        prob.p(x - hloc) * sol.u.eval(x - hloc, 1)) / (2 * hloc);
    (void)du;
    const double lhs = dpu / prob.w(x) + prob.q(x) * u[i];
    res = std::max(res, std::abs(lhs - prob.f(x)));
    scale = std::max(scale, std::abs(prob.f(x)) + std::abs(prob.q(x) * u[i]) + std::abs(u[i]));
  }
  sol.residual = res / scale;
  return sol;
}

Solution2D solve_elliptic2d(const EllipticProblem2D& prob) {
  const int na = prob.na, nb = prob.nb;
  auto nodes_of = [](double lo, double hi, int n, const std::function<double(double)>& map) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
      const double t = (i + 0.5) / n;
      v[i] = map ? map(t) : lo + (hi - lo) * t;
    }
    return v;
  };
  auto edges_of = [](const std::vector<double>& nodes, double lo, double hi) {
    const int n = int(nodes.size());
    std::vector<double> e(n + 1);
    e[0] = lo;
    e[n] = hi;
    for (int i = 1; i < n; ++i) e[i] = 0.5 * (nodes[i - 1] + nodes[i]);
    return e;
  };
  std::vector<double> A = nodes_of(prob.a0, prob.a1, na, prob.map_a);
  std::vector<double> B = nodes_of(prob.b0, prob.b1, nb, prob.map_b);
  std::vector<double> Ea = edges_of(A, prob.a0, prob.a1);
  std::vector<double> Eb = edges_of(B, prob.b0, prob.b1);

  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> trips;
  trips.reserve(size_t(na) * nb * 5);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(na * nb);
  auto id = [nb](int i, int j) { return i * nb + j; };

  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      const double ca = Ea[i + 1] - Ea[i];
      const double cb = Eb[j + 1] - Eb[j];
      const double wij = prob.W(A[i], B[j]);
      double dcenter = 0;
      // a-direction fluxes
      if (i < na - 1) {
        const double pe = prob.Pa(Ea[i + 1], B[j]);
        const double c = pe / ((A[i + 1] - A[i]) * wij * ca);
        dcenter -= c;
        trips.emplace_back(id(i, j), id(i + 1, j), c);
      } else {
        const Bc& bc = prob.bc_a1;
        const double pe = prob.Pa(Ea[na], B[j]);
        if (bc.type == Bc::Robin) {
          const double dx = prob.a1 - A[i];
          const double den = 1.0 - bc.a * dx;
          dcenter += pe * bc.a / (den * wij * ca);
          rhs[id(i, j)] -= pe * bc.b / (den * wij * ca);
        } else if (bc.type == Bc::Dirichlet) {
          const double c = pe / ((prob.a1 - A[i]) * wij * ca);
          dcenter -= c;
          rhs[id(i, j)] -= c * bc.a;
        } else if (bc.type == Bc::Neumann) {
          rhs[id(i, j)] -= pe * bc.a / (wij * ca);
        }
      }
      if (i > 0) {
        const double pe = prob.Pa(Ea[i], B[j]);
        const double c = pe / ((A[i] - A[i - 1]) * wij * ca);
        dcenter -= c;
        trips.emplace_back(id(i, j), id(i - 1, j), c);
      } else {
        const Bc& bc = prob.bc_a0;
        const double pe = prob.Pa(Ea[0], B[j]);
        if (bc.type == Bc::Robin) {
          const double dx = A[0] - prob.a0;
          const double den = 1.0 + bc.a * dx;
          dcenter += pe * bc.a / (den * wij * ca);
          rhs[id(i, j)] += pe * bc.b / (den * wij * ca);
        } else if (bc.type == Bc::Dirichlet) {
          const double c = pe / ((A[0] - prob.a0) * wij * ca);
          dcenter -= c;
          rhs[id(i, j)] -= c * bc.a;
        } else if (bc.type == Bc::Neumann) {
          rhs[id(i, j)] += pe * bc.a / (wij * ca);
        }
      }
      // b-direction fluxes
      if (j < nb - 1) {
        const double pe = prob.Pb(A[i], Eb[j + 1]);
        const double c = pe / ((B[j + 1] - B[j]) * wij * cb);
        dcenter -= c;
        trips.emplace_back(id(i, j), id(i, j + 1), c);
      } else if (prob.bc_b1.type == Bc::Dirichlet) {
        const double pe = prob.Pb(A[i], Eb[nb]);
        const double c = pe / ((prob.b1 - B[j]) * wij * cb);
        dcenter -= c;
        rhs[id(i, j)] -= c * prob.bc_b1.a;
      }
      if (j > 0) {
        const double pe = prob.Pb(A[i], Eb[j]);
        const double c = pe / ((B[j] - B[j - 1]) * wij * cb);
        dcenter -= c;
        trips.emplace_back(id(i, j), id(i, j - 1), c);
      } else if (prob.bc_b0.type == Bc::Dirichlet) {
        const double pe = prob.Pb(A[i], Eb[0]);
        const double c = pe / ((B[j] - prob.b0) * wij * cb);
        dcenter -= c;
        rhs[id(i, j)] -= c * prob.bc_b0.a;
      }
      dcenter += prob.Q(A[i], B[j]);
      rhs[id(i, j)] += prob.F(A[i], B[j]);
      trips.emplace_back(id(i, j), id(i, j), dcenter);
    }

  Eigen::SparseMatrix<double> M(na * nb, na * nb);
  M.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(M);
  lu.factorize(M);
  if (lu.info() != Eigen::Success) throw std::runtime_error("2-d elliptic factorization failed");
  Eigen::VectorXd u = lu.solve(rhs);

  Solution2D sol;
  std::vector<double> vals(u.data(), u.data() + u.size());
  sol.u = GridFunction2D(A, B, vals);
  // a-posteriori residual on an interior subsample via high-order stencils
  double res = 0, scale = 1e-300;
  for (int i = 4; i < na - 4; i += 3)
    for (int j = 4; j < nb - 4; j += 3) {
      const double x = A[i], y = B[j];
      const double ha = A[i + 1] - A[i], hb = B[j + 1] - B[j];
      const double dfa = (prob.Pa(x + ha, y) * sol.u.eval(x + ha, y, 1, 0) -
                          prob.Pa(x - ha, y) * sol.u.eval(x - ha, y, 1, 0)) / (2 * ha);
      const double dfb = (prob.Pb(x, y + hb) * sol.u.eval(x, y + hb, 0, 1) -
                          prob.Pb(x, y - hb) * sol.u.eval(x, y - hb, 0, 1)) / (2 * hb);
      const double lhs = (dfa + dfb) / prob.W(x, y) + prob.Q(x, y) * sol.u.eval(x, y);
      res = std::max(res, std::abs(lhs - prob.F(x, y)));
      scale = std::max(scale, std::abs(prob.F(x, y)) + std::abs(sol.u.eval(x, y)));
    }
  sol.residual = res / scale;
  return sol;
}

}  // namespace alflab
