#pragma once

#include <functional>
#include <vector>

#include "alflab/numerics.hpp"

namespace alflab {

/// Boundary closures for the divergence-form solvers. ZeroFlux is the natural
/// condition at degenerate edges (axis, bolt/horizon: the flux coefficient vanishes
/// there), equivalently an even reflection in the proper-distance coordinate.
struct Bc {
  enum Type { ZeroFlux, Dirichlet, Neumann, Robin } type = ZeroFlux;
  // Dirichlet: u = a;  Neumann: u' = a;  Robin: u' = a u + b  (outward derivative)
  double a = 0, b = 0;
};

/// (1/w) d/dr (p u') + q u = f on [r0, r1], conservative second-order differences.
struct RadialProblem {
  std::function<double(double)> p, w, q, f;
  double r0 = 0, r1 = 1;
  int n = 256;
  Bc inner, outer;
  double grade = 1.0;  // node spacing ratio growth (1 = uniform; >1 packs toward r0)
};

struct RadialSolution {
  GridFunction1D u;
  double residual = 0;  // scaled sup of the 4th-order discrete residual
};

RadialSolution solve_radial(const RadialProblem& prob);

/// (1/W) [ d_a (Pa u_a) + d_b (Pb u_b) ] + Q u = F on a structured rectangle.
/// Nodes may be graded via the optional axis maps.
struct EllipticProblem2D {
  std::function<double(double, double)> Pa, Pb, W, Q, F;
  double a0 = 0, a1 = 1, b0 = 0, b1 = 1;
  int na = 64, nb = 64;
  Bc bc_a0, bc_a1, bc_b0, bc_b1;
  // optional strictly-increasing node maps [0,1] -> [a0,a1] etc.
  std::function<double(double)> map_a, map_b;
};

struct Solution2D {
  GridFunction2D u;
  double residual = 0;
};

Solution2D solve_elliptic2d(const EllipticProblem2D& prob);

}  // namespace alflab
