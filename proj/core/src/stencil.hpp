#pragma once

// Finite-difference helpers shared by the geometry and graph-flow code.

#include <array>
#include <vector>

#include "mcf/fields.hpp"

namespace mcf::detail {

struct Jet {
  double p[3] = {0, 0, 0};
  double hess[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  bool ok = true;
};

inline double value(const GridSpec& g, const std::vector<double>& u, std::array<int, 3> idx) {
  return u[g.index(idx[0], idx[1], idx[2])];
}

// First and second derivative along one axis. Radial axis: even reflection at
// r = 0. Other boundaries: one-sided second order.
inline bool axis_derivs(const GridSpec& g, const std::vector<double>& u, std::array<int, 3> idx,
                        int axis, double& d1, double& d2) {
  const double h = g.h;
  const int i = idx[axis];
  const int m = g.count[axis];
  auto at = [&](int k) {
    std::array<int, 3> j = idx;
    j[axis] = k;
    return value(g, u, j);
  };
  if (axis == 0 && g.has_axis() && i == 0) {
    double u0 = at(0), u1 = at(1);
    if (is_escaped(u0) || is_escaped(u1)) return false;
    d1 = 0.0;
    d2 = 2.0 * (u1 - u0) / (h * h);
    return true;
  }
  if (i > 0 && i < m - 1) {
    double a = at(i - 1), b = at(i), c = at(i + 1);
    if (is_escaped(a) || is_escaped(b) || is_escaped(c)) return false;
    d1 = (c - a) / (2.0 * h);
    d2 = (c - 2.0 * b + a) / (h * h);
    return true;
  }
  const int s = (i == 0) ? 1 : -1;
  double u0 = at(i), u1 = at(i + s), u2 = at(i + 2 * s), u3 = at(i + 3 * s);
  if (is_escaped(u0) || is_escaped(u1) || is_escaped(u2) || is_escaped(u3)) return false;
  d1 = s * (-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * h);
  d2 = (2.0 * u0 - 5.0 * u1 + 4.0 * u2 - u3) / (h * h);
  return true;
}

inline bool axis_first(const GridSpec& g, const std::vector<double>& u, std::array<int, 3> idx,
                       int axis, double& d1) {
  double d2;
  return axis_derivs(g, u, idx, axis, d1, d2);
}

// Full jet (gradient and Hessian) at a node, Cartesian-style indexing.
inline Jet jet_at(const GridSpec& g, const std::vector<double>& u, std::array<int, 3> idx) {
  Jet J;
  const int d = g.dims();
  for (int a = 0; a < d; ++a)
    if (!axis_derivs(g, u, idx, a, J.p[a], J.hess[a][a])) {
      J.ok = false;
      return J;
    }
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      // mixed derivative as the b-derivative of the a-derivative
      const int j = idx[b], m = g.count[b];
      double v;
      auto da = [&](int k, double& out) {
        std::array<int, 3> q = idx;
        q[b] = k;
        return axis_first(g, u, q, a, out);
      };
      if (b == 0 && g.has_axis() && j == 0) {
        v = 0.0;
      } else if (j > 0 && j < m - 1) {
        double lo, hi;
        if (!da(j - 1, lo) || !da(j + 1, hi)) {
          J.ok = false;
          return J;
        }
        v = (hi - lo) / (2.0 * g.h);
      } else {
        const int s = (j == 0) ? 1 : -1;
        double f0, f1, f2;
        if (!da(j, f0) || !da(j + s, f1) || !da(j + 2 * s, f2)) {
          J.ok = false;
          return J;
        }
        v = s * (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * g.h);
      }
      J.hess[a][b] = J.hess[b][a] = v;
    }
  return J;
}

}  // namespace mcf::detail
