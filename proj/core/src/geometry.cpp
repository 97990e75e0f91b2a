#include "mcf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stencil.hpp"

namespace mcf {

namespace {

void require_graph_grid(const GridSpec& g) {
  if (g.mode != GridMode::Radial1D && g.mode != GridMode::Cartesian2D)
    throw std::invalid_argument("graph fields must use Radial1D or Cartesian2D grids");
}

struct PointGeom {
  double v = 1.0, H = 0.0, A2 = 0.0;
  bool ok = false;
};

PointGeom point_geometry(const GraphField& u, std::size_t idx) {
  const GridSpec& g = u.grid;
  PointGeom out;
  if (is_escaped(u.values[idx])) return out;
  auto ijk = g.unindex(idx);
  detail::Jet J = detail::jet_at(g, u.values, ijk);
  if (!J.ok) return out;
  out.ok = true;
  if (g.mode == GridMode::Radial1D) {
    const double ur = J.p[0], urr = J.hess[0][0];
    const double q = 1.0 + ur * ur;
    const double sq = std::sqrt(q);
    const double k_rad = urr / (q * sq);  // meridian principal curvature
    const double r = g.coord(0, ijk[0]);
    const int n = g.n;
    out.v = sq;
    if (ijk[0] == 0) {
      out.H = (n + 1) * k_rad;
      out.A2 = (n + 1) * k_rad * k_rad;
    } else {
      const double k_rot = ur / (r * sq);
      out.H = k_rad + n * k_rot;
      out.A2 = k_rad * k_rad + n * k_rot * k_rot;
    }
    return out;
  }
  const double ux = J.p[0], uy = J.p[1];
  const double uxx = J.hess[0][0], uyy = J.hess[1][1], uxy = J.hess[0][1];
  const double q = 1.0 + ux * ux + uy * uy;
  const double sq = std::sqrt(q);
  out.v = sq;
  out.H = ((1.0 + uy * uy) * uxx - 2.0 * ux * uy * uxy + (1.0 + ux * ux) * uyy) / (q * sq);
  // shape operator S = g^{-1} D^2u / v with g^{-1} = I - p p^T / v^2
  const double gi[2][2] = {{1.0 - ux * ux / q, -ux * uy / q}, {-ux * uy / q, 1.0 - uy * uy / q}};
  const double D[2][2] = {{uxx, uxy}, {uxy, uyy}};
  double S[2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) S[a][b] = (gi[a][0] * D[0][b] + gi[a][1] * D[1][b]) / sq;
  out.A2 = S[0][0] * S[0][0] + 2.0 * S[0][1] * S[1][0] + S[1][1] * S[1][1];
  return out;
}

}  // namespace

std::vector<double> gradient_function(const GraphField& u) {
  require_graph_grid(u.grid);
  std::vector<double> out(u.values.size(), ESCAPED);
  for (std::size_t i = 0; i < out.size(); ++i) {
    PointGeom p = point_geometry(u, i);
    if (p.ok) out[i] = p.v;
  }
  return out;
}

std::vector<double> mean_curvature(const GraphField& u) {
  require_graph_grid(u.grid);
  std::vector<double> out(u.values.size(), ESCAPED);
  for (std::size_t i = 0; i < out.size(); ++i) {
    PointGeom p = point_geometry(u, i);
    if (p.ok) out[i] = p.H;
  }
  return out;
}

std::vector<double> second_fundamental_norm(const GraphField& u) {
  require_graph_grid(u.grid);
  std::vector<double> out(u.values.size(), ESCAPED);
  for (std::size_t i = 0; i < out.size(); ++i) {
    PointGeom p = point_geometry(u, i);
    if (p.ok) out[i] = p.A2;
  }
  return out;
}

GraphGeometry graph_geometry(const GraphField& u, double k) {
  require_graph_grid(u.grid);
  if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
  const std::size_t N = u.values.size();
  GraphGeometry g;
  g.k_used = k;
  g.v.assign(N, ESCAPED);
  g.H.assign(N, ESCAPED);
  g.A2.assign(N, ESCAPED);
  g.G.assign(N, ESCAPED);
  g.G_valid.assign(N, 0);
  for (std::size_t i = 0; i < N; ++i) {
    PointGeom p = point_geometry(u, i);
    if (!p.ok) continue;
    g.v[i] = p.v;
    g.H[i] = p.H;
    g.A2[i] = p.A2;
    const double kv2 = k * p.v * p.v;
    if (kv2 <= 0.5) {
      g.G[i] = p.v * p.v / (1.0 - kv2) * p.A2;
      g.G_valid[i] = 1;
    }
  }
  return g;
}

GQuantity g_quantity(const GraphField& u, double k) {
  GraphGeometry g = graph_geometry(u, k);
  return {std::move(g.G), std::move(g.G_valid)};
}

double smooth_min_profile(double x) {
  if (x <= -1.0) return x;
  if (x >= 1.0) return 0.0;
  const double x2 = x * x;
  return x2 * x2 / 16.0 - 3.0 * x2 / 8.0 + x / 2.0 - 3.0 / 16.0;
}

double smooth_min_profile_derivative(double x) {
  if (x <= -1.0) return 1.0;
  if (x >= 1.0) return 0.0;
  return (x - 1.0) * (x - 1.0) * (x + 2.0) / 4.0;
}

double mollified_min(double a, double b, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (is_escaped(a)) return b;
  const double x = (a - b) / eps;
  if (x <= -1.0) return a;
  if (x >= 1.0) return b;
  return eps * smooth_min_profile(x) + b;
}

double bump_kernel(double s) {
  const double q = 1.0 - s * s;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

namespace {

double fill(double x, double escaped_fill) { return is_escaped(x) ? escaped_fill : x; }

// Linear interpolation of a radial profile at radius s >= 0; beyond the last
// node the outermost value is held.
double radial_sample(const GridSpec& g, const std::vector<double>& u, double s,
                     double escaped_fill) {
  const int m = g.count[0];
  double x = s / g.h;
  if (x >= m - 1) return fill(u[m - 1], escaped_fill);
  int i = static_cast<int>(x);
  double t = x - i;
  return (1.0 - t) * fill(u[i], escaped_fill) + t * fill(u[i + 1], escaped_fill);
}

}  // namespace

GraphField mollify_initial(const GraphField& u0, const MollifierSpec& spec, double escaped_fill) {
  require_graph_grid(u0.grid);
  const double eps = spec.kernel_radius > 0.0 ? spec.kernel_radius : spec.epsilon;
  const GridSpec& g = u0.grid;
  if (!(eps >= g.h)) return u0;
  GraphField out = u0;
  if (g.mode == GridMode::Radial1D) {
    // Convolution in R^{n+1} of a radial function. With y = s e + q w,
    // w perpendicular to e, the volume element is q^{n-1} ds dq.
    const int m = std::max(16, static_cast<int>(std::ceil(4.0 * eps / g.h)));
    const double ds = 2.0 * eps / m;
    const double dq = eps / m;
    const int n = g.n;
    struct Node {
      double s, q, w;
    };
    std::vector<Node> nodes;
    double wsum = 0.0;
    for (int a = 0; a < m; ++a) {
      double s = -eps + (a + 0.5) * ds;
      for (int b = 0; b < m; ++b) {
        double q = (b + 0.5) * dq;
        double rho = std::sqrt(s * s + q * q) / eps;
        double w = bump_kernel(rho) * std::pow(q, n - 1);
        if (w <= 0.0) continue;
        nodes.push_back({s, q, w});
        wsum += w;
      }
    }
    for (auto& nd : nodes) nd.w /= wsum;
    for (int i = 0; i < g.count[0]; ++i) {
      const double r = g.coord(0, i);
      double acc = 0.0;
      for (const auto& nd : nodes) {
        double dx = r - nd.s;
        acc += nd.w * radial_sample(g, u0.values, std::sqrt(dx * dx + nd.q * nd.q), escaped_fill);
      }
      out.values[i] = acc;
    }
  } else {
    const int k = static_cast<int>(std::floor(eps / g.h));
    std::vector<std::array<int, 2>> offs;
    std::vector<double> ws;
    for (int a = -k; a <= k; ++a)
      for (int b = -k; b <= k; ++b) {
        double w = bump_kernel(std::hypot(a * g.h, b * g.h) / eps);
        if (w > 0.0) {
          offs.push_back({a, b});
          ws.push_back(w);
        }
      }
    for (int i = 0; i < g.count[0]; ++i)
      for (int j = 0; j < g.count[1]; ++j) {
        double acc = 0.0, wsum = 0.0;
        for (std::size_t o = 0; o < offs.size(); ++o) {
          int ii = i + offs[o][0], jj = j + offs[o][1];
          if (ii < 0 || jj < 0 || ii >= g.count[0] || jj >= g.count[1]) continue;
          acc += ws[o] * fill(u0.values[g.index(ii, jj)], escaped_fill);
          wsum += ws[o];
        }
        out.values[g.index(i, j)] = acc / wsum;
      }
  }
  out.lower_bound = out.finite_min();
  return out;
}

GraphField mollify_initial(const GraphField& u0, double eps, double escaped_fill) {
  return mollify_initial(u0, MollifierSpec{eps, eps}, escaped_fill);
}

}  // namespace mcf
