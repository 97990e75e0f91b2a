#include "mcf/graphflow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mcf/geometry.hpp"
#include "mcf/parallel.hpp"
#include "stencil.hpp"

namespace mcf {

namespace {

std::string cfl_message(double dt, double limit) {
  std::ostringstream os;
  os.precision(17);
  os << "dt=" << dt << " exceeds CFL limit " << limit;
  return os.str();
}

void require_graph_grid(const GridSpec& g) {
  if (g.mode != GridMode::Radial1D && g.mode != GridMode::Cartesian2D)
    throw std::invalid_argument("graph flow supports Radial1D and Cartesian2D grids");
}

double node_radius(const GridSpec& g, std::size_t idx) {
  auto ijk = g.unindex(idx);
  if (g.mode == GridMode::Radial1D) return g.coord(0, ijk[0]);
  return std::hypot(g.coord(0, ijk[0]), g.coord(1, ijk[1]));
}

// integral of min(1/2, kappa/(1+s^2)) from 0 to p
double limited_half(double p, double kappa) {
  if (2.0 * kappa <= 1.0) return kappa * std::atan(p);
  const double s = std::sqrt(2.0 * kappa - 1.0), a = std::abs(p);
  if (a <= s) return 0.5 * p;
  return std::copysign(0.5 * s + kappa * (std::atan(a) - std::atan(s)), p);
}

void rhs_radial(const GridSpec& g, const std::vector<double>& u, std::vector<double>& out) {
  const int m = g.count[0];
  const double h = g.h, h2 = h * h;
  const int n = g.n;
  for (int i = 0; i < m; ++i) {
    const double ui = u[i];
    if (is_escaped(ui)) {
      out[i] = ESCAPED;
      continue;
    }
    if (i == 0) {
      const double u1 = u[1];
      out[0] = is_escaped(u1) ? ESCAPED : (n + 1) * 2.0 * (u1 - ui) / h2;
      continue;
    }
    if (i == m - 1) {
      double d1, d2;
      if (!detail::axis_derivs(g, u, {i, 0, 0}, 0, d1, d2)) {
        out[i] = ESCAPED;
        continue;
      }
      out[i] = d2 / (1.0 + d1 * d1) + n * d1 / g.coord(0, i);
      continue;
    }
    const double a = u[i - 1], c = u[i + 1];
    if (is_escaped(a) || is_escaped(c)) {
      out[i] = ESCAPED;
      continue;
    }
    const double r = g.coord(0, i);
    const double pp = (c - ui) / h, pm = (ui - a) / h;
    // u_rr/(1+u_r^2) = (atan u_r)_r, differenced across the half nodes
    const double diff = (std::atan(pp) - std::atan(pm)) / h;
    // drift pp - phi(pp) + phi(pm) is central where phi' = 1/2 and leans
    // forward where the diffusion is too weak to dominate it
    const double kappa = r / (n * h);
    const double drift = pp - limited_half(pp, kappa) + limited_half(pm, kappa);
    out[i] = diff + n * drift / r;
  }
}

void rhs_cartesian(const GridSpec& g, const std::vector<double>& u, std::vector<double>& out) {
  parallel_for(static_cast<std::size_t>(g.count[0]), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      for (int j = 0; j < g.count[1]; ++j) {
        const std::size_t idx = g.index(static_cast<int>(i), j);
        if (is_escaped(u[idx])) {
          out[idx] = ESCAPED;
          continue;
        }
        detail::Jet J = detail::jet_at(g, u, {static_cast<int>(i), j, 0});
        if (!J.ok) {
          out[idx] = ESCAPED;
          continue;
        }
        const double ux = J.p[0], uy = J.p[1];
        out[idx] = ((1.0 + uy * uy) * J.hess[0][0] - 2.0 * ux * uy * J.hess[0][1] +
                    (1.0 + ux * ux) * J.hess[1][1]) /
                   (1.0 + ux * ux + uy * uy);
      }
  }, 16);
}

}  // namespace

CflError::CflError(double dt_, double limit_)
    : std::invalid_argument(cfl_message(dt_, limit_)), dt(dt_), limit(limit_) {}

Mask cap_ring(const GridSpec& g, double R) {
  Mask m(g.size(), 0);
  const double tol = 1e-9 * g.h;
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = node_radius(g, i) >= R - tol ? 1 : 0;
  return m;
}

std::vector<double> mcf_rhs(const GraphField& u) {
  require_graph_grid(u.grid);
  std::vector<double> out(u.values.size());
  if (u.grid.mode == GridMode::Radial1D)
    rhs_radial(u.grid, u.values, out);
  else
    rhs_cartesian(u.grid, u.values, out);
  return out;
}

std::vector<double> mcf_rhs_divergence(const GraphField& u) {
  require_graph_grid(u.grid);
  const GridSpec& g = u.grid;
  const double h = g.h;
  std::vector<double> out(u.values.size(), ESCAPED);
  const auto& U = u.values;
  if (g.mode == GridMode::Radial1D) {
    const int n = g.n;
    auto flux = [&](int i) {  // at r_{i+1/2}
      const double p = (U[i + 1] - U[i]) / h;
      const double rh = (i + 0.5) * h;
      return std::pow(rh, n) * p / std::sqrt(1.0 + p * p);
    };
    for (int i = 1; i + 1 < g.count[0]; ++i) {
      if (is_escaped(U[i - 1]) || is_escaped(U[i]) || is_escaped(U[i + 1])) continue;
      const double r = g.coord(0, i);
      const double ur = (U[i + 1] - U[i - 1]) / (2.0 * h);
      const double div = (flux(i) - flux(i - 1)) / (h * std::pow(r, n));
      out[i] = std::sqrt(1.0 + ur * ur) * div;
    }
    return out;
  }
  auto cy = [&](int i, int j) { return (U[g.index(i, j + 1)] - U[g.index(i, j - 1)]) / (2.0 * h); };
  auto cx = [&](int i, int j) { return (U[g.index(i + 1, j)] - U[g.index(i - 1, j)]) / (2.0 * h); };
  for (int i = 2; i + 2 < g.count[0]; ++i)
    for (int j = 2; j + 2 < g.count[1]; ++j) {
      bool bad = false;
      for (int a = -2; a <= 2 && !bad; ++a)
        for (int b = -2; b <= 2; ++b)
          if (is_escaped(U[g.index(i + a, j + b)])) bad = true;
      if (bad) continue;
      auto fx = [&](int ii) {  // x-flux at (ii + 1/2, j)
        const double px = (U[g.index(ii + 1, j)] - U[g.index(ii, j)]) / h;
        const double py = 0.5 * (cy(ii, j) + cy(ii + 1, j));
        return px / std::sqrt(1.0 + px * px + py * py);
      };
      auto fy = [&](int jj) {
        const double py = (U[g.index(i, jj + 1)] - U[g.index(i, jj)]) / h;
        const double px = 0.5 * (cx(i, jj) + cx(i, jj + 1));
        return py / std::sqrt(1.0 + px * px + py * py);
      };
      const double div = (fx(i) - fx(i - 1)) / h + (fy(j) - fy(j - 1)) / h;
      const double px = cx(i, j), py = cy(i, j);
      out[g.index(i, j)] = std::sqrt(1.0 + px * px + py * py) * div;
    }
  return out;
}

double cfl_dt(const GridSpec& g) { return 0.4 * g.h * g.h / (2.0 * g.dims()); }

double cfl_dt(const GraphField& u) {
  if (!u.any_finite()) throw std::invalid_argument("cfl_dt: all nodes ESCAPED");
  return cfl_dt(u.grid);
}

namespace {

void check_dt(const GraphField& u, double dt) {
  const double lim = cfl_dt(u);
  if (!(dt > 0.0) || dt > lim * (1.0 + 1e-12)) throw CflError(dt, lim);
}

}  // namespace

GraphField step_free(const GraphField& u, double dt) {
  check_dt(u, dt);
  GraphField out = u;
  std::vector<double> rhs = mcf_rhs(u);
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    if (is_escaped(u.values[i]) || is_escaped(rhs[i]))
      out.values[i] = ESCAPED;
    else
      out.values[i] = u.values[i] + dt * rhs[i];
  }
  out.time = u.time + dt;
  return out;
}

GraphField step(const GraphField& u, double dt, const CapSpec& cap) {
  check_dt(u, dt);
  const Mask ring = cap_ring(u.grid, cap.R);
  GraphField out = u;
  std::vector<double> rhs = mcf_rhs(u);
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    if (ring[i]) {
      out.values[i] = cap.L;
    } else if (is_escaped(u.values[i]) || is_escaped(rhs[i])) {
      out.values[i] = ESCAPED;
    } else {
      out.values[i] = std::min(u.values[i] + dt * rhs[i], cap.L);
    }
  }
  out.time = u.time + dt;
  return out;
}

void validate(const CappedProblem& p) {
  require_graph_grid(p.u0.grid);
  if (!(p.eps > 0.0) || p.eps > 1.0) throw std::invalid_argument("eps must lie in (0, 1]");
  if (!(p.T > 0.0)) throw std::invalid_argument("horizon T must be positive");
  if (!(p.R > 0.0)) throw std::invalid_argument("ball radius R must be positive");
  const GridSpec& g = p.u0.grid;
  const double reach = g.mode == GridMode::Radial1D
                           ? g.coord(0, g.count[0] - 1)
                           : std::min({-g.lo[0], -g.lo[1], g.coord(0, g.count[0] - 1),
                                       g.coord(1, g.count[1] - 1)});
  if (reach < p.R - 1e-9 * g.h)
    throw std::invalid_argument("grid does not cover the ball B_R");
  if (p.fixed_dt) {
    const double lim = cfl_dt(g);
    if (!(*p.fixed_dt > 0.0) || *p.fixed_dt > lim * (1.0 + 1e-12)) throw CflError(*p.fixed_dt, lim);
  }
  GraphField m = mollify_initial(p.u0, p.eps, p.L + 1.0);
  const Mask ring = cap_ring(g, p.R);
  // check on the innermost ring nodes
  for (std::size_t i = 0; i < ring.size(); ++i) {
    if (!ring[i]) continue;
    if (node_radius(g, i) > p.R + 1.5 * g.h) continue;
    if (m.values[i] < p.L + 1.0 - 1e-9) {
      std::ostringstream os;
      os << "R too small: mollified datum " << m.values[i] << " < L+1 on the boundary of B_R";
      throw std::invalid_argument(os.str());
    }
  }
}

GraphField capped_initial(const CappedProblem& p) {
  GraphField m = mollify_initial(p.u0, p.eps, p.L + 1.0);
  const Mask ring = cap_ring(m.grid, p.R);
  for (std::size_t i = 0; i < m.values.size(); ++i)
    m.values[i] = ring[i] ? p.L : mollified_min(m.values[i], p.L, p.eps);
  m.time = 0.0;
  m.lower_bound = m.finite_min();
  return m;
}

GraphTrajectory solve_capped(const CappedProblem& p, int snap_every,
                             std::vector<std::string>* diagnostics,
                             const GraphSnapshotHook& hook, bool keep_snapshots) {
  validate(p);
  if (snap_every < 1) throw std::invalid_argument("snap_every must be >= 1");
  GraphField u = capped_initial(p);
  const double dt = p.fixed_dt ? *p.fixed_dt : cfl_dt(u);
  const CapSpec cap{p.L, p.R};
  GraphTrajectory traj;
  auto record = [&](const GraphField& f) {
    if (keep_snapshots || traj.snapshots.empty()) traj.push(f);
    if (hook) hook(f);
  };
  record(u);
  const double floor = u.finite_min() - 1.0;
  const bool degenerate = std::all_of(u.values.begin(), u.values.end(),
                                      [&](double x) { return x >= p.L - 1.0; });
  if (degenerate) {
    if (diagnostics)
      diagnostics->push_back("initial datum is everywhere >= L-1; returning the constant-L trajectory");
    GraphField c = u;
    std::fill(c.values.begin(), c.values.end(), p.L);
    c.time = p.T;
    record(c);
    return traj;
  }
  long k = 0;
  while (u.time < p.T - 1e-6 * dt) {
    u = step(u, dt, cap);
    ++k;
    u.time = k * dt;
    const double mn = u.finite_min();
    if (!(mn >= floor)) {
      std::ostringstream os;
      os << "maximum principle violated at t=" << u.time << " (min " << mn << " < " << floor << ")";
      throw SchemeError(os.str());
    }
    if (k % snap_every == 0 || u.time >= p.T - 1e-6 * dt) record(u);
  }
  if (!keep_snapshots && traj.snapshots.back().time < u.time) traj.push(u);
  return traj;
}

CapSweepResult cap_sweep(const GraphField& u0, const std::vector<double>& Ls, double eps,
                         const std::function<double(double)>& R_of_L, double T,
                         int snap_every, std::size_t probe_node, double probe_time) {
  if (Ls.empty()) throw std::invalid_argument("cap_sweep needs at least one L");
  for (std::size_t i = 1; i < Ls.size(); ++i)
    if (!(Ls[i] > Ls[i - 1])) throw std::invalid_argument("cap_sweep: Ls must increase strictly");
  CapSweepResult res;
  res.Ls = Ls;
  for (double L : Ls) {
    CappedProblem p{u0, L, eps, R_of_L(L), T, std::nullopt};
    res.runs.push_back(solve_capped(p, snap_every));
  }
  for (std::size_t i = 0; i + 1 < res.runs.size(); ++i) {
    const auto& A = res.runs[i];
    const auto& B = res.runs[i + 1];
    const auto& a = A.snapshots[A.nearest(probe_time)];
    const auto& b = B.snapshots[B.nearest(probe_time)];
    res.probe_gaps.push_back(std::abs(a.values.at(probe_node) - b.values.at(probe_node)));
  }
  return res;
}

Mask domain_projection(const GraphField& u, double a, double L) {
  if (a > L - 1.0) throw std::invalid_argument("domain_projection: level a must be <= L-1");
  Mask m(u.values.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = (!is_escaped(u.values[i]) && u.values[i] < a) ? 1 : 0;
  return m;
}

}  // namespace mcf
