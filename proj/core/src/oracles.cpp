#include "mcf/oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcf {

RoundSolution sphere(int m, double r0, double t0) { return {RoundKind::Sphere, m, r0, t0}; }
RoundSolution cylinder(int n, double r0, double t0) { return {RoundKind::Cylinder, n, r0, t0}; }

std::optional<double> radius(const RoundSolution& s, double t) {
  if (t < s.t0) throw std::invalid_argument("radius: t precedes t0");
  const double q = s.r0 * s.r0 - 2.0 * s.m * (t - s.t0);
  if (q < 0.0) return std::nullopt;
  return std::sqrt(q);
}

double collapse_time(const RoundSolution& s) { return s.r0 * s.r0 / (2.0 * s.m); }

namespace {

double clearance_at(const GraphField& u, const BarrierPlacement& pl, double r, bool check_side) {
  const GridSpec& g = u.grid;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < u.values.size(); ++idx) {
    const double z = u.values[idx];
    if (is_escaped(z)) continue;
    auto ijk = g.unindex(idx);
    double d2 = (z - pl.center[2]) * (z - pl.center[2]);
    if (g.mode == GridMode::Radial1D) {
      const double x = g.coord(0, ijk[0]);
      d2 += x * x;
    } else {
      const double x = g.coord(0, ijk[0]) - pl.center[0], y = g.coord(1, ijk[1]) - pl.center[1];
      d2 += x * x + y * y;
    }
    best = std::min(best, std::sqrt(d2) - r);
  }
  if (check_side) {
    // the centre must sit on the requested side of the graph
    std::size_t c = 0;
    double bestd = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < u.values.size(); ++idx) {
      auto ijk = g.unindex(idx);
      double d = g.mode == GridMode::Radial1D
                     ? g.coord(0, ijk[0])
                     : std::hypot(g.coord(0, ijk[0]) - pl.center[0], g.coord(1, ijk[1]) - pl.center[1]);
      if (d < bestd) {
        bestd = d;
        c = idx;
      }
    }
    const double zc = u.values[c];
    const bool below = pl.center[2] < zc;
    if (below == pl.above) return -std::numeric_limits<double>::infinity();
  }
  return best;
}

}  // namespace

BarrierReport barrier_violation(const GraphTrajectory& traj, const RoundSolution& s,
                                const BarrierPlacement& placement) {
  if (traj.snapshots.empty()) throw std::invalid_argument("empty trajectory");
  BarrierReport rep;
  rep.worst_clearance = std::numeric_limits<double>::infinity();
  bool first = true;
  for (const auto& snap : traj.snapshots) {
    if (snap.time < s.t0) continue;
    auto r = radius(s, snap.time);
    if (!r) break;
    const double c = clearance_at(snap, placement, *r, first);
    if (first && c < 0.0) throw std::invalid_argument("barrier placement already crosses the graph");
    first = false;
    ++rep.samples;
    if (c < rep.worst_clearance) {
      rep.worst_clearance = c;
      rep.time_of_worst = snap.time;
    }
  }
  return rep;
}

}  // namespace mcf
