#pragma once

#include <array>
#include <optional>

#include "mcf/fields.hpp"

namespace mcf {

enum class RoundKind { Sphere, Cylinder };

// Sphere: an m-dimensional sphere in R^{m+1}. Cylinder: S^m x R in R^{m+2}.
// Both shrink by r' = -m / r.
struct RoundSolution {
  RoundKind kind = RoundKind::Sphere;
  int m = 1;
  double r0 = 0.0;
  double t0 = 0.0;
};

RoundSolution sphere(int m, double r0, double t0 = 0.0);
RoundSolution cylinder(int n, double r0, double t0 = 0.0);

// sqrt(r0^2 - 2m(t - t0)); empty once extinct.
std::optional<double> radius(const RoundSolution& s, double t);

double collapse_time(const RoundSolution& s);

// Sphere centre in graph coordinates: (x, y, height). Radial1D graphs use
// x = 0 (centre on the axis).
struct BarrierPlacement {
  std::array<double, 3> center{0.0, 0.0, 0.0};
  bool above = false;  // sphere above the graph (inside the epigraph)
};

struct BarrierReport {
  double worst_clearance = 0.0;
  double time_of_worst = 0.0;
  std::size_t samples = 0;
};

// Minimum over snapshots (until extinction) and graph nodes of
// |P - C| - r(t). Positive means no crossing.
BarrierReport barrier_violation(const GraphTrajectory& traj, const RoundSolution& s,
                                const BarrierPlacement& placement);

}  // namespace mcf
