#pragma once

#include <array>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "mcf/fields.hpp"

namespace mcf {

// ---- initial shapes -------------------------------------------------------

// Ball of given radius. Radial1D ignores the centre; Axisym2D uses (0, center[1]).
struct Sphere {
  std::array<double, 3> center{0.0, 0.0, 0.0};
  double radius = 0.0;
};

// {r_in < |x| < r_out} (r_in = 0 for a ball). On Axisym2D and Cartesian3D grids
// |x| is the distance to the vertical axis, giving the cylinder over the set.
struct RadialShell {
  double r_in = 0.0;
  double r_out = 0.0;
};

// Graph z = profile(r) of a radial function on an Axisym2D grid; profile
// returns ESCAPED outside its domain. Inside = above the graph.
struct RadialGraph {
  std::function<double(double)> profile;
  double r_max = 0.0;
};

// Planar region for Cartesian2D (or its vertical cylinder on Cartesian3D).
struct PlanarDomain {
  std::function<bool(double, double)> inside;
  std::vector<std::array<double, 4>> segments;  // boundary polyline pieces x0,y0,x1,y1
};

// Graph of a sampled field: Radial1D u on an Axisym2D grid, Cartesian2D u on a
// Cartesian3D grid.
struct SampledGraph {
  GraphField u;
};

using Shape = std::variant<Sphere, RadialShell, RadialGraph, PlanarDomain, SampledGraph>;

// Signed distance (negative inside / above the graph) clamped to [-1, 1].
LevelSetField truncated_signed_distance(const Shape& shape, const GridSpec& grid,
                                        LevelSetLabel label);

// ---- solver ---------------------------------------------------------------

struct LevelSetProblem {
  LevelSetField w0;
  double delta_reg = 1.0;
  double T = 0.0;
  std::optional<double> fixed_dt;
};

enum class FatteningVerdict { NonFat, Suspicious };

struct FatteningReport {
  double time = 0.0;
  double band_measure = 0.0;
  double band_width = 0.0;
  FatteningVerdict verdict = FatteningVerdict::NonFat;
};

// Delta w - w_i w_j w_ij / (|Dw|^2 + (delta_reg h)^2), plus (n/r) w_r on
// Radial1D and Axisym2D grids. Mirror boundaries, even reflection at r = 0.
std::vector<double> levelset_rhs(const LevelSetField& w, double delta_reg = 1.0);

double levelset_cfl_dt(const GridSpec& g);

// Forward Euler, then clamp to [-1, 1].
LevelSetField step_levelset(const LevelSetField& w, double dt, double delta_reg = 1.0);

struct LevelSetRun {
  LevelSetTrajectory traj;
  std::vector<FatteningReport> fattening;
};

using LevelSetSnapshotHook = std::function<void(const LevelSetField&)>;

LevelSetRun solve_levelset(const LevelSetProblem& p, int snap_every,
                           const LevelSetSnapshotHook& hook = {}, bool keep_snapshots = true);

// Ambient volume of {|w| < band}; Suspicious when halving the band does not
// roughly halve the measure.
FatteningReport fattening_measure(const LevelSetField& w, double band);

// Ambient cell volume of each node (radial weights on Radial1D/Axisym2D).
std::vector<double> node_volumes(const GridSpec& g);

struct MeasureSets {
  Mask interior;
  Mask boundary;
};

// Density proxy at scale r_ball: interior where the ball lies inside the set,
// boundary where the fraction is strictly between 0 and 1.
MeasureSets measure_theoretic_sets(const Mask& indicator, const GridSpec& grid, double r_ball);

// Indicator of {w < 0}.
Mask negative_set(const LevelSetField& w);

// Connected components (face adjacency) of a mask on a Cartesian grid.
int connected_components(const Mask& m, const GridSpec& g);

}  // namespace mcf
