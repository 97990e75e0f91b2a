#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcf/fields.hpp"

namespace mcf {

class CompareError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DistanceSeries {
  std::vector<double> times;
  std::vector<double> distances;  // +inf when exactly one boundary is empty
  double worst = 0.0;
};

// Hausdorff distance between two boundaries: radial crossing sets on Radial1D,
// marching-squares contours on 2D grids. Empty-empty gives 0, empty-other +inf.
double boundary_hausdorff(const std::vector<double>& f, const std::vector<double>& g,
                          const GridSpec& grid);

// Per snapshot: Hausdorff distance between the boundaries of {u < a} and
// {vtilde < 0}. Snapshot times must match.
DistanceSeries projection_vs_levelset(const GraphTrajectory& graph, const LevelSetTrajectory& vtilde,
                                      double a, double L);

// Per snapshot: distance between the boundaries of {u < a1} and {u < a2}.
DistanceSeries level_robustness(const GraphTrajectory& graph, double a1, double a2);

// min over snapshots and nodes of (w - v). Throws if w0 < v0 anywhere.
double ordering_w_v(const LevelSetTrajectory& w, const LevelSetTrajectory& v);

struct ZeroLevelReport {
  double worst = 0.0;
  std::size_t samples = 0;
  std::size_t skipped_outside = 0;  // graph points beyond the w window
  bool truncated = false;
};

// max |w(x, u(x,t), t)| over graph nodes with u < a, pairing each w snapshot
// with the graph snapshot closest in time (within time_tol).
ZeroLevelReport graph_on_zero_level(const GraphTrajectory& graph, const LevelSetTrajectory& w,
                                    double a, double time_tol = 1e-6, double z_offset = 0.0);

// max |v(r, z, t) - vtilde(r, t)| over z and snapshots.
double cylinder_product(const LevelSetTrajectory& v, const LevelSetTrajectory& vtilde);

struct MonotoneLimitReport {
  double worst_order_violation = 0.0;  // max of w^{L_i} - w^{L_{i+1}} and w^{L_max} - w
  std::vector<std::vector<double>> mean_gaps;  // [snapshot][L] mean of (w - w^L)
  bool ordered = true;
  bool gaps_decreasing = true;
  bool pass = true;
};

MonotoneLimitReport monotone_limit(const std::vector<double>& Ls,
                                   const std::vector<LevelSetTrajectory>& wL,
                                   const LevelSetTrajectory& w, double slack = 1e-12);

struct VanishingTimes {
  std::optional<double> t_graph;
  std::optional<double> t_levelset;
  bool flagged() const { return !t_graph && !t_levelset; }
};

// t_graph: first snapshot with {u < a} empty. t_levelset: first snapshot with
// {vtilde < 0} empty.
VanishingTimes vanishing_times(const GraphTrajectory& graph, const LevelSetTrajectory& vtilde, double a);

// First snapshot time at which vtilde < 0 at r = 0 (the hole of a radial
// annulus has closed).
std::optional<double> inner_crossing_vanish_time(const LevelSetTrajectory& vtilde);

// Component count of {u < a} (graph) or {w < 0} per snapshot.
std::vector<int> component_history(const GraphTrajectory& graph, double a);
std::vector<int> component_history(const LevelSetTrajectory& w);

// First snapshot time at which the count reaches at least `to` after having
// been `from`.
std::optional<double> split_time(const std::vector<double>& times, const std::vector<int>& counts,
                                 int from = 1, int to = 2);

struct CheckResult {
  std::string name;
  std::string scenario;
  double worst_value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

}  // namespace mcf
