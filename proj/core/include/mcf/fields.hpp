#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcf {

enum class GridMode { Radial1D, Axisym2D, Cartesian2D, Cartesian3D };

std::string to_string(GridMode m);
GridMode grid_mode_from_string(const std::string& s);

// u = +infinity outside the evolving domain.
inline constexpr double ESCAPED = std::numeric_limits<double>::infinity();
inline bool is_escaped(double x) { return x == ESCAPED; }

// Uniform grid. Axis 0 is r (or x), axis 1 is z (or y), axis 2 is z in 3D.
// Storage is row-major: index = (i0 * count[1] + i1) * count[2] + i2.
struct GridSpec {
  GridMode mode = GridMode::Radial1D;
  double h = 0.0;
  double extent = 0.0;
  int n = 1;
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  std::array<int, 3> count{1, 1, 1};

  int dims() const;
  std::size_t size() const {
    return static_cast<std::size_t>(count[0]) * count[1] * count[2];
  }
  double coord(int axis, int i) const { return lo[axis] + i * h; }
  std::size_t index(int i, int j = 0, int k = 0) const {
    return (static_cast<std::size_t>(i) * count[1] + j) * count[2] + k;
  }
  std::array<int, 3> unindex(std::size_t idx) const {
    int k = static_cast<int>(idx % count[2]);
    idx /= count[2];
    int j = static_cast<int>(idx % count[1]);
    return {static_cast<int>(idx / count[1]), j, k};
  }
  bool has_axis() const {
    return mode == GridMode::Radial1D || mode == GridMode::Axisym2D;
  }
  bool operator==(const GridSpec&) const = default;
};

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Default windows: Radial1D r in [0, extent]; Axisym2D r in [0, extent],
// z in [-extent, extent]; Cartesian modes [-extent, extent] per axis.
GridSpec make_grid(GridMode mode, double h, double extent, int n);

// Same validation, explicit per-axis window [lo, hi]. Radial axes must start at 0.
GridSpec make_grid_window(GridMode mode, double h, int n,
                          std::array<double, 3> lo, std::array<double, 3> hi);

struct GraphField {
  GridSpec grid;
  std::vector<double> values;
  double time = 0.0;
  double lower_bound = -std::numeric_limits<double>::infinity();

  GraphField() = default;
  GraphField(GridSpec g, std::vector<double> v, double t = 0.0);
  double finite_min() const;
  bool any_finite() const;
};

enum class LevelSetLabel { W_graph, Vtilde_boundary, V_cylinder };

std::string to_string(LevelSetLabel l);

struct LevelSetField {
  GridSpec grid;
  std::vector<double> values;
  double time = 0.0;
  LevelSetLabel label = LevelSetLabel::Vtilde_boundary;

  LevelSetField() = default;
  LevelSetField(GridSpec g, std::vector<double> v, double t, LevelSetLabel l);
};

// One row of per-snapshot monitor output.
struct MonitorRecord {
  double time = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double holder_worst = 0.0;
  double grad_bound = 0.0;
  double a = 0.0;
  double k = 0.0;
  double lambda = 0.0;
  double M = 0.0;
  bool c1_empty = false;
  bool c2_flagged = false;
  bool grad_empty = false;
};

template <class Field>
struct Trajectory {
  std::vector<Field> snapshots;
  std::vector<MonitorRecord> monitors;

  void push(Field f) {
    if (!snapshots.empty()) {
      if (!(f.time > snapshots.back().time))
        throw std::invalid_argument("trajectory times must increase strictly");
      if (!(f.grid == snapshots.front().grid))
        throw std::invalid_argument("trajectory snapshots must share one grid");
    }
    snapshots.push_back(std::move(f));
  }
  const GridSpec& grid() const { return snapshots.front().grid; }
  std::vector<double> times() const {
    std::vector<double> t;
    t.reserve(snapshots.size());
    for (const auto& s : snapshots) t.push_back(s.time);
    return t;
  }
  std::size_t nearest(double t) const;
};

template <class Field>
std::size_t Trajectory<Field>::nearest(double t) const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < snapshots.size(); ++i)
    if (std::abs(snapshots[i].time - t) < std::abs(snapshots[best].time - t)) best = i;
  return best;
}

using GraphTrajectory = Trajectory<GraphField>;
using LevelSetTrajectory = Trajectory<LevelSetField>;

using Mask = std::vector<std::uint8_t>;

// A grid line along `axis`; the other two indices are fixed.
struct AxisLine {
  int axis = 0;
  std::array<int, 3> fixed{0, 0, 0};
};

// Positions along the line where membership in {w < 0} changes, linearly
// interpolated between neighbouring nodes.
std::vector<double> zero_crossings(const LevelSetField& field, const AxisLine& line);
std::vector<double> zero_crossings(const std::vector<double>& values,
                                   const std::vector<double>& coords);

// True where u is ESCAPED or u >= a.
Mask escaped_region(const GraphField& field, double a);

// Marching squares on a 2D grid: segments (x0, y0, x1, y1) of the boundary of
// {values < level}. Nodes holding +inf count as outside.
std::vector<std::array<double, 4>> contour_segments(const std::vector<double>& values,
                                                    const GridSpec& grid, double level);

}  // namespace mcf
