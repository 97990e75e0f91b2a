#include "mcf/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcf/levelset.hpp"
#include "spatial_index.hpp"

namespace mcf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double set_distance_1d(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (double x : a) {
    double best = kInf;
    for (double y : b) best = std::min(best, std::abs(x - y));
    worst = std::max(worst, best);
  }
  return worst;
}

double directed_segments(const std::vector<std::array<double, 4>>& A,
                         const std::vector<std::array<double, 4>>& B, double cell) {
  detail::SegmentIndex2D index(B, cell);
  double worst = 0.0;
  for (const auto& s : A)
    for (double t : {0.0, 0.5, 1.0}) {
      const double x = s[0] + t * (s[2] - s[0]), y = s[1] + t * (s[3] - s[1]);
      worst = std::max(worst, index.distance(x, y, 1e6));
    }
  return worst;
}

std::vector<double> radial_crossings(const std::vector<double>& f, const GridSpec& g) {
  std::vector<double> coords(g.count[0]);
  for (int i = 0; i < g.count[0]; ++i) coords[i] = g.coord(0, i);
  std::vector<double> vals(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) vals[i] = is_escaped(f[i]) ? 1e300 : f[i];
  return zero_crossings(vals, coords);
}

std::vector<double> shifted(const std::vector<double>& u, double a) {
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = is_escaped(u[i]) ? ESCAPED : u[i] - a;
  return out;
}

void require_same_times(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  if (a.size() != b.size()) throw CompareError("trajectories have different snapshot counts");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol * std::max(1.0, std::abs(a[i])))
      throw CompareError("snapshot times do not match");
}

}  // namespace

double boundary_hausdorff(const std::vector<double>& f, const std::vector<double>& g,
                          const GridSpec& grid) {
  if (grid.mode == GridMode::Radial1D) {
    const auto a = radial_crossings(f, grid), b = radial_crossings(g, grid);
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return kInf;
    return std::max(set_distance_1d(a, b), set_distance_1d(b, a));
  }
  if (grid.dims() != 2) throw CompareError("boundary distance needs a 1D or 2D grid");
  const auto A = contour_segments(f, grid, 0.0), B = contour_segments(g, grid, 0.0);
  if (A.empty() && B.empty()) return 0.0;
  if (A.empty() || B.empty()) return kInf;
  const double cell = std::max(4.0 * grid.h, 0.05);
  return std::max(directed_segments(A, B, cell), directed_segments(B, A, cell));
}

DistanceSeries projection_vs_levelset(const GraphTrajectory& graph, const LevelSetTrajectory& vtilde,
                                      double a, double L) {
  if (a > L - 1.0) throw CompareError("projection level a must be <= L-1");
  if (graph.snapshots.empty() || vtilde.snapshots.empty()) throw CompareError("empty trajectory");
  const GridSpec& gg = graph.grid();
  const GridSpec& gv = vtilde.grid();
  if (gg.mode != gv.mode || gg.h != gv.h || gg.count != gv.count || gg.lo != gv.lo)
    throw CompareError("graph and level-set grids differ");
  require_same_times(graph.times(), vtilde.times(), 1e-9);
  DistanceSeries out;
  for (std::size_t s = 0; s < graph.snapshots.size(); ++s) {
    const double d = boundary_hausdorff(shifted(graph.snapshots[s].values, a),
                                        vtilde.snapshots[s].values, gg);
    out.times.push_back(graph.snapshots[s].time);
    out.distances.push_back(d);
    out.worst = std::max(out.worst, d);
  }
  return out;
}

DistanceSeries level_robustness(const GraphTrajectory& graph, double a1, double a2) {
  DistanceSeries out;
  for (const auto& s : graph.snapshots) {
    const double d = boundary_hausdorff(shifted(s.values, a1), shifted(s.values, a2), s.grid);
    out.times.push_back(s.time);
    out.distances.push_back(d);
    out.worst = std::max(out.worst, d);
  }
  return out;
}

double ordering_w_v(const LevelSetTrajectory& w, const LevelSetTrajectory& v) {
  if (w.snapshots.empty() || v.snapshots.empty()) throw CompareError("empty trajectory");
  if (!(w.grid() == v.grid())) throw CompareError("w and v grids differ");
  require_same_times(w.times(), v.times(), 1e-9);
  const auto& w0 = w.snapshots.front().values;
  const auto& v0 = v.snapshots.front().values;
  for (std::size_t i = 0; i < w0.size(); ++i)
    if (w0[i] < v0[i]) throw CompareError("initial ordering w0 >= v0 violated");
  double worst = kInf;
  for (std::size_t s = 0; s < w.snapshots.size(); ++s) {
    const auto& a = w.snapshots[s].values;
    const auto& b = v.snapshots[s].values;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::min(worst, a[i] - b[i]);
  }
  return worst;
}

namespace {

// Multilinear interpolation of a level-set field at ambient point (x, y, z).
// Returns nullopt outside the grid window.
std::optional<double> sample_levelset(const LevelSetField& f, std::array<double, 3> p) {
  const GridSpec& g = f.grid;
  const int d = g.dims();
  int base[3] = {0, 0, 0};
  double frac[3] = {0, 0, 0};
  for (int a = 0; a < d; ++a) {
    const double x = (p[a] - g.lo[a]) / g.h;
    if (x < -1e-9 || x > g.count[a] - 1 + 1e-9) return std::nullopt;
    int i = std::clamp(static_cast<int>(std::floor(x)), 0, g.count[a] - 2);
    base[a] = i;
    frac[a] = std::clamp(x - i, 0.0, 1.0);
  }
  double acc = 0.0;
  const int corners = 1 << d;
  for (int c = 0; c < corners; ++c) {
    int q[3] = {0, 0, 0};
    double wgt = 1.0;
    for (int a = 0; a < d; ++a) {
      const int bit = (c >> a) & 1;
      q[a] = base[a] + bit;
      wgt *= bit ? frac[a] : 1.0 - frac[a];
    }
    if (wgt == 0.0) continue;
    acc += wgt * f.values[g.index(q[0], q[1], q[2])];
  }
  return acc;
}

}  // namespace

ZeroLevelReport graph_on_zero_level(const GraphTrajectory& graph, const LevelSetTrajectory& w,
                                    double a, double time_tol, double z_offset) {
  ZeroLevelReport rep;
  if (graph.snapshots.empty() || w.snapshots.empty()) throw CompareError("empty trajectory");
  const GridSpec& gg = graph.grid();
  const GridSpec& gw = w.grid();
  const bool radial = gg.mode == GridMode::Radial1D && gw.mode == GridMode::Axisym2D;
  const bool planar = gg.mode == GridMode::Cartesian2D && gw.mode == GridMode::Cartesian3D;
  if (!radial && !planar) throw CompareError("graph grid and w grid are not compatible");
  for (const auto& ws : w.snapshots) {
    const auto& us = graph.snapshots[graph.nearest(ws.time)];
    if (std::abs(us.time - ws.time) > time_tol) continue;
    for (std::size_t idx = 0; idx < us.values.size(); ++idx) {
      const double z = us.values[idx];
      if (is_escaped(z) || !(z < a)) continue;
      auto ijk = gg.unindex(idx);
      std::array<double, 3> p{0, 0, 0};
      if (radial) {
        p = {gg.coord(0, ijk[0]), z + z_offset, 0.0};
      } else {
        p = {gg.coord(0, ijk[0]), gg.coord(1, ijk[1]), z + z_offset};
      }
      auto val = sample_levelset(ws, p);
      if (!val) {
        ++rep.skipped_outside;
        rep.truncated = true;
        continue;
      }
      ++rep.samples;
      rep.worst = std::max(rep.worst, std::abs(*val));
    }
  }
  return rep;
}

double cylinder_product(const LevelSetTrajectory& v, const LevelSetTrajectory& vt) {
  if (v.snapshots.empty() || vt.snapshots.empty()) throw CompareError("empty trajectory");
  const GridSpec& gv = v.grid();
  const GridSpec& gt = vt.grid();
  if (gv.mode != GridMode::Axisym2D || gt.mode != GridMode::Radial1D || gv.h != gt.h ||
      gv.count[0] != gt.count[0])
    throw CompareError("cylinder_product needs matching Axisym2D and Radial1D r-grids");
  require_same_times(v.times(), vt.times(), 1e-9);
  double worst = 0.0;
  for (std::size_t s = 0; s < v.snapshots.size(); ++s)
    for (int i = 0; i < gv.count[0]; ++i) {
      const double ref = vt.snapshots[s].values[i];
      for (int j = 0; j < gv.count[1]; ++j)
        worst = std::max(worst, std::abs(v.snapshots[s].values[gv.index(i, j)] - ref));
    }
  return worst;
}

MonotoneLimitReport monotone_limit(const std::vector<double>& Ls,
                                   const std::vector<LevelSetTrajectory>& wL,
                                   const LevelSetTrajectory& w, double slack) {
  if (Ls.size() != wL.size() || Ls.empty()) throw CompareError("one trajectory per L required");
  for (std::size_t i = 1; i < Ls.size(); ++i)
    if (!(Ls[i] > Ls[i - 1])) throw CompareError("Ls must be strictly increasing");
  for (const auto& t : wL) {
    if (!(t.grid() == w.grid())) throw CompareError("grids differ");
    require_same_times(t.times(), w.times(), 1e-9);
  }
  // precondition at t = 0
  const auto& W0 = w.snapshots.front().values;
  for (std::size_t i = 0; i < wL.size(); ++i) {
    const auto& A = wL[i].snapshots.front().values;
    const auto& B = (i + 1 < wL.size()) ? wL[i + 1].snapshots.front().values : W0;
    for (std::size_t k = 0; k < A.size(); ++k)
      if (A[k] > B[k]) throw CompareError("initial data are not nondecreasing in L");
  }
  MonotoneLimitReport rep;
  const std::size_t S = w.snapshots.size();
  for (std::size_t s = 0; s < S; ++s) {
    const auto& Wv = w.snapshots[s].values;
    std::vector<double> gaps;
    for (std::size_t i = 0; i < wL.size(); ++i) {
      const auto& A = wL[i].snapshots[s].values;
      const auto& B = (i + 1 < wL.size()) ? wL[i + 1].snapshots[s].values : Wv;
      double gap = 0.0;
      for (std::size_t k = 0; k < A.size(); ++k) {
        rep.worst_order_violation = std::max(rep.worst_order_violation, A[k] - B[k]);
        gap += Wv[k] - A[k];
      }
      gaps.push_back(gap / static_cast<double>(A.size()));
    }
    for (std::size_t i = 1; i < gaps.size(); ++i)
      if (!(gaps[i] < gaps[i - 1] || (gaps[i] == 0.0 && gaps[i - 1] == 0.0))) rep.gaps_decreasing = false;
    rep.mean_gaps.push_back(std::move(gaps));
  }
  rep.ordered = rep.worst_order_violation <= slack;
  rep.pass = rep.ordered && rep.gaps_decreasing;
  return rep;
}

VanishingTimes vanishing_times(const GraphTrajectory& graph, const LevelSetTrajectory& vtilde, double a) {
  VanishingTimes out;
  for (const auto& s : graph.snapshots) {
    const bool any = std::any_of(s.values.begin(), s.values.end(),
                                 [a](double x) { return !is_escaped(x) && x < a; });
    if (!any) {
      out.t_graph = s.time;
      break;
    }
  }
  for (const auto& s : vtilde.snapshots) {
    const bool any = std::any_of(s.values.begin(), s.values.end(), [](double x) { return x < 0.0; });
    if (!any) {
      out.t_levelset = s.time;
      break;
    }
  }
  return out;
}

std::optional<double> inner_crossing_vanish_time(const LevelSetTrajectory& vtilde) {
  for (const auto& s : vtilde.snapshots)
    if (s.values.front() < 0.0) return s.time;
  return std::nullopt;
}

std::vector<int> component_history(const GraphTrajectory& graph, double a) {
  std::vector<int> out;
  for (const auto& s : graph.snapshots) {
    Mask m(s.values.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = (!is_escaped(s.values[i]) && s.values[i] < a) ? 1 : 0;
    out.push_back(connected_components(m, s.grid));
  }
  return out;
}

std::vector<int> component_history(const LevelSetTrajectory& w) {
  std::vector<int> out;
  for (const auto& s : w.snapshots) out.push_back(connected_components(negative_set(s), s.grid));
  return out;
}

std::optional<double> split_time(const std::vector<double>& times, const std::vector<int>& counts,
                                 int from, int to) {
  bool seen = false;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == from) seen = true;
    if (seen && counts[i] >= to) return times[i];
  }
  return std::nullopt;
}

}  // namespace mcf
