#include "mcf/fields.hpp"

#include <algorithm>

namespace mcf {

std::string to_string(GridMode m) {
  switch (m) {
    case GridMode::Radial1D: return "Radial1D";
    case GridMode::Axisym2D: return "Axisym2D";
    case GridMode::Cartesian2D: return "Cartesian2D";
    case GridMode::Cartesian3D: return "Cartesian3D";
  }
  return "?";
}

GridMode grid_mode_from_string(const std::string& s) {
  if (s == "Radial1D") return GridMode::Radial1D;
  if (s == "Axisym2D") return GridMode::Axisym2D;
  if (s == "Cartesian2D") return GridMode::Cartesian2D;
  if (s == "Cartesian3D") return GridMode::Cartesian3D;
  throw GridError("unknown grid mode '" + s + "'");
}

std::string to_string(LevelSetLabel l) {
  switch (l) {
    case LevelSetLabel::W_graph: return "W_graph";
    case LevelSetLabel::Vtilde_boundary: return "Vtilde_boundary";
    case LevelSetLabel::V_cylinder: return "V_cylinder";
  }
  return "?";
}

int GridSpec::dims() const {
  switch (mode) {
    case GridMode::Radial1D: return 1;
    case GridMode::Axisym2D:
    case GridMode::Cartesian2D: return 2;
    case GridMode::Cartesian3D: return 3;
  }
  return 0;
}

namespace {

int axis_count(double lo, double hi, double h) {
  double span = (hi - lo) / h;
  long c = std::lround(span);
  if (std::abs(span - static_cast<double>(c)) > 1e-6 * std::max(1.0, span))
    throw GridError("window length is not a multiple of h");
  return static_cast<int>(c) + 1;
}

void validate_common(GridMode mode, double h, int n) {
  if (!(h > 0.0) || !std::isfinite(h)) throw GridError("grid spacing h must be positive");
  if (n < 1) throw GridError("dimension parameter n must be >= 1");
  if ((mode == GridMode::Cartesian2D || mode == GridMode::Cartesian3D) && n != 1)
    throw GridError("Cartesian grids require n = 1");
}

}  // namespace

GridSpec make_grid(GridMode mode, double h, double extent, int n) {
  validate_common(mode, h, n);
  if (!(extent >= 4.0 * h)) throw GridError("extent must be at least 4h");
  std::array<double, 3> lo{0, 0, 0}, hi{0, 0, 0};
  switch (mode) {
    case GridMode::Radial1D:
      hi[0] = extent;
      break;
    case GridMode::Axisym2D:
      hi[0] = extent;
      lo[1] = -extent;
      hi[1] = extent;
      break;
    case GridMode::Cartesian2D:
      lo = {-extent, -extent, 0};
      hi = {extent, extent, 0};
      break;
    case GridMode::Cartesian3D:
      lo = {-extent, -extent, -extent};
      hi = {extent, extent, extent};
      break;
  }
  GridSpec g = make_grid_window(mode, h, n, lo, hi);
  g.extent = extent;
  return g;
}

GridSpec make_grid_window(GridMode mode, double h, int n,
                          std::array<double, 3> lo, std::array<double, 3> hi) {
  validate_common(mode, h, n);
  GridSpec g;
  g.mode = mode;
  g.h = h;
  g.n = n;
  int d = g.dims();
  if ((mode == GridMode::Radial1D || mode == GridMode::Axisym2D) && lo[0] != 0.0)
    throw GridError("radial axis must start at r = 0");
  double ext = 0.0;
  for (int a = 0; a < 3; ++a) {
    if (a < d) {
      if (!(hi[a] - lo[a] >= 4.0 * h)) throw GridError("extent must be at least 4h on every axis");
      g.lo[a] = lo[a];
      g.count[a] = axis_count(lo[a], hi[a], h);
      ext = std::max({ext, std::abs(lo[a]), std::abs(hi[a])});
    } else {
      g.lo[a] = 0.0;
      g.count[a] = 1;
    }
  }
  g.extent = ext;
  return g;
}

GraphField::GraphField(GridSpec g, std::vector<double> v, double t)
    : grid(std::move(g)), values(std::move(v)), time(t) {
  if (values.size() != grid.size()) throw std::invalid_argument("GraphField size mismatch");
  lower_bound = finite_min();
}

double GraphField::finite_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (double x : values)
    if (!is_escaped(x)) m = std::min(m, x);
  return m;
}

bool GraphField::any_finite() const {
  return std::any_of(values.begin(), values.end(), [](double x) { return !is_escaped(x); });
}

LevelSetField::LevelSetField(GridSpec g, std::vector<double> v, double t, LevelSetLabel l)
    : grid(std::move(g)), values(std::move(v)), time(t), label(l) {
  if (values.size() != grid.size()) throw std::invalid_argument("LevelSetField size mismatch");
}

std::vector<double> zero_crossings(const std::vector<double>& values,
                                   const std::vector<double>& coords) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    double a = values[i], b = values[i + 1];
    if ((a < 0.0) == (b < 0.0)) continue;
    double s = a / (a - b);
    out.push_back(coords[i] + s * (coords[i + 1] - coords[i]));
  }
  return out;
}

std::vector<double> zero_crossings(const LevelSetField& field, const AxisLine& line) {
  const GridSpec& g = field.grid;
  if (line.axis < 0 || line.axis >= g.dims()) throw std::invalid_argument("bad axis");
  int m = g.count[line.axis];
  std::vector<double> vals(m), coords(m);
  std::array<int, 3> idx = line.fixed;
  for (int i = 0; i < m; ++i) {
    idx[line.axis] = i;
    vals[i] = field.values[g.index(idx[0], idx[1], idx[2])];
    coords[i] = g.coord(line.axis, i);
  }
  return zero_crossings(vals, coords);
}

Mask escaped_region(const GraphField& field, double a) {
  Mask m(field.values.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    double u = field.values[i];
    m[i] = (is_escaped(u) || u >= a) ? 1 : 0;
  }
  return m;
}

std::vector<std::array<double, 4>> contour_segments(const std::vector<double>& values,
                                                    const GridSpec& g, double level) {
  if (g.dims() != 2) throw std::invalid_argument("contour_segments needs a 2D grid");
  std::vector<std::array<double, 4>> segs;
  auto val = [&](int i, int j) {
    double x = values[g.index(i, j)];
    return is_escaped(x) ? std::numeric_limits<double>::max() : x - level;
  };
  // crossing point on the edge between two corners
  auto edge = [&](int i0, int j0, int i1, int j1, double a, double b) {
    double s = a / (a - b);
    if (!std::isfinite(s)) s = 0.5;
    s = std::clamp(s, 0.0, 1.0);
    return std::array<double, 2>{g.coord(0, i0) + s * (g.coord(0, i1) - g.coord(0, i0)),
                                 g.coord(1, j0) + s * (g.coord(1, j1) - g.coord(1, j0))};
  };
  for (int i = 0; i + 1 < g.count[0]; ++i)
    for (int j = 0; j + 1 < g.count[1]; ++j) {
      const double c[4] = {val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)};
      const int ci[4] = {i, i + 1, i + 1, i}, cj[4] = {j, j, j + 1, j + 1};
      int mask = 0;
      for (int k = 0; k < 4; ++k)
        if (c[k] < 0.0) mask |= 1 << k;
      if (mask == 0 || mask == 15) continue;
      std::vector<std::array<double, 2>> pts;
      for (int k = 0; k < 4; ++k) {
        const int l = (k + 1) % 4;
        if ((c[k] < 0.0) != (c[l] < 0.0)) pts.push_back(edge(ci[k], cj[k], ci[l], cj[l], c[k], c[l]));
      }
      if (pts.size() == 2) {
        segs.push_back({pts[0][0], pts[0][1], pts[1][0], pts[1][1]});
      } else if (pts.size() == 4) {
        // saddle: decide by the cell-centre average
        const double centre = 0.25 * (c[0] + c[1] + c[2] + c[3]);
        const bool inside0 = c[0] < 0.0;
        if ((centre < 0.0) == inside0) {
          segs.push_back({pts[0][0], pts[0][1], pts[1][0], pts[1][1]});
          segs.push_back({pts[2][0], pts[2][1], pts[3][0], pts[3][1]});
        } else {
          segs.push_back({pts[3][0], pts[3][1], pts[0][0], pts[0][1]});
          segs.push_back({pts[1][0], pts[1][1], pts[2][0], pts[2][1]});
        }
      }
    }
  return segs;
}

}  // namespace mcf
