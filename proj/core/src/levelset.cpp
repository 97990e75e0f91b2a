#include "mcf/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mcf/parallel.hpp"
#include "spatial_index.hpp"

namespace mcf {

namespace {

double clamp1(double x) { return std::clamp(x, -1.0, 1.0); }

double interp_radial(const GraphField& u, double r) {
  const GridSpec& g = u.grid;
  const double x = r / g.h;
  const int m = g.count[0];
  if (x > m - 1) return ESCAPED;
  int i = std::min(static_cast<int>(x), m - 2);
  const double t = x - i;
  const double a = u.values[i], b = u.values[i + 1];
  if (t == 0.0) return a;
  if (is_escaped(a) || is_escaped(b)) return ESCAPED;
  return (1.0 - t) * a + t * b;
}

double interp_planar(const GraphField& u, double x, double y) {
  const GridSpec& g = u.grid;
  const double fx = (x - g.lo[0]) / g.h, fy = (y - g.lo[1]) / g.h;
  if (fx < 0 || fy < 0 || fx > g.count[0] - 1 || fy > g.count[1] - 1) return ESCAPED;
  int i = std::min(static_cast<int>(fx), g.count[0] - 2);
  int j = std::min(static_cast<int>(fy), g.count[1] - 2);
  const double s = fx - i, t = fy - j;
  const double a = u.values[g.index(i, j)], b = u.values[g.index(i + 1, j)];
  const double c = u.values[g.index(i, j + 1)], d = u.values[g.index(i + 1, j + 1)];
  if (is_escaped(a) || is_escaped(b) || is_escaped(c) || is_escaped(d)) return ESCAPED;
  return (1 - s) * (1 - t) * a + s * (1 - t) * b + (1 - s) * t * c + s * t * d;
}

// Meridian curve of z = profile(r) as a polyline, clipped above zcut and
// refined until pieces are shorter than `len`.
std::vector<std::array<double, 4>> meridian_polyline(const std::function<double(double)>& profile,
                                                     double r_max, double zcut, double len) {
  auto p = [&](double r) {
    double z = profile(r);
    return is_escaped(z) ? zcut : std::min(z, zcut);
  };
  std::vector<std::array<double, 4>> segs;
  std::function<void(double, double, double, double, int)> add = [&](double r0, double z0, double r1,
                                                                      double z1, int depth) {
    if (z0 >= zcut && z1 >= zcut) return;
    if (depth < 40 && std::hypot(r1 - r0, z1 - z0) > len && r1 - r0 > 1e-13) {
      const double rm = 0.5 * (r0 + r1), zm = p(rm);
      add(r0, z0, rm, zm, depth + 1);
      add(rm, zm, r1, z1, depth + 1);
      return;
    }
    segs.push_back({r0, z0, r1, z1});
  };
  const int m = std::max(8, static_cast<int>(std::ceil(r_max / len)));
  double r0 = 0.0, z0 = p(0.0);
  for (int i = 1; i <= m; ++i) {
    const double r1 = r_max * i / m, z1 = p(r1);
    add(r0, z0, r1, z1, 0);
    r0 = r1;
    z0 = z1;
  }
  return segs;
}

LevelSetField sdf_sphere(const Sphere& s, const GridSpec& g, LevelSetLabel label) {
  if (!(s.radius > 0.0)) throw std::invalid_argument("sphere radius must be positive");
  std::vector<double> w(g.size());
  for (std::size_t idx = 0; idx < w.size(); ++idx) {
    auto ijk = g.unindex(idx);
    double d2 = 0.0;
    switch (g.mode) {
      case GridMode::Radial1D: {
        const double r = g.coord(0, ijk[0]);
        d2 = r * r;
        break;
      }
      case GridMode::Axisym2D: {
        const double r = g.coord(0, ijk[0]), z = g.coord(1, ijk[1]) - s.center[1];
        d2 = r * r + z * z;
        break;
      }
      default:
        for (int a = 0; a < g.dims(); ++a) {
          const double x = g.coord(a, ijk[a]) - s.center[a];
          d2 += x * x;
        }
    }
    w[idx] = clamp1(std::sqrt(d2) - s.radius);
  }
  return LevelSetField(g, std::move(w), 0.0, label);
}

LevelSetField sdf_shell(const RadialShell& s, const GridSpec& g, LevelSetLabel label) {
  if (!(s.r_out > s.r_in) || s.r_in < 0.0) throw std::invalid_argument("empty radial shell");
  std::vector<double> w(g.size());
  for (std::size_t idx = 0; idx < w.size(); ++idx) {
    auto ijk = g.unindex(idx);
    double rho;
    if (g.mode == GridMode::Radial1D || g.mode == GridMode::Axisym2D)
      rho = g.coord(0, ijk[0]);
    else
      rho = std::hypot(g.coord(0, ijk[0]), g.coord(1, ijk[1]));
    const double d = s.r_in > 0.0 ? std::max(s.r_in - rho, rho - s.r_out) : rho - s.r_out;
    w[idx] = clamp1(d);
  }
  return LevelSetField(g, std::move(w), 0.0, label);
}

LevelSetField sdf_meridian(const std::function<double(double)>& profile, double r_max,
                           const GridSpec& g, LevelSetLabel label) {
  if (g.mode != GridMode::Axisym2D) throw std::invalid_argument("radial graphs need an Axisym2D grid");
  const double zhi = g.coord(1, g.count[1] - 1);
  auto segs = meridian_polyline(profile, r_max, zhi + 1.5, g.h / 4.0);
  if (segs.empty()) throw std::invalid_argument("graph does not meet the grid window");
  detail::SegmentIndex2D index(segs, std::max(2.0 * g.h, 0.02));
  std::vector<double> w(g.size());
  parallel_for(w.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t idx = b; idx < e; ++idx) {
      auto ijk = g.unindex(idx);
      const double r = g.coord(0, ijk[0]), z = g.coord(1, ijk[1]);
      const double d = index.distance(r, z, 1.0);
      const double zg = profile(r);
      const bool inside = !is_escaped(zg) && z > zg;
      w[idx] = inside ? -d : d;
    }
  });
  return LevelSetField(g, std::move(w), 0.0, label);
}

LevelSetField sdf_planar(const PlanarDomain& s, const GridSpec& g, LevelSetLabel label) {
  if (g.mode != GridMode::Cartesian2D && g.mode != GridMode::Cartesian3D)
    throw std::invalid_argument("planar domains need a Cartesian grid");
  if (s.segments.empty() || !s.inside) throw std::invalid_argument("empty planar domain");
  detail::SegmentIndex2D index(s.segments, std::max(2.0 * g.h, 0.02));
  const int nx = g.count[0], ny = g.count[1];
  std::vector<double> plane(static_cast<std::size_t>(nx) * ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double x = g.coord(0, i), y = g.coord(1, j);
      const double d = index.distance(x, y, 1.0);
      plane[static_cast<std::size_t>(i) * ny + j] = s.inside(x, y) ? -d : d;
    }
  std::vector<double> w(g.size());
  for (std::size_t idx = 0; idx < w.size(); ++idx) {
    auto ijk = g.unindex(idx);
    w[idx] = plane[static_cast<std::size_t>(ijk[0]) * ny + ijk[1]];
  }
  return LevelSetField(g, std::move(w), 0.0, label);
}

LevelSetField sdf_sampled_surface(const GraphField& u, const GridSpec& g, LevelSetLabel label) {
  const GridSpec& gu = u.grid;
  const double zlo = g.coord(2, 0) - 1.0, zhi = g.coord(2, g.count[2] - 1) + 1.0;
  const double sp = g.h / 2.0;
  std::vector<std::array<double, 3>> pts;
  auto emit = [&](double x, double y, double z) {
    if (z >= zlo && z <= zhi) pts.push_back({x, y, z});
  };
  auto emit_line = [&](std::array<double, 3> a, std::array<double, 3> b) {
    if ((a[2] < zlo && b[2] < zlo) || (a[2] > zhi && b[2] > zhi)) return;
    const double L = std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                               (a[2] - b[2]) * (a[2] - b[2]));
    const int k = std::max(1, static_cast<int>(std::ceil(L / sp)));
    for (int s = 0; s < k; ++s) {
      const double t = static_cast<double>(s) / k;
      emit(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2]));
    }
  };
  const int sub = std::max(1, static_cast<int>(std::ceil(gu.h / sp)));
  const double hs = gu.h / sub;
  const int mx = (gu.count[0] - 1) * sub, my = (gu.count[1] - 1) * sub;
  for (int i = 0; i <= mx; ++i)
    for (int j = 0; j <= my; ++j) {
      const double x = gu.lo[0] + i * hs, y = gu.lo[1] + j * hs;
      const double z = interp_planar(u, x, y);
      if (is_escaped(z)) continue;
      std::array<double, 3> a{x, y, z};
      emit(x, y, z);
      if (i < mx) {
        const double z2 = interp_planar(u, x + hs, y);
        if (!is_escaped(z2)) emit_line(a, {x + hs, y, z2});
      }
      if (j < my) {
        const double z2 = interp_planar(u, x, y + hs);
        if (!is_escaped(z2)) emit_line(a, {x, y + hs, z2});
      }
    }
  if (pts.empty()) throw std::invalid_argument("graph does not meet the grid window");
  detail::PointIndex3D index(pts, std::max(4.0 * g.h, 0.05));
  std::vector<double> w(g.size());
  parallel_for(w.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t idx = b; idx < e; ++idx) {
      auto ijk = g.unindex(idx);
      const double x = g.coord(0, ijk[0]), y = g.coord(1, ijk[1]), z = g.coord(2, ijk[2]);
      const double d = index.distance(x, y, z, 1.0);
      const double zg = interp_planar(u, x, y);
      const bool inside = !is_escaped(zg) && z > zg;
      w[idx] = inside ? -d : d;
    }
  });
  return LevelSetField(g, std::move(w), 0.0, label);
}

}  // namespace

LevelSetField truncated_signed_distance(const Shape& shape, const GridSpec& grid,
                                        LevelSetLabel label) {
  if (auto s = std::get_if<Sphere>(&shape)) return sdf_sphere(*s, grid, label);
  if (auto s = std::get_if<RadialShell>(&shape)) return sdf_shell(*s, grid, label);
  if (auto s = std::get_if<RadialGraph>(&shape)) {
    if (!s->profile || !(s->r_max > 0.0)) throw std::invalid_argument("empty radial graph");
    return sdf_meridian(s->profile, s->r_max, grid, label);
  }
  if (auto s = std::get_if<PlanarDomain>(&shape)) return sdf_planar(*s, grid, label);
  const auto& sg = std::get<SampledGraph>(shape);
  if (!sg.u.any_finite()) throw std::invalid_argument("sampled graph is empty");
  if (sg.u.grid.mode == GridMode::Radial1D) {
    const GraphField& u = sg.u;
    return sdf_meridian([&u](double r) { return interp_radial(u, r); },
                        u.grid.coord(0, u.grid.count[0] - 1), grid, label);
  }
  if (sg.u.grid.mode == GridMode::Cartesian2D && grid.mode == GridMode::Cartesian3D)
    return sdf_sampled_surface(sg.u, grid, label);
  throw std::invalid_argument("unsupported sampled graph / grid combination");
}

// ---- operator -------------------------------------------------------------

namespace {

struct Neighbours {
  std::array<std::vector<int>, 3> up, down;
};

Neighbours mirror_neighbours(const GridSpec& g) {
  Neighbours nb;
  for (int a = 0; a < 3; ++a) {
    const int m = g.count[a];
    nb.up[a].resize(m);
    nb.down[a].resize(m);
    for (int i = 0; i < m; ++i) {
      nb.up[a][i] = m == 1 ? i : (i + 1 < m ? i + 1 : m - 2);
      nb.down[a][i] = m == 1 ? i : (i > 0 ? i - 1 : 1);
    }
  }
  return nb;
}

}  // namespace

namespace {

template <int D>
void levelset_rhs_impl(const GridSpec& g, const std::vector<double>& w, double delta_reg,
                       std::vector<double>& out) {
  const double h = g.h, inv2h = 1.0 / (2.0 * h), invh2 = 1.0 / (h * h);
  const double eps2 = (delta_reg * h) * (delta_reg * h);
  const bool radial = g.has_axis();
  const double n = g.n;
  const Neighbours nb = mirror_neighbours(g);
  const long stride[3] = {static_cast<long>(g.count[1]) * g.count[2], g.count[2], 1};
  std::vector<double> inv_r(g.count[0], 0.0);
  for (int i = 1; i < g.count[0]; ++i) inv_r[i] = 1.0 / g.coord(0, i);
  const int n0 = g.count[0], n1 = g.count[1], n2 = g.count[2];
  parallel_for(static_cast<std::size_t>(n0), [&](std::size_t b, std::size_t e) {
    for (int i = static_cast<int>(b); i < static_cast<int>(e); ++i)
      for (int j = 0; j < n1; ++j)
        for (int k = 0; k < n2; ++k) {
          const int ijk[3] = {i, j, k};
          const long idx = (static_cast<long>(i) * n1 + j) * n2 + k;
          const double c = w[idx];
          // flat offsets of the mirrored neighbours along each axis
          long up[D], dn[D];
          for (int a = 0; a < D; ++a) {
            up[a] = (nb.up[a][ijk[a]] - ijk[a]) * stride[a];
            dn[a] = (nb.down[a][ijk[a]] - ijk[a]) * stride[a];
          }
          if (c == 1.0 || c == -1.0) {
            // clamped plateau: every difference vanishes
            bool flat = true;
            for (int a = 0; a < D && flat; ++a) {
              flat = w[idx + up[a]] == c && w[idx + dn[a]] == c;
              for (int bb = a + 1; bb < D && flat; ++bb)
                flat = w[idx + up[a] + up[bb]] == c && w[idx + up[a] + dn[bb]] == c &&
                       w[idx + dn[a] + up[bb]] == c && w[idx + dn[a] + dn[bb]] == c;
            }
            if (flat) {
              out[idx] = 0.0;
              continue;
            }
          }
          double p[D], Hd[D], Hm[D > 1 ? D * (D - 1) / 2 : 1];
          for (int a = 0; a < D; ++a) {
            const double wu = w[idx + up[a]], wd = w[idx + dn[a]];
            p[a] = (wu - wd) * inv2h;
            Hd[a] = (wu - 2.0 * c + wd) * invh2;
          }
          int m = 0;
          for (int a = 0; a < D; ++a)
            for (int bb = a + 1; bb < D; ++bb)
              Hm[m++] = (w[idx + up[a] + up[bb]] - w[idx + up[a] + dn[bb]] - w[idx + dn[a] + up[bb]] +
                         w[idx + dn[a] + dn[bb]]) *
                        (0.25 * invh2);
          double S = 0.0;
          for (int a = 0; a < D; ++a) S += p[a] * p[a];
          S += eps2;
          double num = 0.0;
          for (int a = 0; a < D; ++a) num += (S - p[a] * p[a]) * Hd[a];
          m = 0;
          for (int a = 0; a < D; ++a)
            for (int bb = a + 1; bb < D; ++bb) num -= 2.0 * p[a] * p[bb] * Hm[m++];
          double F = num / S;
          if (radial) {
            if (i == 0)
              F += n * Hd[0];
            else
              F += n * p[0] * inv_r[i];
          }
          out[idx] = F;
        }
  }, 8);
}

}  // namespace

std::vector<double> levelset_rhs(const LevelSetField& field, double delta_reg) {
  std::vector<double> out(field.values.size());
  switch (field.grid.dims()) {
    case 1: levelset_rhs_impl<1>(field.grid, field.values, delta_reg, out); break;
    case 2: levelset_rhs_impl<2>(field.grid, field.values, delta_reg, out); break;
    default: levelset_rhs_impl<3>(field.grid, field.values, delta_reg, out); break;
  }
  return out;
}

double levelset_cfl_dt(const GridSpec& g) { return 0.4 * g.h * g.h / (2.0 * g.dims()); }

LevelSetField step_levelset(const LevelSetField& w, double dt, double delta_reg) {
  const double lim = levelset_cfl_dt(w.grid);
  if (!(dt > 0.0) || dt > lim * (1.0 + 1e-12))
    throw std::invalid_argument("step_levelset: dt exceeds the CFL limit");
  std::vector<double> rhs = levelset_rhs(w, delta_reg);
  LevelSetField out = w;
  for (std::size_t i = 0; i < rhs.size(); ++i) out.values[i] = clamp1(w.values[i] + dt * rhs[i]);
  out.time = w.time + dt;
  return out;
}

LevelSetRun solve_levelset(const LevelSetProblem& p, int snap_every, const LevelSetSnapshotHook& hook,
                           bool keep_snapshots) {
  if (!(p.delta_reg > 0.0 && p.delta_reg <= 1.0)) throw std::invalid_argument("delta_reg must lie in (0, 1]");
  if (!(p.T > 0.0)) throw std::invalid_argument("horizon T must be positive");
  if (snap_every < 1) throw std::invalid_argument("snap_every must be >= 1");
  for (double x : p.w0.values)
    if (!(x >= -1.0 && x <= 1.0)) throw std::invalid_argument("w0 must take values in [-1, 1]");
  const double dt = p.fixed_dt ? *p.fixed_dt : levelset_cfl_dt(p.w0.grid);
  if (dt > levelset_cfl_dt(p.w0.grid) * (1.0 + 1e-12))
    throw std::invalid_argument("fixed dt exceeds the CFL limit");
  const double band = 3.0 * p.w0.grid.h;
  LevelSetRun run;
  auto record = [&](const LevelSetField& f) {
    run.fattening.push_back(fattening_measure(f, band));
    if (hook) hook(f);
    if (keep_snapshots) run.traj.push(f);
  };
  LevelSetField w = p.w0;
  w.time = 0.0;
  record(w);
  long k = 0;
  while (w.time < p.T - 1e-6 * dt) {
    w = step_levelset(w, dt, p.delta_reg);
    ++k;
    w.time = k * dt;  // no drift from repeated addition
    if (k % snap_every == 0 || w.time >= p.T - 1e-6 * dt) record(w);
  }
  if (!keep_snapshots) run.traj.push(w);
  return run;
}

std::vector<double> node_volumes(const GridSpec& g) {
  std::vector<double> vol(g.size(), std::pow(g.h, g.dims()));
  if (!g.has_axis()) return vol;
  const int n = g.n;
  // |S^n| = 2 pi^{(n+1)/2} / Gamma((n+1)/2)
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
  const double other = g.mode == GridMode::Axisym2D ? g.h : 1.0;
  for (std::size_t idx = 0; idx < vol.size(); ++idx) {
    const double r = g.coord(0, g.unindex(idx)[0]);
    const double r0 = std::max(0.0, r - 0.5 * g.h), r1 = r + 0.5 * g.h;
    vol[idx] = sphere * (std::pow(r1, n + 1) - std::pow(r0, n + 1)) / (n + 1) * other;
  }
  return vol;
}

FatteningReport fattening_measure(const LevelSetField& w, double band) {
  if (!(band > 0.0)) throw std::invalid_argument("band must be positive");
  const std::vector<double> vol = node_volumes(w.grid);
  double m_full = 0.0, m_half = 0.0;
  for (std::size_t i = 0; i < vol.size(); ++i) {
    const double a = std::abs(w.values[i]);
    if (a < band) m_full += vol[i];
    if (a < 0.5 * band) m_half += vol[i];
  }
  FatteningReport r;
  r.time = w.time;
  r.band_measure = m_full;
  r.band_width = band;
  // halving the band should halve the measure (20% tolerance)
  r.verdict = (m_full > 0.0 && m_half > 0.6 * m_full) ? FatteningVerdict::Suspicious
                                                       : FatteningVerdict::NonFat;
  return r;
}

MeasureSets measure_theoretic_sets(const Mask& indicator, const GridSpec& g, double r_ball) {
  if (!(r_ball >= 2.0 * g.h - 1e-12)) throw std::invalid_argument("r_ball must be >= 2h");
  if (indicator.size() != g.size()) throw std::invalid_argument("indicator size mismatch");
  const int d = g.dims();
  const int R = static_cast<int>(std::floor(r_ball / g.h + 1e-9));
  std::vector<std::array<int, 3>> offs;
  for (int a = -R; a <= R; ++a)
    for (int b = (d > 1 ? -R : 0); b <= (d > 1 ? R : 0); ++b)
      for (int c = (d > 2 ? -R : 0); c <= (d > 2 ? R : 0); ++c)
        if ((a * a + b * b + c * c) * g.h * g.h <= r_ball * r_ball * (1.0 + 1e-12)) offs.push_back({a, b, c});
  MeasureSets out{Mask(g.size(), 0), Mask(g.size(), 0)};
  parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t idx = b; idx < e; ++idx) {
      auto ijk = g.unindex(idx);
      int inside = 0, total = 0;
      for (const auto& o : offs) {
        int q[3] = {ijk[0] + o[0], ijk[1] + o[1], ijk[2] + o[2]};
        if (g.has_axis() && q[0] < 0) q[0] = -q[0];
        bool ok = true;
        for (int a = 0; a < 3; ++a)
          if (q[a] < 0 || q[a] >= g.count[a]) ok = false;
        if (!ok) continue;
        ++total;
        inside += indicator[g.index(q[0], q[1], q[2])] ? 1 : 0;
      }
      out.interior[idx] = (total > 0 && inside == total) ? 1 : 0;
      out.boundary[idx] = (inside > 0 && inside < total) ? 1 : 0;
    }
  });
  return out;
}

Mask negative_set(const LevelSetField& w) {
  Mask m(w.values.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = w.values[i] < 0.0 ? 1 : 0;
  return m;
}

int connected_components(const Mask& m, const GridSpec& g) {
  std::vector<int> label(m.size(), 0);
  int count = 0;
  std::vector<std::size_t> stack;
  const int d = g.dims();
  for (std::size_t s = 0; s < m.size(); ++s) {
    if (!m[s] || label[s]) continue;
    ++count;
    label[s] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      auto ijk = g.unindex(cur);
      for (int a = 0; a < d; ++a)
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          auto q = ijk;
          q[a] += sgn;
          if (q[a] < 0 || q[a] >= g.count[a]) continue;
          const std::size_t nidx = g.index(q[0], q[1], q[2]);
          if (m[nidx] && !label[nidx]) {
            label[nidx] = count;
            stack.push_back(nidx);
          }
        }
    }
  }
  return count;
}

}  // namespace mcf
