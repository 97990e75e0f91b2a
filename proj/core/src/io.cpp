#include "mcf/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mcf::io {

namespace fs = std::filesystem;

std::string format_double(double x) {
  if (x == ESCAPED) return "inf";
  if (x == -ESCAPED) return "-inf";
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string fmt6(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

double parse_double(const std::string& s) {
  if (s == "inf") return ESCAPED;
  if (s == "-inf") return -ESCAPED;
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::runtime_error("bad number '" + s + "'");
  return v;
}

void write_header(std::ostream& os, const GridSpec& g, double time) {
  os << "mode=" << to_string(g.mode) << "\n";
  os << "h=" << format_double(g.h) << "\n";
  os << "extent=" << format_double(g.extent) << "\n";
  os << "n=" << g.n << "\n";
  os << "time=" << format_double(time) << "\n";
  os << "sentinel=inf\n";
  os << "origin=" << format_double(g.lo[0]) << "," << format_double(g.lo[1]) << ","
     << format_double(g.lo[2]) << "\n";
  os << "shape=" << g.count[0] << "," << g.count[1] << "," << g.count[2] << "\n";
}

struct Parsed {
  std::map<std::string, std::string> header;
  std::vector<double> values;
};

Parsed parse(std::istream& is) {
  Parsed p;
  std::string line;
  bool in_header = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (in_header && eq != std::string::npos) {
      p.header[line.substr(0, eq)] = line.substr(eq + 1);
      continue;
    }
    in_header = false;
    p.values.push_back(parse_double(line));
  }
  return p;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

GridSpec grid_from_header(const std::map<std::string, std::string>& h) {
  auto get = [&](const std::string& k) {
    auto it = h.find(k);
    if (it == h.end()) throw std::runtime_error("snapshot header lacks '" + k + "'");
    return it->second;
  };
  if (get("sentinel") != "inf") throw std::runtime_error("unsupported sentinel");
  GridSpec g;
  g.mode = grid_mode_from_string(get("mode"));
  g.h = parse_double(get("h"));
  g.extent = parse_double(get("extent"));
  g.n = std::stoi(get("n"));
  if (h.count("origin") && h.count("shape")) {
    auto o = split(get("origin"), ','), s = split(get("shape"), ',');
    if (o.size() != 3 || s.size() != 3) throw std::runtime_error("bad origin/shape header");
    for (int a = 0; a < 3; ++a) {
      g.lo[a] = parse_double(o[a]);
      g.count[a] = std::stoi(s[a]);
    }
  } else {
    g = make_grid(g.mode, g.h, g.extent, g.n);
  }
  return g;
}

}  // namespace

void write_snapshot(std::ostream& os, const GraphField& f) {
  write_header(os, f.grid, f.time);
  for (double x : f.values) os << format_double(x) << "\n";
}

void write_snapshot(std::ostream& os, const LevelSetField& f) {
  write_header(os, f.grid, f.time);
  os << "label=" << to_string(f.label) << "\n";
  for (double x : f.values) os << format_double(x) << "\n";
}

GraphField read_graph_snapshot(std::istream& is) {
  Parsed p = parse(is);
  GridSpec g = grid_from_header(p.header);
  if (p.values.size() != g.size()) throw std::runtime_error("snapshot value count mismatch");
  GraphField f(g, std::move(p.values), parse_double(p.header.at("time")));
  return f;
}

LevelSetField read_levelset_snapshot(std::istream& is) {
  Parsed p = parse(is);
  GridSpec g = grid_from_header(p.header);
  if (p.values.size() != g.size()) throw std::runtime_error("snapshot value count mismatch");
  LevelSetLabel label = LevelSetLabel::Vtilde_boundary;
  if (auto it = p.header.find("label"); it != p.header.end()) {
    if (it->second == "W_graph") label = LevelSetLabel::W_graph;
    else if (it->second == "V_cylinder") label = LevelSetLabel::V_cylinder;
  }
  return LevelSetField(g, std::move(p.values), parse_double(p.header.at("time")), label);
}

void write_snapshot_file(const fs::path& p, const GraphField& f) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  write_snapshot(os, f);
}

void write_snapshot_file(const fs::path& p, const LevelSetField& f) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  write_snapshot(os, f);
}

GraphField read_graph_snapshot_file(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw std::runtime_error("cannot read " + p.string());
  return read_graph_snapshot(is);
}

LevelSetField read_levelset_snapshot_file(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw std::runtime_error("cannot read " + p.string());
  return read_levelset_snapshot(is);
}

namespace {

std::string snap_name(const std::string& prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%06zu.snap", i);
  return prefix + buf;
}

std::vector<fs::path> snapshot_files(const fs::path& dir, const std::string& prefix) {
  std::vector<fs::path> files;
  if (!fs::exists(dir)) return files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind(prefix + "_", 0) == 0 && e.path().extension() == ".snap") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

void write_trajectory(const fs::path& dir, const std::string& prefix, const GraphTrajectory& t) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < t.snapshots.size(); ++i) write_snapshot_file(dir / snap_name(prefix, i), t.snapshots[i]);
}

void write_trajectory(const fs::path& dir, const std::string& prefix, const LevelSetTrajectory& t) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < t.snapshots.size(); ++i) write_snapshot_file(dir / snap_name(prefix, i), t.snapshots[i]);
}

GraphTrajectory read_graph_trajectory(const fs::path& dir, const std::string& prefix) {
  GraphTrajectory t;
  for (const auto& f : snapshot_files(dir, prefix)) t.push(read_graph_snapshot_file(f));
  return t;
}

LevelSetTrajectory read_levelset_trajectory(const fs::path& dir, const std::string& prefix) {
  LevelSetTrajectory t;
  for (const auto& f : snapshot_files(dir, prefix)) t.push(read_levelset_snapshot_file(f));
  return t;
}

void write_monitor_csv(std::ostream& os, const std::vector<MonitorRecord>& recs) {
  os << "time,c1,c2,holder_worst,grad_bound,a,k,lambda,M\n";
  for (const auto& r : recs) {
    os << format_double(r.time) << "," << format_double(r.c1) << "," << format_double(r.c2) << ","
       << format_double(r.holder_worst) << "," << format_double(r.grad_bound) << ","
       << format_double(r.a) << "," << format_double(r.k) << "," << format_double(r.lambda) << ","
       << format_double(r.M) << "\n";
  }
}

void write_monitor_csv_file(const fs::path& p, const std::vector<MonitorRecord>& recs) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  write_monitor_csv(os, recs);
}

std::string report_line(const CheckResult& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["scenario"] = r.scenario;
  j["worst_value"] = std::isfinite(r.worst_value) ? nlohmann::ordered_json(r.worst_value)
                                                   : nlohmann::ordered_json(format_double(r.worst_value));
  j["threshold"] = r.threshold;
  j["pass"] = r.pass;
  if (!r.note.empty()) j["note"] = r.note;
  return j.dump();
}

void write_report(std::ostream& os, const std::vector<CheckResult>& checks) {
  for (const auto& c : checks) os << report_line(c) << "\n";
}

// ---- SVG -------------------------------------------------------------------

namespace {

struct Box {
  double x0, y0, x1, y1;
};

class Svg {
 public:
  explicit Svg(Box b) : box_(b) {}
  void line(double x0, double y0, double x1, double y1, const char* cls) {
    body_ << "<line class=\"" << cls << "\" x1=\"" << fmt6(x0) << "\" y1=\"" << fmt6(-y0) << "\" x2=\""
          << fmt6(x1) << "\" y2=\"" << fmt6(-y1) << "\"/>\n";
  }
  void circle(double cx, double cy, double r) {
    body_ << "<circle class=\"curve\" cx=\"" << fmt6(cx) << "\" cy=\"" << fmt6(-cy) << "\" r=\"" << fmt6(r)
          << "\"/>\n";
  }
  void polyline(const std::vector<std::array<double, 2>>& pts) {
    body_ << "<polyline class=\"curve\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      body_ << (i ? " " : "") << fmt6(pts[i][0]) << "," << fmt6(-pts[i][1]);
    body_ << "\"/>\n";
  }
  std::string str(const std::string& title) const {
    const double w = box_.x1 - box_.x0, h = box_.y1 - box_.y0;
    const double stroke = 0.004 * std::max(w, h);
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt6(box_.x0) << " " << fmt6(-box_.y1) << " "
       << fmt6(w) << " " << fmt6(h) << "\">\n";
    os << "<title>" << title << "</title>\n";
    os << "<style>.axis{stroke:#999;stroke-width:" << fmt6(stroke / 2)
       << "}.curve{fill:none;stroke:#000;stroke-width:" << fmt6(stroke) << "}</style>\n";
    os << "<line class=\"axis\" x1=\"" << fmt6(box_.x0) << "\" y1=\"0.000000\" x2=\"" << fmt6(box_.x1)
       << "\" y2=\"0.000000\"/>\n";
    os << "<line class=\"axis\" x1=\"0.000000\" y1=\"" << fmt6(-box_.y1) << "\" x2=\"0.000000\" y2=\""
       << fmt6(-box_.y0) << "\"/>\n";
    os << body_.str() << "</svg>\n";
    return os.str();
  }

 private:
  Box box_;
  std::ostringstream body_;
};

Box grid_box(const GridSpec& g, int ax0, int ax1, bool mirror0) {
  const double x1 = g.coord(ax0, g.count[ax0] - 1);
  const double x0 = mirror0 ? -x1 : g.lo[ax0];
  return {x0, g.lo[ax1], x1, g.coord(ax1, g.count[ax1] - 1)};
}

std::string title_for(const GridSpec& g, double t) {
  return to_string(g.mode) + " t=" + format_double(t);
}

}  // namespace

std::string svg_levelset(const LevelSetField& f) {
  const GridSpec& g = f.grid;
  switch (g.mode) {
    case GridMode::Radial1D: {
      const double R = g.coord(0, g.count[0] - 1);
      Svg svg({-R, -R, R, R});
      for (double r : zero_crossings(f, AxisLine{0, {0, 0, 0}})) svg.circle(0.0, 0.0, r);
      return svg.str(title_for(g, f.time));
    }
    case GridMode::Axisym2D: {
      Svg svg(grid_box(g, 0, 1, true));
      for (const auto& s : contour_segments(f.values, g, 0.0)) {
        svg.line(s[0], s[1], s[2], s[3], "curve");
        svg.line(-s[0], s[1], -s[2], s[3], "curve");
      }
      return svg.str(title_for(g, f.time));
    }
    case GridMode::Cartesian2D: {
      Svg svg(grid_box(g, 0, 1, false));
      for (const auto& s : contour_segments(f.values, g, 0.0)) svg.line(s[0], s[1], s[2], s[3], "curve");
      return svg.str(title_for(g, f.time));
    }
    case GridMode::Cartesian3D: {
      // slice through the middle of axis 1
      const int jm = g.count[1] / 2;
      GridSpec s2 = make_grid_window(GridMode::Cartesian2D, g.h, 1, {g.lo[0], g.lo[2], 0},
                                     {g.coord(0, g.count[0] - 1), g.coord(2, g.count[2] - 1), 0});
      std::vector<double> slice(s2.size());
      for (int i = 0; i < g.count[0]; ++i)
        for (int k = 0; k < g.count[2]; ++k) slice[s2.index(i, k)] = f.values[g.index(i, jm, k)];
      Svg svg(grid_box(s2, 0, 1, false));
      for (const auto& s : contour_segments(slice, s2, 0.0)) svg.line(s[0], s[1], s[2], s[3], "curve");
      return svg.str(title_for(g, f.time));
    }
  }
  return {};
}

std::string svg_graph(const GraphField& u, double a) {
  const GridSpec& g = u.grid;
  if (g.mode == GridMode::Radial1D) {
    const double R = g.coord(0, g.count[0] - 1);
    double zmin = std::min(0.0, u.finite_min());
    if (!std::isfinite(zmin)) zmin = 0.0;
    Svg svg({-R, zmin - 0.5, R, a + 0.5});
    // profile clipped at height a, mirrored across the axis
    std::vector<std::array<double, 2>> pts;
    for (int i = g.count[0] - 1; i >= 0; --i) {
      const double z = u.values[i];
      pts.push_back({-g.coord(0, i), is_escaped(z) ? a : std::min(z, a)});
    }
    for (int i = 1; i < g.count[0]; ++i) {
      const double z = u.values[i];
      pts.push_back({g.coord(0, i), is_escaped(z) ? a : std::min(z, a)});
    }
    svg.polyline(pts);
    return svg.str(title_for(g, u.time));
  }
  Svg svg(grid_box(g, 0, 1, false));
  for (const auto& s : contour_segments(u.values, g, a)) svg.line(s[0], s[1], s[2], s[3], "curve");
  return svg.str(title_for(g, u.time));
}

namespace {

template <class Traj, class Render>
SvgResult emit(const Traj& t, const std::vector<double>& times, const fs::path& dir, const std::string& prefix,
               Render render) {
  SvgResult res;
  if (t.snapshots.empty()) throw std::invalid_argument("empty trajectory");
  fs::create_directories(dir);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const std::size_t i = t.nearest(times[k]);
    const auto& snap = t.snapshots[i];
    if (std::abs(snap.time - times[k]) > 1e-9 * std::max(1.0, std::abs(times[k])))
      res.warnings.push_back("time " + format_double(times[k]) + " not in trajectory; using snapshot at t=" +
                             format_double(snap.time));
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%03zu.svg", k);
    const fs::path p = dir / (prefix + buf);
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << render(snap);
    res.files.push_back(p);
  }
  return res;
}

}  // namespace

SvgResult emit_svg_contours(const LevelSetTrajectory& t, const std::vector<double>& times, const fs::path& dir,
                            const std::string& prefix) {
  return emit(t, times, dir, prefix, [](const LevelSetField& f) { return svg_levelset(f); });
}

SvgResult emit_svg_contours(const GraphTrajectory& t, const std::vector<double>& times, const fs::path& dir,
                            const std::string& prefix, double a) {
  return emit(t, times, dir, prefix, [a](const GraphField& f) { return svg_graph(f, a); });
}

}  // namespace mcf::io
