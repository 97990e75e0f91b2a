#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcf/compare.hpp"
#include "mcf/fields.hpp"

namespace mcf::io {

// Snapshot text format: header lines mode=, h=, extent=, n=, time=,
// sentinel=inf, origin=, shape= (and label= for level-set fields), then one
// value per line in row-major order, 17 significant digits, ESCAPED as "inf".
void write_snapshot(std::ostream& os, const GraphField& f);
void write_snapshot(std::ostream& os, const LevelSetField& f);
GraphField read_graph_snapshot(std::istream& is);
LevelSetField read_levelset_snapshot(std::istream& is);

void write_snapshot_file(const std::filesystem::path& p, const GraphField& f);
void write_snapshot_file(const std::filesystem::path& p, const LevelSetField& f);
GraphField read_graph_snapshot_file(const std::filesystem::path& p);
LevelSetField read_levelset_snapshot_file(const std::filesystem::path& p);

// <dir>/<prefix>_<index>.snap, index zero-padded to 6 digits.
void write_trajectory(const std::filesystem::path& dir, const std::string& prefix,
                      const GraphTrajectory& t);
void write_trajectory(const std::filesystem::path& dir, const std::string& prefix,
                      const LevelSetTrajectory& t);
GraphTrajectory read_graph_trajectory(const std::filesystem::path& dir, const std::string& prefix);
LevelSetTrajectory read_levelset_trajectory(const std::filesystem::path& dir, const std::string& prefix);

std::string format_double(double x);

// header time,c1,c2,holder_worst,grad_bound,a,k,lambda,M
void write_monitor_csv(std::ostream& os, const std::vector<MonitorRecord>& recs);
void write_monitor_csv_file(const std::filesystem::path& p, const std::vector<MonitorRecord>& recs);

// One JSON object per line: name, scenario, worst_value, threshold, pass.
std::string report_line(const CheckResult& r);
void write_report(std::ostream& os, const std::vector<CheckResult>& checks);

// Deterministic SVG renderings (fixed viewBox, 6-decimal coordinates).
std::string svg_levelset(const LevelSetField& f);
std::string svg_graph(const GraphField& u, double a);

struct SvgResult {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

// One SVG per requested time, using the nearest snapshot (with a warning when
// the time is not an exact snapshot time).
SvgResult emit_svg_contours(const LevelSetTrajectory& t, const std::vector<double>& times,
                            const std::filesystem::path& dir, const std::string& prefix);
SvgResult emit_svg_contours(const GraphTrajectory& t, const std::vector<double>& times,
                            const std::filesystem::path& dir, const std::string& prefix, double a);

}  // namespace mcf::io
