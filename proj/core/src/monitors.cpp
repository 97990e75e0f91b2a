#include "mcf/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mcf/geometry.hpp"

namespace mcf {

MonitorValue c1_monitor(const GraphField& u, double a) {
  const std::vector<double> v = gradient_function(u);
  MonitorValue out{0.0, true};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = u.values[i];
    if (is_escaped(x) || !(x < a) || is_escaped(v[i])) continue;
    out.flagged = false;
    out.value = std::max(out.value, v[i] * (x - a) * (x - a));
  }
  return out;
}

MonitorValue c2_monitor(const GraphField& u, double t, double a, double k, double lambda) {
  if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
  const GraphGeometry g = graph_geometry(u, k);
  MonitorValue out{0.0, true};
  bool invalid = !(t >= 0.0 && t <= 1.0);
  for (std::size_t i = 0; i < g.v.size(); ++i) {
    const double x = u.values[i];
    if (is_escaped(x) || !(x < a) || is_escaped(g.v[i])) continue;
    if (!g.G_valid[i]) {
      invalid = true;
      continue;
    }
    const double s = x - a;
    const double val = t * s * s * s * s * g.G[i] + lambda * s * s * g.v[i] * g.v[i];
    out.flagged = false;
    out.value = std::max(out.value, val);
  }
  if (invalid) out.flagged = true;
  return out;
}

double default_k(const GraphField& u, double a) {
  const std::vector<double> v = gradient_function(u);
  double vmax = 1.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!is_escaped(u.values[i]) && u.values[i] < a && !is_escaped(v[i])) vmax = std::max(vmax, v[i]);
  return 0.9 / (3.0 * vmax * vmax);
}

double default_lambda(const GraphField& u, double a) {
  double m = 0.0;
  for (double x : u.values)
    if (!is_escaped(x) && x < a) m = std::max(m, (x - a) * (x - a));
  return 2.0 * m;
}

MonitorValue gradient_bound(const GraphField& u, double a) {
  const std::vector<double> v = gradient_function(u);
  MonitorValue out{0.0, true};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = u.values[i];
    if (is_escaped(x) || !(x <= a - 1.0) || is_escaped(v[i])) continue;
    out.flagged = false;
    out.value = std::max(out.value, v[i]);
  }
  return out;
}

double holder_constant(const GraphTrajectory& traj, double a) {
  double M = 1.0;
  for (const auto& s : traj.snapshots) {
    const std::vector<double> v = gradient_function(s);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!is_escaped(s.values[i]) && s.values[i] <= a && !is_escaped(v[i])) M = std::max(M, v[i]);
  }
  return M;
}

HolderResult holder_check(const GraphTrajectory& traj, const std::vector<std::size_t>& probes,
                          double a, std::optional<double> M_in) {
  HolderResult res;
  const std::size_t S = traj.snapshots.size();
  res.worst_by_snapshot.assign(S, 0.0);
  if (S == 0) return res;
  const int n = traj.grid().n;
  res.M = std::max(1.0, M_in ? *M_in : holder_constant(traj, a));
  res.bound = std::sqrt(2.0 * (n + 1)) * (res.M + 1.0);
  const double window = 1.0 / (8.0 * (n + 1) * res.M * res.M);
  std::vector<std::size_t> nodes = probes;
  if (nodes.empty()) {
    nodes.resize(traj.grid().size());
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = i;
  }
  for (std::size_t p = 0; p < S; ++p)
    for (std::size_t q = p + 1; q < S; ++q) {
      const double dt = traj.snapshots[q].time - traj.snapshots[p].time;
      if (!(dt < window)) break;
      const double sq = std::sqrt(dt);
      const auto& A = traj.snapshots[p].values;
      const auto& B = traj.snapshots[q].values;
      for (std::size_t node : nodes) {
        const double x = A[node], y = B[node];
        if (is_escaped(x) || is_escaped(y)) continue;
        if (!(x <= a - 1.0 || y <= a - 1.0)) continue;
        ++res.pairs;
        const double quo = std::abs(x - y) / sq;
        res.worst = std::max(res.worst, quo);
        res.worst_by_snapshot[q] = std::max(res.worst_by_snapshot[q], quo);
      }
    }
  res.pass = res.worst <= res.bound * 1.05;
  return res;
}

HolderStream::HolderStream(double a, double M, int n, std::vector<std::size_t> probes)
    : a_(a), probes_(std::move(probes)) {
  res_.M = std::max(1.0, M);
  res_.bound = std::sqrt(2.0 * (n + 1)) * (res_.M + 1.0);
  window_ = 1.0 / (8.0 * (n + 1) * res_.M * res_.M);
}

void HolderStream::add(const GraphField& u) {
  if (probes_.empty()) {
    probes_.resize(u.values.size());
    for (std::size_t i = 0; i < probes_.size(); ++i) probes_[i] = i;
  }
  std::erase_if(recent_, [&](const GraphField& f) { return !(u.time - f.time < window_); });
  double worst_here = 0.0;
  for (const auto& f : recent_) {
    const double sq = std::sqrt(u.time - f.time);
    for (std::size_t node : probes_) {
      const double x = f.values[node], y = u.values[node];
      if (is_escaped(x) || is_escaped(y)) continue;
      if (!(x <= a_ - 1.0 || y <= a_ - 1.0)) continue;
      ++res_.pairs;
      worst_here = std::max(worst_here, std::abs(x - y) / sq);
    }
  }
  res_.worst = std::max(res_.worst, worst_here);
  res_.worst_by_snapshot.push_back(worst_here);
  res_.pass = res_.worst <= res_.bound * 1.05;
  recent_.push_back(u);
}

double resolved_level(const GraphField& u, double cap) {
  const std::vector<double> v = gradient_function(u);
  double level = cap;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!is_escaped(u.values[i]) && (is_escaped(v[i]) || u.grid.h * v[i] > 1.0))
      level = std::min(level, u.values[i]);
  return level;
}

void attach_monitors(GraphTrajectory& traj, double a, const std::vector<std::size_t>& probes) {
  traj.monitors.clear();
  if (traj.snapshots.empty()) return;
  const GraphField& first = traj.snapshots.front();
  const double k = default_k(first, a);
  const double lambda = default_lambda(first, a);
  const HolderResult hr = holder_check(traj, probes, a);
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    const GraphField& u = traj.snapshots[s];
    MonitorRecord r;
    r.time = u.time;
    const MonitorValue c1 = c1_monitor(u, a);
    const MonitorValue c2 = c2_monitor(u, u.time, a, k, lambda);
    const MonitorValue gb = gradient_bound(u, a);
    r.c1 = c1.value;
    r.c1_empty = c1.flagged;
    r.c2 = c2.value;
    r.c2_flagged = c2.flagged;
    r.grad_bound = gb.value;
    r.grad_empty = gb.flagged;
    r.holder_worst = hr.worst_by_snapshot[s];
    r.a = a;
    r.k = k;
    r.lambda = lambda;
    r.M = hr.M;
    traj.monitors.push_back(r);
  }
}

MonitorSummary summarize(const std::vector<MonitorRecord>& recs, double slack) {
  MonitorSummary s;
  if (recs.empty()) return s;
  double running_min = std::numeric_limits<double>::infinity();
  const double c1_0 = recs.front().c1;
  double c2_0 = recs.front().c2;
  for (const auto& r : recs) {
    if (!r.c1_empty) {
      if (std::isfinite(running_min) && running_min > 0.0)
        s.c1_worst_ratio = std::max(s.c1_worst_ratio, r.c1 / running_min);
      running_min = std::min(running_min, r.c1);
    }
    if (!r.grad_empty && c1_0 > 0.0) s.grad_worst_ratio = std::max(s.grad_worst_ratio, r.grad_bound / c1_0);
    if (r.time > 0.0 && r.time <= 1.0 && !r.c2_flagged)
      s.c2_slope = std::max(s.c2_slope, (r.c2 - c2_0) / r.time);
  }
  s.c1_nonincreasing = s.c1_worst_ratio <= 1.0 + slack;
  s.grad_bound_ok = s.grad_worst_ratio <= 1.0;
  return s;
}

}  // namespace mcf
