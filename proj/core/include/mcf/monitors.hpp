#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mcf/fields.hpp"

namespace mcf {

struct MonitorValue {
  double value = 0.0;
  bool flagged = false;  // empty region or invalid parameters
};

// max over {u < a} of v (u - a)^2.
MonitorValue c1_monitor(const GraphField& u, double a);

// sup over {u < a} of t (u - a)^4 G + lambda (u - a)^2 v^2; flagged when
// k v^2 > 1/2 somewhere in {u < a} or t is outside [0, 1].
MonitorValue c2_monitor(const GraphField& u, double t, double a, double k, double lambda);

// 0.9 / (3 max v^2) over {u < a}.
double default_k(const GraphField& u, double a);
// 2 max (u - a)^2 over {u < a}.
double default_lambda(const GraphField& u, double a);

// max v over {u <= a - 1}.
MonitorValue gradient_bound(const GraphField& u, double a);

// max v over {u <= a} across all snapshots, at least 1.
double holder_constant(const GraphTrajectory& traj, double a);

struct HolderResult {
  double worst = 0.0;
  double bound = 0.0;
  double M = 1.0;
  std::size_t pairs = 0;
  bool pass = true;
  std::vector<double> worst_by_snapshot;  // worst quotient of pairs ending at each snapshot
};

// Quotients |u(x,t1) - u(x,t2)| / sqrt|t1 - t2| over snapshot pairs closer than
// 1/(8(n+1)M^2) with u <= a - 1 at one end. Bound sqrt(2(n+1)) (M+1), 5% slack.
// Empty probe list means every node.
HolderResult holder_check(const GraphTrajectory& traj, const std::vector<std::size_t>& probes,
                          double a, std::optional<double> M = std::nullopt);

// Incremental form of holder_check for snapshots arriving in time order; only
// snapshots inside the window are retained. M must be fixed up front.
class HolderStream {
 public:
  HolderStream(double a, double M, int n, std::vector<std::size_t> probes = {});
  void add(const GraphField& u);
  const HolderResult& result() const { return res_; }
  double window() const { return window_; }

 private:
  double a_;
  double window_;
  std::vector<std::size_t> probes_;
  std::vector<GraphField> recent_;
  HolderResult res_;
};

// Highest level <= cap at which the datum is resolved: h v <= 1 on {u < level}.
double resolved_level(const GraphField& u, double cap);

// Fills traj.monitors with one record per snapshot. k and lambda are fixed
// from the first snapshot.
void attach_monitors(GraphTrajectory& traj, double a, const std::vector<std::size_t>& probes = {});

struct MonitorSummary {
  bool c1_nonincreasing = true;
  double c1_worst_ratio = 0.0;  // max over k of c1(t_k) / min_{j<k} c1(t_j)
  bool grad_bound_ok = true;
  double grad_worst_ratio = 0.0;  // max grad_bound / c1(0)
  double c2_slope = 0.0;          // smallest C with c2(t) <= c2(0) + C t on (0, 1]
};

MonitorSummary summarize(const std::vector<MonitorRecord>& recs, double slack = 0.01);

}  // namespace mcf
