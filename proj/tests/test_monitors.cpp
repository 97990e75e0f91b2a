#include <cmath>

#include "doctest.h"
#include "mcf/graphflow.hpp"
#include "mcf/monitors.hpp"
#include "support.hpp"

using namespace mcf;

namespace {

GraphTrajectory bowl_run(double T) {
  const GridSpec g = make_grid(GridMode::Radial1D, 0.02, 2.0, 1);
  CappedProblem p;
  p.u0 = test::sample_graph(g, [](double r, double) { return r < 1.0 ? 1.0 / (1.0 - r) + r * r : ESCAPED; });
  p.L = 20.0;
  p.eps = 0.05;
  p.R = 2.0;
  p.T = T;
  return solve_capped(p, 5);
}

}  // namespace

TEST_SUITE("monitors") {

TEST_CASE("c1 monitor on flat and tilted data") {
  const GridSpec g = make_grid(GridMode::Cartesian2D, 0.1, 1.0, 1);
  auto flat = test::sample_graph(g, [](double, double) { return 0.0; });
  CHECK(c1_monitor(flat, 2.0).value == doctest::Approx(4.0));
  CHECK_FALSE(c1_monitor(flat, 2.0).flagged);
  CHECK(c1_monitor(flat, -1.0).flagged);  // empty sublevel set
  auto plane = test::sample_graph(g, [](double x, double) { return x; });
  CHECK(c1_monitor(plane, 1.0).value == doctest::Approx(4.0 * std::sqrt(2.0)));
}

TEST_CASE("c2 monitor") {
  const GridSpec g = make_grid(GridMode::Radial1D, 0.1, 1.0, 1);
  auto c = test::sample_graph(g, [](double, double) { return 1.0; });
  const double lambda = 0.7;
  CHECK(c2_monitor(c, 0.5, 3.0, 0.1, lambda).value == doctest::Approx(lambda * 4.0));
  CHECK(c2_monitor(c, 2.0, 3.0, 0.1, lambda).flagged);
  auto steep = test::sample_graph(g, [](double r, double) { return 5.0 * r * r; });
  CHECK(c2_monitor(steep, 0.5, 10.0, 0.4, lambda).flagged);
  CHECK_FALSE(c2_monitor(steep, 0.5, 10.0, default_k(steep, 10.0), lambda).flagged);
  CHECK(default_lambda(c, 3.0) == doctest::Approx(8.0));
}

TEST_CASE("gradient bound") {
  const GridSpec g = make_grid(GridMode::Cartesian2D, 0.1, 1.0, 1);
  auto plane = test::sample_graph(g, [](double x, double y) { return 3.0 * x + 4.0 * y; });
  auto b = gradient_bound(plane, 0.0);
  CHECK(b.value == doctest::Approx(std::sqrt(26.0)));
  CHECK(gradient_bound(plane, -100.0).flagged);
}

TEST_CASE("Hoelder check on static data") {
  const GridSpec g = make_grid(GridMode::Radial1D, 0.1, 1.0, 1);
  GraphTrajectory t;
  for (int k = 0; k < 5; ++k) {
    auto f = test::sample_graph(g, [](double r, double) { return r; });
    f.time = 0.001 * k;
    t.push(f);
  }
  auto res = holder_check(t, {}, 3.0);
  CHECK(res.worst == 0.0);
  CHECK(res.pass);
  CHECK(res.pairs > 0);
  CHECK(res.M == doctest::Approx(std::sqrt(1.0 + 1.0)).epsilon(0.01));
}

TEST_CASE("Hoelder check catches a jump") {
  const GridSpec g = make_grid(GridMode::Radial1D, 0.1, 1.0, 1);
  GraphTrajectory t;
  auto a = test::sample_graph(g, [](double, double) { return 0.0; });
  auto b = a;
  b.time = 1e-4;
  b.values[3] = 1.0;  // |du| / sqrt(dt) = 100
  t.push(a);
  t.push(b);
  auto res = holder_check(t, {}, 3.0);
  CHECK_FALSE(res.pass);
  CHECK(res.worst == doctest::Approx(100.0));
  CHECK(res.worst_by_snapshot[1] == doctest::Approx(100.0));
  // outside the window nothing is compared
  t.snapshots[1].time = 1.0;
  CHECK(holder_check(t, {}, 3.0).pairs == 0);
}

TEST_CASE("streamed Hoelder check matches the batch check") {
  auto traj = bowl_run(0.05);
  const double a = 4.0;
  const double M = holder_constant(traj, a);
  auto batch = holder_check(traj, {}, a, M);
  HolderStream s(a, M, traj.grid().n);
  for (const auto& f : traj.snapshots) s.add(f);
  CHECK(s.result().pairs == batch.pairs);
  CHECK(s.result().worst == doctest::Approx(batch.worst).epsilon(1e-14));
  CHECK(s.result().pass == batch.pass);
  CHECK(batch.pass);
}

TEST_CASE("resolved level") {
  const GridSpec g = make_grid(GridMode::Radial1D, 0.01, 2.0, 1);
  auto u = test::sample_graph(g, [](double r, double) { return r < 1.0 ? 1.0 / (1.0 - r) : ESCAPED; });
  const double lvl = resolved_level(u, 30.0);
  CHECK(lvl <= 30.0);
  // at the resolved level h v <= 1, i.e. u' = 1/(1-r)^2 = u^2 <= 100
  CHECK(lvl <= 10.0 + 1e-9);
  CHECK(lvl >= 8.0);
}

TEST_CASE("monitor records along a bowl run") {
  auto traj = bowl_run(0.1);
  attach_monitors(traj, 8.0);
  REQUIRE(traj.monitors.size() == traj.snapshots.size());
  for (const auto& m : traj.monitors) {
    CHECK(m.a == 8.0);
    CHECK(m.k == traj.monitors.front().k);
    CHECK_FALSE(m.c1_empty);
  }
  auto s = summarize(traj.monitors);
  CHECK(s.c1_nonincreasing);
  CHECK(s.grad_bound_ok);
}

TEST_CASE("summary flags a rising c1") {
  std::vector<MonitorRecord> recs(3);
  for (int k = 0; k < 3; ++k) {
    recs[k].time = 0.1 * k;
    recs[k].c1 = 1.0 + 0.1 * k;
    recs[k].grad_bound = 0.5;
  }
  auto s = summarize(recs);
  CHECK_FALSE(s.c1_nonincreasing);
  CHECK(s.c1_worst_ratio == doctest::Approx(1.2));
  recs[2].grad_bound = 2.0;
  CHECK_FALSE(summarize(recs).grad_bound_ok);
}

}  // TEST_SUITE
