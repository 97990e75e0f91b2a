#include <cmath>

#include "doctest.h"
#include "mcf/graphflow.hpp"
#include "mcf/oracles.hpp"
#include "support.hpp"

using namespace mcf;

TEST_SUITE("oracles") {

TEST_CASE("shrinking radii") {
  auto s = sphere(2, 1.0);
  CHECK(*radius(s, 0.0) == 1.0);
  CHECK(*radius(s, 0.1) == doctest::Approx(std::sqrt(0.6)));
  CHECK(collapse_time(s) == doctest::Approx(0.25));
  CHECK_FALSE(radius(s, 0.3).has_value());
  CHECK(collapse_time(sphere(2, 0.5)) == doctest::Approx(0.0625));
  CHECK(collapse_time(cylinder(1, 1.0)) == doctest::Approx(0.5));
  CHECK(*radius(cylinder(1, 1.0), 0.25) == doctest::Approx(std::sqrt(0.5)));
  // the collapse time is a duration; the radius law is shifted by t0
  auto c = cylinder(1, 0.5, 0.2);
  CHECK(collapse_time(c) == doctest::Approx(0.125));
  CHECK(radius(c, 0.2 + 0.125 - 1e-9).has_value());
  CHECK_FALSE(radius(c, 0.2 + 0.125 + 1e-9).has_value());
  CHECK(*radius(c, 0.2) == 0.5);
  CHECK_THROWS(radius(c, 0.1));
}

TEST_CASE("sphere barrier stays below the bowl") {
  const GridSpec g = make_grid(GridMode::Radial1D, 0.02, 2.0, 1);
  CappedProblem p;
  p.u0 = test::sample_graph(g, [](double r, double) { return r < 1.0 ? 1.0 / (1.0 - r) + r * r : ESCAPED; });
  p.L = 20.0;
  p.eps = 0.05;
  p.R = 2.0;
  p.T = 0.2;
  auto traj = solve_capped(p, 5);

  auto below = barrier_violation(traj, sphere(2, 0.5), BarrierPlacement{{0.0, 0.0, 0.0}, false});
  CHECK(below.samples > 3);
  CHECK(below.worst_clearance >= -g.h);

  auto inside = barrier_violation(traj, sphere(2, 0.5), BarrierPlacement{{0.0, 0.0, 6.0}, true});
  CHECK(inside.worst_clearance >= -g.h);

  CHECK_THROWS(barrier_violation(traj, sphere(2, 3.0), BarrierPlacement{{0.0, 0.0, 0.0}, false}));
  // a small sphere placed on the wrong side
  CHECK_THROWS(barrier_violation(traj, sphere(2, 0.2), BarrierPlacement{{0.0, 0.0, 6.0}, false}));
}

}  // TEST_SUITE
