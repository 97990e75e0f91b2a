#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mcf/levelset.hpp"
#include "support.hpp"

using namespace mcf;

namespace {

double front_radius(const LevelSetField& w) {
  auto c = zero_crossings(w, AxisLine{0, {0, 0, 0}});
  return c.empty() ? 0.0 : c.front();
}

}  // namespace

TEST_SUITE("levelset") {

TEST_CASE("truncated signed distance of a sphere") {
  const GridSpec g = make_grid(GridMode::Cartesian3D, 0.1, 1.5, 1);
  auto w = truncated_signed_distance(Sphere{{0, 0, 0}, 0.7}, g, LevelSetLabel::Vtilde_boundary);
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    auto ijk = g.unindex(i);
    const double d = std::sqrt(std::pow(g.coord(0, ijk[0]), 2) + std::pow(g.coord(1, ijk[1]), 2) +
                               std::pow(g.coord(2, ijk[2]), 2)) - 0.7;
    CHECK(w.values[i] == doctest::Approx(test::clamp1(d)).epsilon(1e-12).scale(1.0));
  }
  const GridSpec r = make_grid(GridMode::Radial1D, 0.05, 2.0, 2);
  auto wr = truncated_signed_distance(Sphere{{0, 0, 0}, 0.5}, r, LevelSetLabel::Vtilde_boundary);
  CHECK(wr.values[0] == doctest::Approx(-0.5));
  CHECK(wr.values.back() == 1.0);
}

TEST_CASE("truncated signed distance of a horizontal graph") {
  const GridSpec g = make_grid_window(GridMode::Axisym2D, 0.05, 1, {0.0, -2.0, 0.0}, {1.0, 2.0, 0.0});
  auto w = truncated_signed_distance(RadialGraph{[](double) { return 0.3; }, 2.0}, g, LevelSetLabel::W_graph);
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    const double z = g.coord(1, g.unindex(i)[1]);
    CHECK(w.values[i] == doctest::Approx(test::clamp1(0.3 - z)).scale(1.0).epsilon(1e-9));
  }
}

TEST_CASE("annular shell distance") {
  const GridSpec g = make_grid(GridMode::Radial1D, 0.01, 2.0, 1);
  auto w = truncated_signed_distance(RadialShell{0.3, 1.0}, g, LevelSetLabel::Vtilde_boundary);
  for (int i = 0; i < g.count[0]; ++i) {
    const double r = g.coord(0, i);
    CHECK(w.values[i] == doctest::Approx(test::clamp1(std::max(0.3 - r, r - 1.0))).scale(1.0));
  }
}

TEST_CASE("rhs of a radial distance function") {
  for (int n : {1, 2}) {
    const GridSpec g = make_grid(GridMode::Radial1D, 0.01, 1.0, n);
    auto w = test::sample_levelset(g, [](double r, double, double) { return r - 0.5; });
    auto f = levelset_rhs(w);
    for (int i = 2; i < g.count[0] - 1; ++i) CHECK(f[i] == doctest::Approx(n / g.coord(0, i)).epsilon(1e-9));
  }
  // plane: no motion
  const GridSpec c = make_grid(GridMode::Cartesian2D, 0.05, 1.0, 1);
  auto p = test::sample_levelset(c, [](double x, double y, double) { return 0.3 * x - 0.4 * y; });
  auto fp = levelset_rhs(p);
  for (std::size_t i = 0; i < fp.size(); ++i) {
    auto ijk = c.unindex(i);
    if (ijk[0] == 0 || ijk[1] == 0 || ijk[0] == c.count[0] - 1 || ijk[1] == c.count[1] - 1) continue;
    CHECK(std::abs(fp[i]) < 1e-12);
  }
}

TEST_CASE("z-independent axisymmetric data evolve like the radial problem") {
  const GridSpec r = make_grid(GridMode::Radial1D, 0.02, 1.0, 1);
  const GridSpec a = make_grid_window(GridMode::Axisym2D, 0.02, 1, {0.0, -0.5, 0.0}, {1.0, 0.5, 0.0});
  auto prof = [](double x) { return test::clamp1(std::cos(4 * x) * (x - 0.5)); };
  auto wr = test::sample_levelset(r, [&](double x, double, double) { return prof(x); });
  auto wa = test::sample_levelset(a, [&](double x, double, double) { return prof(x); });
  const double dt = std::min(levelset_cfl_dt(r), levelset_cfl_dt(a));
  for (int k = 0; k < 100; ++k) {
    wr = step_levelset(wr, dt);
    wa = step_levelset(wa, dt);
  }
  for (std::size_t i = 0; i < wa.values.size(); ++i) REQUIRE(wa.values[i] == wr.values[a.unindex(i)[0]]);
}

TEST_CASE("shrinking sphere follows the radius law") {
  const int n = 2;  // sphere in R^3
  const double r0 = 0.5;
  const GridSpec g = make_grid(GridMode::Radial1D, 0.005, 1.0, n);
  LevelSetProblem p{truncated_signed_distance(Sphere{{0, 0, 0}, r0}, g, LevelSetLabel::Vtilde_boundary), 1.0, 0.04, {}};
  auto run = solve_levelset(p, 100);
  for (const auto& s : run.traj.snapshots) {
    const double exact = std::sqrt(r0 * r0 - 2.0 * n * s.time);
    CHECK(front_radius(s) == doctest::Approx(exact).epsilon(0.02));
  }
}

TEST_CASE("solutions stay in [-1, 1] and dt is checked") {
  const GridSpec g = make_grid(GridMode::Cartesian2D, 0.05, 1.0, 1);
  auto w = test::sample_levelset(g, [](double x, double y, double) { return std::sin(9 * x) * std::cos(7 * y); });
  const double dt = levelset_cfl_dt(g);
  for (int k = 0; k < 50; ++k) w = step_levelset(w, dt);
  for (double x : w.values) {
    CHECK(x <= 1.0);
    CHECK(x >= -1.0);
  }
  CHECK_THROWS(step_levelset(w, 2.0 * dt));
  LevelSetProblem p{w, 1.0, 0.1, 1.0};
  CHECK_THROWS(solve_levelset(p, 1));
}

TEST_CASE("fattening verdicts") {
  const GridSpec g = make_grid(GridMode::Cartesian2D, 0.01, 1.0, 1);
  auto thin = test::sample_levelset(g, [](double x, double y, double) { return test::clamp1(std::hypot(x, y) - 0.5); });
  CHECK(fattening_measure(thin, 0.1).verdict == FatteningVerdict::NonFat);
  auto fat = test::sample_levelset(g, [](double x, double y, double) { return std::max(0.0, std::hypot(x, y) - 0.5); });
  CHECK(fattening_measure(fat, 0.1).verdict == FatteningVerdict::Suspicious);
  CHECK_THROWS(fattening_measure(thin, 0.0));
}

TEST_CASE("node volumes") {
  const double R = 1.0, h = 0.01;
  const GridSpec r = make_grid(GridMode::Radial1D, h, R, 1);
  double s = 0.0;
  for (double v : node_volumes(r)) s += v;
  CHECK(s == doctest::Approx(std::numbers::pi * (R + h / 2) * (R + h / 2)).epsilon(1e-12));
  const GridSpec r2 = make_grid(GridMode::Radial1D, h, R, 2);
  s = 0.0;
  for (double v : node_volumes(r2)) s += v;
  CHECK(s == doctest::Approx(4.0 / 3.0 * std::numbers::pi * std::pow(R + h / 2, 3)).epsilon(1e-12));
  const GridSpec c = make_grid(GridMode::Cartesian2D, 0.1, 1.0, 1);
  for (double v : node_volumes(c)) CHECK(v == doctest::Approx(0.01));
}

TEST_CASE("measure theoretic interior and boundary") {
  const GridSpec g = make_grid(GridMode::Cartesian2D, 0.02, 1.0, 1);
  auto w = test::sample_levelset(g, [](double x, double y, double) { return std::hypot(x, y) - 0.5; });
  auto sets = measure_theoretic_sets(negative_set(w), g, 0.06);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto ijk = g.unindex(i);
    const double d = std::hypot(g.coord(0, ijk[0]), g.coord(1, ijk[1])) - 0.5;
    if (d < -0.07) CHECK(sets.interior[i] == 1);
    if (std::abs(d) > 0.07) CHECK(sets.boundary[i] == 0);
    if (std::abs(d) < 0.01) CHECK(sets.boundary[i] == 1);
    CHECK_FALSE((sets.interior[i] && sets.boundary[i]));
  }
  CHECK_THROWS(measure_theoretic_sets(negative_set(w), g, 0.01));
}

TEST_CASE("connected components") {
  const GridSpec g = make_grid(GridMode::Cartesian2D, 0.05, 1.0, 1);
  auto two = test::sample_levelset(g, [](double x, double y, double) {
    return std::min(std::hypot(x - 0.5, y), std::hypot(x + 0.5, y)) - 0.3;
  });
  CHECK(connected_components(negative_set(two), g) == 2);
  auto none = test::sample_levelset(g, [](double, double, double) { return 1.0; });
  CHECK(connected_components(negative_set(none), g) == 0);
  Mask diag(g.size(), 0);
  diag[g.index(3, 3)] = 1;
  diag[g.index(4, 4)] = 1;  // corner contact only
  CHECK(connected_components(diag, g) == 2);
}

TEST_CASE("the zero set does not depend on the profile") {
  // same initial zero set, different truncated profiles
  const GridSpec g = make_grid(GridMode::Cartesian2D, 0.02, 1.0, 1);
  auto shape = [](double x, double y) { return std::hypot(x / 0.7, y / 0.4) - 1.0; };
  auto w1 = test::sample_levelset(g, [&](double x, double y, double) { return test::clamp1(shape(x, y)); });
  auto w2 = test::sample_levelset(g, [&](double x, double y, double) { return test::clamp1(std::tanh(3.0 * shape(x, y))); });
  const double dt = levelset_cfl_dt(g);
  for (int k = 0; k < 600; ++k) {
    w1 = step_levelset(w1, dt);
    w2 = step_levelset(w2, dt);
  }
  auto s1 = contour_segments(w1.values, g, 0.0), s2 = contour_segments(w2.values, g, 0.0);
  REQUIRE(!s1.empty());
  REQUIRE(!s2.empty());
  auto dist = [](const std::vector<std::array<double, 4>>& A, const std::vector<std::array<double, 4>>& B) {
    double worst = 0.0;
    for (const auto& a : A) {
      double best = 1e9;
      for (const auto& b : B)
        best = std::min({best, std::hypot(a[0] - b[0], a[1] - b[1]), std::hypot(a[0] - b[2], a[1] - b[3])});
      worst = std::max(worst, best);
    }
    return worst;
  };
  CHECK(std::max(dist(s1, s2), dist(s2, s1)) <= 2.0 * g.h);
}

}  // TEST_SUITE
