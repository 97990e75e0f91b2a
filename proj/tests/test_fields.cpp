#include <cmath>

#include "doctest.h"
#include "mcf/fields.hpp"
#include "support.hpp"

using namespace mcf;

TEST_SUITE("fields") {

TEST_CASE("grid shapes per mode") {
  CHECK(make_grid(GridMode::Radial1D, 0.1, 1.0, 2).count == std::array<int, 3>{11, 1, 1});
  CHECK(make_grid(GridMode::Axisym2D, 0.1, 1.0, 1).count == std::array<int, 3>{11, 21, 1});
  CHECK(make_grid(GridMode::Cartesian2D, 0.1, 1.0, 1).count == std::array<int, 3>{21, 21, 1});
  CHECK(make_grid(GridMode::Cartesian3D, 0.25, 1.0, 1).count == std::array<int, 3>{9, 9, 9});
  const GridSpec g = make_grid(GridMode::Axisym2D, 0.1, 1.0, 1);
  CHECK(g.coord(1, 0) == doctest::Approx(-1.0));
  CHECK(g.coord(0, 10) == doctest::Approx(1.0));
  CHECK(g.has_axis());
  CHECK_FALSE(make_grid(GridMode::Cartesian2D, 0.1, 1.0, 1).has_axis());
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(make_grid(GridMode::Radial1D, 0.0, 1.0, 1), GridError);
  CHECK_THROWS_AS(make_grid(GridMode::Radial1D, -0.1, 1.0, 1), GridError);
  CHECK_THROWS_AS(make_grid(GridMode::Radial1D, 0.3, 1.0, 1), GridError);  // not a multiple
  CHECK_THROWS_AS(make_grid(GridMode::Radial1D, 0.5, 1.0, 1), GridError);  // fewer than 4 cells
  CHECK_THROWS_AS(make_grid(GridMode::Cartesian2D, 0.1, 1.0, 2), GridError);
  CHECK_THROWS_AS(make_grid(GridMode::Radial1D, 0.1, 1.0, 0), GridError);
  CHECK_THROWS_AS(make_grid_window(GridMode::Axisym2D, 0.1, 1, {0.1, 0, 0}, {1, 1, 0}), GridError);
  CHECK_THROWS_AS(grid_mode_from_string("Polar"), GridError);
  CHECK(grid_mode_from_string(to_string(GridMode::Cartesian3D)) == GridMode::Cartesian3D);
}

TEST_CASE("index and unindex are inverse") {
  const GridSpec g = make_grid(GridMode::Cartesian3D, 0.25, 1.0, 1);
  for (std::size_t i = 0; i < g.size(); i += 7) {
    auto ijk = g.unindex(i);
    CHECK(g.index(ijk[0], ijk[1], ijk[2]) == i);
  }
}

TEST_CASE("trajectory ordering") {
  const GridSpec g = make_grid(GridMode::Radial1D, 0.1, 1.0, 1);
  GraphTrajectory t;
  t.push(GraphField(g, std::vector<double>(g.size(), 0.0), 0.0));
  t.push(GraphField(g, std::vector<double>(g.size(), 0.0), 0.1));
  CHECK_THROWS(t.push(GraphField(g, std::vector<double>(g.size(), 0.0), 0.1)));
  const GridSpec g2 = make_grid(GridMode::Radial1D, 0.05, 1.0, 1);
  CHECK_THROWS(t.push(GraphField(g2, std::vector<double>(g2.size(), 0.0), 0.2)));
  CHECK(t.nearest(0.07) == 1);
  CHECK(t.nearest(-3.0) == 0);
}

TEST_CASE("field size mismatch throws") {
  const GridSpec g = make_grid(GridMode::Radial1D, 0.1, 1.0, 1);
  CHECK_THROWS(GraphField(g, std::vector<double>(3, 0.0)));
  CHECK_THROWS(LevelSetField(g, std::vector<double>(3, 0.0), 0.0, LevelSetLabel::W_graph));
}

TEST_CASE("graph field lower bound skips escaped nodes") {
  const GridSpec g = make_grid(GridMode::Radial1D, 0.25, 1.0, 1);
  GraphField u(g, {2.0, 1.5, 3.0, ESCAPED, ESCAPED}, 0.0);
  CHECK(u.lower_bound == 1.5);
  CHECK(u.any_finite());
  GraphField e(g, std::vector<double>(g.size(), ESCAPED), 0.0);
  CHECK_FALSE(e.any_finite());
}

TEST_CASE("zero crossings interpolate linearly") {
  auto c = zero_crossings({-1.0, -0.5, 0.5, 1.0}, {0.0, 1.0, 2.0, 3.0});
  REQUIRE(c.size() == 1);
  CHECK(c[0] == doctest::Approx(1.5));
  CHECK(zero_crossings({1.0, 2.0}, {0.0, 1.0}).empty());

  const GridSpec g = make_grid(GridMode::Radial1D, 0.01, 1.0, 1);
  auto w = test::sample_levelset(g, [](double r, double, double) { return r - 0.437; });
  auto r = zero_crossings(w, AxisLine{0, {0, 0, 0}});
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(0.437).epsilon(1e-12));
}

TEST_CASE("escaped region") {
  const GridSpec g = make_grid(GridMode::Radial1D, 0.25, 1.0, 1);
  GraphField u(g, {0.0, 1.0, 2.0, 3.0, ESCAPED}, 0.0);
  Mask m = escaped_region(u, 2.0);
  CHECK(m == Mask{0, 0, 1, 1, 1});
}

TEST_CASE("contour of a circle") {
  const GridSpec g = make_grid(GridMode::Cartesian2D, 0.02, 1.0, 1);
  const double R = 0.6;
  auto w = test::sample_levelset(g, [&](double x, double y, double) { return std::hypot(x, y) - R; });
  auto segs = contour_segments(w.values, g, 0.0);
  CHECK(segs.size() > 100);
  double worst = 0.0, length = 0.0;
  for (const auto& s : segs) {
    worst = std::max({worst, std::abs(std::hypot(s[0], s[1]) - R), std::abs(std::hypot(s[2], s[3]) - R)});
    length += std::hypot(s[2] - s[0], s[3] - s[1]);
  }
  CHECK(worst < 1e-3);
  CHECK(length == doctest::Approx(2.0 * M_PI * R).epsilon(0.01));
}

TEST_CASE("contour treats escaped nodes as outside") {
  const GridSpec g = make_grid(GridMode::Cartesian2D, 0.25, 1.0, 1);
  std::vector<double> v(g.size(), ESCAPED);
  v[g.index(4, 4)] = -1.0;
  auto segs = contour_segments(v, g, 0.0);
  CHECK(segs.size() == 4);
  CHECK_THROWS(contour_segments(v, make_grid(GridMode::Radial1D, 0.25, 1.0, 1), 0.0));
}

}  // TEST_SUITE
