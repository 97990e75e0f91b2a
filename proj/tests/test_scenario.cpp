#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mcf/io.hpp"
#include "mcf/scenario.hpp"

using namespace mcf;
namespace fs = std::filesystem;

namespace {

ScenarioConfig small_bowl() {
  auto c = *builtin_scenario("bowl");
  c.h = 0.02;
  c.h_w = 0.05;
  c.L = 20.0;
  c.T = 0.05;
  c.snap_interval = 0.01;
  c.monotone_Ls.clear();
  c.svg_times = {0.0, 0.05};
  return c;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("datum expressions") {
  CHECK(DatumExpression("-2^2").eval(0, 0, 0, 0) == -4.0);
  CHECK(DatumExpression("2^3^2").eval(0, 0, 0, 0) == 512.0);
  CHECK(DatumExpression("1 + 2 * 3 - 4 / 2").eval(0, 0, 0, 0) == 5.0);
  CHECK(DatumExpression("(1 + 2) * 3").eval(0, 0, 0, 0) == 9.0);
  CHECK(DatumExpression("1/dist + r^2").eval(0.5, 0.3, 0.4, 0.25) == doctest::Approx(4.25));
  CHECK(DatumExpression("x*y - 1.5e-1").eval(0, 2, 3, 0) == doctest::Approx(5.85));
  CHECK_THROWS_AS(DatumExpression("1 +"), ConfigError);
  CHECK_THROWS_AS(DatumExpression("foo + 1"), ConfigError);
  CHECK_THROWS_AS(DatumExpression("(1 + 2"), ConfigError);
  CHECK_THROWS_AS(DatumExpression("2 3"), ConfigError);
}

TEST_CASE("config parsing") {
  auto c = parse_config(R"({"name": "t", "domain": "Annulus", "rho1": 0.2, "rho2": 0.9, "datum": "Default"})");
  CHECK(c.domain == DomainKind::Annulus);
  CHECK(c.rho1 == 0.2);
  CHECK_FALSE(c.datum.has_value());
  CHECK(c.level() == c.L - 5.0);
  CHECK_THROWS_AS(parse_config(R"({"name": "t", "domain": "Ball", "rh0": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"name": "t", "domain": "Torus"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"domain": "Ball"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"name": "t", "domain": "Ball", "h": "small"})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config round trip") {
  for (const auto& name : builtin_scenarios()) {
    auto c = *builtin_scenario(name);
    const std::string text = config_to_json(c);
    CHECK(config_to_json(parse_config(text)) == text);
  }
  auto c = small_bowl();
  c.datum = "1/dist + 2*r^2";
  c.fixed_dt = 1e-5;
  c.a = 12.0;
  CHECK(config_to_json(parse_config(config_to_json(c))) == config_to_json(c));
}

TEST_CASE("shipped scenario files match the built-in scenarios") {
  for (const auto& name : builtin_scenarios()) {
    const fs::path p = fs::path(MCF_SOURCE_DIR) / "scenarios" / (name + ".json");
    REQUIRE(fs::exists(p));
    CHECK(config_to_json(load_config(p)) == config_to_json(*builtin_scenario(name)));
  }
  CHECK_FALSE(builtin_scenario("teapot").has_value());
}

TEST_CASE("config validation") {
  for (const auto& name : builtin_scenarios()) CHECK_NOTHROW(validate_config(*builtin_scenario(name)));
  auto d = *builtin_scenario("dumbbell");
  d.lobe_offset = 0.4;
  CHECK_THROWS_WITH_AS(validate_config(d), doctest::Contains("overlap"), ConfigError);
  auto a = *builtin_scenario("annulus");
  a.rho1 = 1.2;
  CHECK_THROWS_AS(validate_config(a), ConfigError);
  auto b = *builtin_scenario("bowl");
  b.R = 1.5;
  CHECK_THROWS_WITH_AS(validate_config(b), doctest::Contains("R ="), ConfigError);
  b = *builtin_scenario("bowl");
  b.a = b.L;
  CHECK_THROWS_AS(validate_config(b), ConfigError);
  auto m = *builtin_scenario("multihole");
  m.holes.push_back({0.5, 0.0, 0.1});
  CHECK_THROWS_AS(validate_config(m), ConfigError);
  m = *builtin_scenario("multihole");
  m.n = 2;
  CHECK_THROWS_AS(validate_config(m), ConfigError);
  b = *builtin_scenario("bowl");
  b.checks = {"c1", "telepathy"};
  CHECK_THROWS_AS(validate_config(b), ConfigError);
}

TEST_CASE("initial domains") {
  auto ball = initial_domain(*builtin_scenario("bowl"));
  CHECK(ball.inside(0.5, 0.0));
  CHECK_FALSE(ball.inside(1.01, 0.0));
  CHECK(ball.dist(0.25, 0.0) == doctest::Approx(0.75));

  auto ann = initial_domain(*builtin_scenario("annulus"));
  CHECK_FALSE(ann.inside(0.1, 0.0));
  CHECK(ann.dist(0.5, 0.0) == doctest::Approx(0.2));

  auto db = initial_domain(*builtin_scenario("dumbbell"));
  CHECK(db.inside(0.0, 0.0));
  CHECK_FALSE(db.inside(0.0, 0.2));
  CHECK(db.inside(0.7, 0.4));
  CHECK(db.dist(0.7, 0.0) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(db.dist(0.0, 0.0) == doctest::Approx(0.15).epsilon(1e-3));

  auto mh = initial_domain(*builtin_scenario("multihole"));
  CHECK_FALSE(mh.inside(0.45, 0.0));
  CHECK(mh.inside(0.0, 0.0));
  CHECK(mh.dist(0.0, 0.0) == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(mh.dist(0.0, 0.8) == doctest::Approx(0.2).epsilon(1e-3));
}

TEST_CASE("built bowl data") {
  auto c = small_bowl();
  auto b = build_scenario(c);
  const GridSpec& g = b.graph.u0.grid;
  CHECK(g.mode == GridMode::Radial1D);
  for (int i = 0; i < g.count[0]; ++i) {
    const double r = g.coord(0, i), u = b.graph.u0.values[i];
    if (r < 1.0 - 1e-12) CHECK(u == doctest::Approx(1.0 / (1.0 - r) + r * r));
    else CHECK(is_escaped(u));
  }
  CHECK(b.a == 15.0);
  CHECK(b.vtilde.w0.grid == g);
  REQUIRE(b.w);
  REQUIRE(b.v);
  CHECK(b.w->w0.grid.mode == GridMode::Axisym2D);
  // snapshots land on the requested interval
  CHECK(b.graph_snap_every * *b.graph.fixed_dt == doctest::Approx(c.snap_interval).epsilon(1e-12));
  for (std::size_t i = 0; i < b.w->w0.values.size(); ++i) REQUIRE(b.w->w0.values[i] >= b.v->w0.values[i]);
}

TEST_CASE("built annulus datum and custom expressions") {
  auto c = *builtin_scenario("annulus");
  c.h = 0.01;
  c.L = 20.0;
  auto b = build_scenario(c);
  const GridSpec& g = b.graph.u0.grid;
  const std::size_t i = g.index(65);
  CHECK(b.graph.u0.values[i] == doctest::Approx(1.0 / 0.35 + 0.65 * 0.65));
  CHECK(is_escaped(b.graph.u0.values[g.index(10)]));

  auto e = small_bowl();
  e.datum = "1/dist";
  auto be = build_scenario(e);
  CHECK(be.graph.u0.values[25] == doctest::Approx(2.0));
}

TEST_CASE("planar scenarios build on Cartesian grids") {
  auto c = *builtin_scenario("multihole");
  c.h = 0.05;
  auto b = build_scenario(c);
  const GridSpec& g = b.graph.u0.grid;
  CHECK(g.mode == GridMode::Cartesian2D);
  CHECK_FALSE(b.w.has_value());
  auto ij = [&](double x, double y) {
    return g.index(static_cast<int>(std::lround((x - g.lo[0]) / g.h)), static_cast<int>(std::lround((y - g.lo[1]) / g.h)));
  };
  CHECK(is_escaped(b.graph.u0.values[ij(0.45, 0.0)]));
  CHECK(b.graph.u0.values[ij(0.0, 0.0)] == doctest::Approx(1.0 / 0.25).epsilon(1e-3));
}

TEST_CASE("run writes its outputs") {
  auto c = small_bowl();
  c.checks = {"c1", "holder"};
  const fs::path dir = fs::temp_directory_path() / "mcf_scenario_run";
  fs::remove_all(dir);
  std::ostringstream log;
  RunOptions o;
  o.out = dir;
  o.log = &log;
  auto res = run(c, o);
  INFO(log.str());
  CHECK(res.exit_code == kExitPass);
  CHECK(fs::exists(dir / "config.json"));
  CHECK(fs::exists(dir / "monitors.csv"));
  CHECK(fs::exists(dir / "report.ndjson"));
  CHECK(fs::exists(dir / "graph_000000.snap"));
  CHECK(fs::exists(dir / "svg" / "graph_001.svg"));
  CHECK(config_to_json(load_config(dir / "config.json")) == config_to_json(c));
  auto traj = io::read_graph_trajectory(dir, "graph");
  CHECK(traj.snapshots.size() == 6);
  CHECK(render_run(dir, {0.02}, log) == kExitPass);
  CHECK(compare_runs(dir, dir, log) == kExitPass);
}

TEST_CASE("run rejects bad configurations") {
  auto c = small_bowl();
  c.fixed_dt = 1.0;
  RunOptions o;
  o.out = fs::temp_directory_path() / "mcf_scenario_bad";
  CHECK(run(c, o).exit_code == kExitConfig);
  c = small_bowl();
  c.checks = {"split"};  // radial scenarios have no neck
  CHECK(run(c, o).exit_code == kExitConfig);
  c = small_bowl();
  c.eps = 2.0;
  CHECK(run(c, o).exit_code == kExitConfig);
}

}  // TEST_SUITE
