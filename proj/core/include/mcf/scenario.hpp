#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcf/compare.hpp"
#include "mcf/graphflow.hpp"
#include "mcf/levelset.hpp"

namespace mcf {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class DomainKind { Ball, Annulus, Dumbbell, MultiHole };

std::string to_string(DomainKind k);

struct Hole {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;
};

// Arithmetic over r, x, y and dist (distance to the domain boundary):
// + - * / ^, unary minus, parentheses, numeric literals.
class DatumExpression {
 public:
  explicit DatumExpression(const std::string& text);
  double eval(double r, double x, double y, double dist) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

struct ScenarioConfig {
  std::string name;
  DomainKind domain = DomainKind::Ball;
  double rho = 1.0;                // Ball radius
  double rho1 = 0.3, rho2 = 1.0;   // Annulus radii
  double lobe_radius = 0.5;        // Dumbbell: two discs joined by a neck
  double lobe_offset = 0.7;
  double neck_halfwidth = 0.15;
  double outer_radius = 1.0;       // MultiHole: disc with circular holes
  std::vector<Hole> holes;
  std::optional<std::string> datum;  // empty: 1/dist + |x|^2

  int n = 1;
  double L = 40.0;
  double eps = 0.05;
  double R = 2.0;
  double T = 0.55;
  double h = 0.005;
  double h_w = 0.02;
  double snap_interval = 0.0125;
  std::optional<double> a;         // default L - 5
  std::optional<double> monitor_level;  // c1/c2 monitors; default: resolved level
  std::optional<double> holder_level;   // default: floor(min u0) + 2
  std::optional<double> fixed_dt;  // graph solver; CFL-checked
  bool levelset_w = true;          // w and v runs (one dimension up)
  std::vector<double> monotone_Ls;
  std::vector<std::string> outputs{"snapshots", "monitors", "report", "svg"};
  std::vector<std::string> checks;
  std::vector<double> svg_times;

  double level() const { return a ? *a : L - 5.0; }
  double domain_radius() const;  // radius of the smallest centred disc containing A
  bool radial() const { return domain == DomainKind::Ball || domain == DomainKind::Annulus; }
};

// Flat-key JSON document. Throws ConfigError on bad or missing values.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::filesystem::path& p);
std::string config_to_json(const ScenarioConfig& cfg);

// Throws ConfigError with an actionable message.
void validate_config(const ScenarioConfig& cfg);

std::vector<std::string> builtin_scenarios();
std::optional<ScenarioConfig> builtin_scenario(const std::string& name);

struct InitialDomain {
  std::function<bool(double, double)> inside;  // (x, y); radial domains use (r, 0)
  std::function<double(double, double)> dist;  // distance to the boundary
  std::vector<std::array<double, 4>> segments;  // boundary pieces, planar domains only
};

InitialDomain initial_domain(const ScenarioConfig& cfg);

struct BuiltScenario {
  CappedProblem graph;
  LevelSetProblem vtilde;  // same grid and time step as the graph run
  std::optional<LevelSetProblem> w;
  std::optional<LevelSetProblem> v;
  std::optional<LevelSetProblem> vtilde_coarse;  // radial only: vtilde on the r-grid of v
  std::vector<LevelSetProblem> wL;               // one per monotone_Ls entry
  int graph_snap_every = 1;
  int w_snap_every = 1;
  double a = 0.0;
  double monitor_level = 0.0;
  double holder_level = 0.0;
};

// Grids and initial data for the graph run and the level-set runs.
BuiltScenario build_scenario(const ScenarioConfig& cfg);

struct RunOptions {
  std::filesystem::path out = "run";
  std::optional<double> h;
  std::optional<double> T;
  // Empty: the scenario's own check list. "all" / "none" are accepted.
  std::vector<std::string> checks;
  std::ostream* log = nullptr;
};

struct RunOutcome {
  int exit_code = 0;
  std::vector<CheckResult> checks;
  std::vector<std::string> failures;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;

RunOutcome run(ScenarioConfig cfg, const RunOptions& opts);

// Post-hoc comparison of two run directories (NDJSON to `os`).
int compare_runs(const std::filesystem::path& a, const std::filesystem::path& b, std::ostream& os);

// SVGs for the stored trajectories of a run at the requested times.
int render_run(const std::filesystem::path& dir, const std::vector<double>& times, std::ostream& log);

}  // namespace mcf
