#include "mcf/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mcf/geometry.hpp"
#include "mcf/io.hpp"
#include "mcf/monitors.hpp"
#include "spatial_index.hpp"

namespace mcf {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::Ball: return "Ball";
    case DomainKind::Annulus: return "Annulus";
    case DomainKind::Dumbbell: return "Dumbbell";
    case DomainKind::MultiHole: return "MultiHole";
  }
  return "?";
}

// ---- datum expressions ----------------------------------------------------

struct DatumExpression::Node {
  char op = 0;  // 'n' number, 'v' variable, '~' negate, else binary operator
  double value = 0.0;
  int var = 0;  // 0 r, 1 x, 2 y, 3 dist
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const DatumExpression::Node>;

class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("datum expression '" + s_ + "': " + what + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static NodePtr binary(char op, NodePtr l, NodePtr r) {
    auto n = std::make_shared<DatumExpression::Node>();
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }
  NodePtr sum() {
    NodePtr l = product();
    for (;;) {
      if (eat('+')) l = binary('+', l, product());
      else if (eat('-')) l = binary('-', l, product());
      else return l;
    }
  }
  NodePtr product() {
    NodePtr l = unary();
    for (;;) {
      if (eat('*')) l = binary('*', l, unary());
      else if (eat('/')) l = binary('/', l, unary());
      else return l;
    }
  }
  NodePtr unary() {
    if (eat('-')) {
      auto n = std::make_shared<DatumExpression::Node>();
      n->op = '~';
      n->lhs = unary();
      return n;
    }
    if (eat('+')) return unary();
    return power();
  }
  // right associative; binds tighter than unary minus on its left
  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return binary('^', base, unary());
    return base;
  }
  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (eat('(')) {
      NodePtr e = sum();
      if (!eat(')')) fail("missing ')'");
      return e;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<DatumExpression::Node>();
      n->op = 'n';
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t e = pos_;
      while (e < s_.size() && std::isalpha(static_cast<unsigned char>(s_[e]))) ++e;
      const std::string id = s_.substr(pos_, e - pos_);
      static const std::map<std::string, int> vars{{"r", 0}, {"x", 1}, {"y", 2}, {"dist", 3}};
      auto it = vars.find(id);
      if (it == vars.end()) fail("unknown identifier '" + id + "'");
      pos_ = e;
      auto n = std::make_shared<DatumExpression::Node>();
      n->op = 'v';
      n->var = it->second;
      return n;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double eval_node(const DatumExpression::Node& n, const double vars[4]) {
  switch (n.op) {
    case 'n': return n.value;
    case 'v': return vars[n.var];
    case '~': return -eval_node(*n.lhs, vars);
    default: break;
  }
  const double a = eval_node(*n.lhs, vars), b = eval_node(*n.rhs, vars);
  switch (n.op) {
    case '+': return a + b;
    case '-': return a - b;
    case '*': return a * b;
    case '/': return a / b;
    case '^': return std::pow(a, b);
  }
  return std::nan("");
}

}  // namespace

DatumExpression::DatumExpression(const std::string& text) : text_(text) {
  root_ = ExprParser(text_).parse();
}

double DatumExpression::eval(double r, double x, double y, double dist) const {
  const double vars[4] = {r, x, y, dist};
  return eval_node(*root_, vars);
}

// ---- configuration ----------------------------------------------------------

double ScenarioConfig::domain_radius() const {
  switch (domain) {
    case DomainKind::Ball: return rho;
    case DomainKind::Annulus: return rho2;
    case DomainKind::Dumbbell: return lobe_offset + lobe_radius;
    case DomainKind::MultiHole: return outer_radius;
  }
  return 0.0;
}

namespace {

DomainKind domain_from_string(const std::string& s) {
  if (s == "Ball") return DomainKind::Ball;
  if (s == "Annulus") return DomainKind::Annulus;
  if (s == "Dumbbell") return DomainKind::Dumbbell;
  if (s == "MultiHole") return DomainKind::MultiHole;
  throw ConfigError("unknown domain '" + s + "' (expected Ball, Annulus, Dumbbell or MultiHole)");
}

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{
      "name", "domain", "rho", "rho1", "rho2", "lobe_radius", "lobe_offset", "neck_halfwidth",
      "outer_radius", "holes", "datum", "n", "L", "eps", "R", "T", "h", "h_w", "snap_interval",
      "a", "monitor_level", "holder_level", "fixed_dt", "levelset_w", "monotone_Ls", "outputs", "checks", "svg_times"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");

  ScenarioConfig c;
  if (!j.contains("name")) throw ConfigError("config key 'name' is required");
  c.name = get_as<std::string>(j, "name");
  if (!j.contains("domain")) throw ConfigError("config key 'domain' is required");
  c.domain = domain_from_string(get_as<std::string>(j, "domain"));
  auto num = [&](const char* k, double& dst) {
    if (j.contains(k)) dst = get_as<double>(j, k);
  };
  num("rho", c.rho);
  num("rho1", c.rho1);
  num("rho2", c.rho2);
  num("lobe_radius", c.lobe_radius);
  num("lobe_offset", c.lobe_offset);
  num("neck_halfwidth", c.neck_halfwidth);
  num("outer_radius", c.outer_radius);
  num("L", c.L);
  num("eps", c.eps);
  num("R", c.R);
  num("T", c.T);
  num("h", c.h);
  num("h_w", c.h_w);
  num("snap_interval", c.snap_interval);
  if (j.contains("n")) c.n = get_as<int>(j, "n");
  if (j.contains("a")) c.a = get_as<double>(j, "a");
  if (j.contains("monitor_level")) c.monitor_level = get_as<double>(j, "monitor_level");
  if (j.contains("holder_level")) c.holder_level = get_as<double>(j, "holder_level");
  if (j.contains("fixed_dt")) c.fixed_dt = get_as<double>(j, "fixed_dt");
  if (j.contains("levelset_w")) c.levelset_w = get_as<bool>(j, "levelset_w");
  if (j.contains("holes")) {
    for (const auto& hj : j.at("holes")) {
      if (!hj.is_array() || hj.size() != 3) throw ConfigError("each hole is [x, y, radius]");
      c.holes.push_back({hj[0].get<double>(), hj[1].get<double>(), hj[2].get<double>()});
    }
  }
  if (j.contains("datum")) {
    const auto d = get_as<std::string>(j, "datum");
    if (d != "Default") c.datum = d;
  }
  if (j.contains("monotone_Ls")) c.monotone_Ls = get_as<std::vector<double>>(j, "monotone_Ls");
  if (j.contains("outputs")) c.outputs = get_as<std::vector<std::string>>(j, "outputs");
  if (j.contains("checks")) c.checks = get_as<std::vector<std::string>>(j, "checks");
  if (j.contains("svg_times")) c.svg_times = get_as<std::vector<double>>(j, "svg_times");
  return c;
}

ScenarioConfig load_config(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw ConfigError("cannot read config " + p.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ScenarioConfig& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["domain"] = to_string(c.domain);
  switch (c.domain) {
    case DomainKind::Ball: j["rho"] = c.rho; break;
    case DomainKind::Annulus:
      j["rho1"] = c.rho1;
      j["rho2"] = c.rho2;
      break;
    case DomainKind::Dumbbell:
      j["lobe_radius"] = c.lobe_radius;
      j["lobe_offset"] = c.lobe_offset;
      j["neck_halfwidth"] = c.neck_halfwidth;
      break;
    case DomainKind::MultiHole: {
      j["outer_radius"] = c.outer_radius;
      auto holes = nlohmann::ordered_json::array();
      for (const auto& h : c.holes) holes.push_back({h.x, h.y, h.radius});
      j["holes"] = holes;
      break;
    }
  }
  j["datum"] = c.datum ? *c.datum : "Default";
  j["n"] = c.n;
  j["L"] = c.L;
  j["eps"] = c.eps;
  j["R"] = c.R;
  j["T"] = c.T;
  j["h"] = c.h;
  j["h_w"] = c.h_w;
  j["snap_interval"] = c.snap_interval;
  if (c.a) j["a"] = *c.a;
  if (c.monitor_level) j["monitor_level"] = *c.monitor_level;
  if (c.holder_level) j["holder_level"] = *c.holder_level;
  if (c.fixed_dt) j["fixed_dt"] = *c.fixed_dt;
  j["levelset_w"] = c.levelset_w;
  if (!c.monotone_Ls.empty()) j["monotone_Ls"] = c.monotone_Ls;
  j["outputs"] = c.outputs;
  j["checks"] = c.checks;
  if (!c.svg_times.empty()) j["svg_times"] = c.svg_times;
  return j.dump(2) + "\n";
}

namespace {

const std::set<std::string>& known_checks() {
  static const std::set<std::string> k{"c1",         "holder",   "vanishing",   "projection",
                                       "robustness", "ordering", "zero_level",  "cylinder",
                                       "monotone",   "annulus_cap", "annulus_inner", "split", "fattening"};
  return k;
}

const std::set<std::string>& known_outputs() {
  static const std::set<std::string> k{"snapshots", "levelset_snapshots", "monitors", "report", "svg"};
  return k;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

void validate_config(const ScenarioConfig& c) {
  require(!c.name.empty(), "name must not be empty");
  require(c.n >= 1, "n must be >= 1");
  require(c.radial() || c.n == 1, to_string(c.domain) + " domains use Cartesian grids and require n = 1");
  switch (c.domain) {
    case DomainKind::Ball: require(c.rho > 0.0, "Ball radius rho must be positive"); break;
    case DomainKind::Annulus:
      require(c.rho1 > 0.0 && c.rho2 > 0.0, "Annulus radii must be positive");
      require(c.rho1 < c.rho2, "Annulus needs rho1 < rho2");
      break;
    case DomainKind::Dumbbell:
      require(c.lobe_radius > 0.0 && c.lobe_offset > 0.0 && c.neck_halfwidth > 0.0,
              "Dumbbell parameters must be positive");
      require(c.lobe_offset > c.lobe_radius,
              "Dumbbell balls overlap: lobe_offset must exceed lobe_radius");
      require(c.neck_halfwidth < c.lobe_radius, "Dumbbell neck_halfwidth must be below lobe_radius");
      break;
    case DomainKind::MultiHole:
      require(c.outer_radius > 0.0, "MultiHole outer_radius must be positive");
      require(!c.holes.empty(), "MultiHole needs at least one hole");
      for (std::size_t i = 0; i < c.holes.size(); ++i) {
        const Hole& h = c.holes[i];
        require(h.radius > 0.0, "hole radius must be positive");
        require(std::hypot(h.x, h.y) + h.radius < c.outer_radius, "hole " + std::to_string(i) + " leaves the disc");
        for (std::size_t k = 0; k < i; ++k)
          require(std::hypot(h.x - c.holes[k].x, h.y - c.holes[k].y) > h.radius + c.holes[k].radius,
                  "holes " + std::to_string(k) + " and " + std::to_string(i) + " overlap");
      }
      break;
  }
  require(c.h > 0.0 && c.h_w > 0.0, "grid spacings h and h_w must be positive");
  require(c.T > 0.0, "horizon T must be positive");
  require(c.eps > 0.0 && c.eps <= 1.0, "eps must lie in (0, 1]");
  require(c.snap_interval > 0.0, "snap_interval must be positive");
  require(c.R > c.domain_radius() + 1.0,
          "R = " + io::format_double(c.R) + " must exceed the outer domain radius plus one (" +
              io::format_double(c.domain_radius() + 1.0) + ")");
  require(c.L > 6.0, "cap L must exceed 6");
  require(c.level() <= c.L - 1.0, "level a must be <= L - 1");
  if (c.datum) DatumExpression check(*c.datum);
  for (std::size_t i = 0; i < c.monotone_Ls.size(); ++i) {
    require(c.monotone_Ls[i] > 0.0, "monotone_Ls must be positive");
    require(i == 0 || c.monotone_Ls[i] > c.monotone_Ls[i - 1], "monotone_Ls must increase strictly");
  }
  for (const auto& o : c.outputs) require(known_outputs().count(o) > 0, "unknown output sink '" + o + "'");
  for (const auto& k : c.checks)
    require(known_checks().count(k) > 0 || k == "all" || k == "none", "unknown check '" + k + "'");
  if (c.fixed_dt) require(*c.fixed_dt > 0.0, "fixed_dt must be positive");
}

// ---- shipped scenarios ------------------------------------------------------

std::vector<std::string> builtin_scenarios() { return {"bowl", "annulus", "dumbbell", "multihole"}; }

std::optional<ScenarioConfig> builtin_scenario(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  if (name == "bowl") {
    c.domain = DomainKind::Ball;
    c.rho = 1.0;
    c.R = 2.1;
    c.T = 0.55;
    c.monotone_Ls = {5.0, 10.0, 20.0};
    c.checks = {"c1", "holder", "vanishing", "ordering", "zero_level", "cylinder", "monotone"};
    c.svg_times = {0.0, 0.125, 0.25, 0.375, 0.5};
  } else if (name == "annulus") {
    c.domain = DomainKind::Annulus;
    c.rho1 = 0.3;
    c.rho2 = 1.0;
    c.R = 2.1;
    c.T = 0.55;
    c.snap_interval = 0.0025;
    c.checks = {"c1", "holder", "vanishing", "ordering", "zero_level", "cylinder", "annulus_cap"};
    c.svg_times = {0.0, 0.025, 0.05, 0.25, 0.5};
  } else if (name == "dumbbell") {
    c.domain = DomainKind::Dumbbell;
    c.lobe_radius = 0.5;
    c.lobe_offset = 0.7;
    c.neck_halfwidth = 0.15;
    c.L = 20.0;
    c.R = 2.3;
    c.T = 0.3;
    c.h = 0.02;
    c.h_w = 0.04;
    c.snap_interval = 0.005;
    c.levelset_w = false;
    c.checks = {"c1", "holder", "split"};
    c.svg_times = {0.0, 0.05, 0.1, 0.15, 0.2};
  } else if (name == "multihole") {
    c.domain = DomainKind::MultiHole;
    c.outer_radius = 1.0;
    c.holes = {{-0.45, 0.0, 0.2}, {0.45, 0.0, 0.2}};
    c.L = 20.0;
    c.R = 2.1;
    c.T = 0.55;
    c.h = 0.025;
    c.h_w = 0.05;
    c.levelset_w = false;
    c.checks = {"c1", "holder"};
    c.svg_times = {0.0, 0.05, 0.1, 0.2, 0.4};
  } else {
    return std::nullopt;
  }
  return c;
}

// ---- domains ----------------------------------------------------------------

namespace {

struct Primitive {
  enum Kind { Disc, Rect } kind = Disc;
  double cx = 0, cy = 0, r = 0;  // disc
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // rect
  bool contains(double x, double y, double tol = 0.0) const {
    if (kind == Disc) return std::hypot(x - cx, y - cy) < r - tol;
    return x > x0 + tol && x < x1 - tol && y > y0 + tol && y < y1 - tol;
  }
  std::vector<std::array<double, 4>> outline(double len) const {
    std::vector<std::array<double, 4>> out;
    if (kind == Disc) {
      const int m = std::max(64, static_cast<int>(std::ceil(2.0 * M_PI * r / len)));
      for (int i = 0; i < m; ++i) {
        const double a0 = 2.0 * M_PI * i / m, a1 = 2.0 * M_PI * (i + 1) / m;
        out.push_back({cx + r * std::cos(a0), cy + r * std::sin(a0), cx + r * std::cos(a1), cy + r * std::sin(a1)});
      }
      return out;
    }
    const double c[5][2] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
    for (int e = 0; e < 4; ++e) {
      const double L = std::hypot(c[e + 1][0] - c[e][0], c[e + 1][1] - c[e][1]);
      const int m = std::max(1, static_cast<int>(std::ceil(L / len)));
      for (int i = 0; i < m; ++i) {
        const double t0 = double(i) / m, t1 = double(i + 1) / m;
        out.push_back({c[e][0] + t0 * (c[e + 1][0] - c[e][0]), c[e][1] + t0 * (c[e + 1][1] - c[e][1]),
                       c[e][0] + t1 * (c[e + 1][0] - c[e][0]), c[e][1] + t1 * (c[e + 1][1] - c[e][1])});
      }
    }
    return out;
  }
};

// (union of `pos`) minus (union of `neg`), with its boundary as segments.
InitialDomain planar_domain(std::vector<Primitive> pos, std::vector<Primitive> neg) {
  const double len = 0.0025;
  InitialDomain d;
  auto inside = [pos, neg](double x, double y) {
    bool in = std::any_of(pos.begin(), pos.end(), [&](const Primitive& p) { return p.contains(x, y); });
    if (!in) return false;
    return std::none_of(neg.begin(), neg.end(), [&](const Primitive& p) { return p.contains(x, y); });
  };
  const double tol = 1e-9;
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (const auto& s : pos[i].outline(len)) {
      const double mx = 0.5 * (s[0] + s[2]), my = 0.5 * (s[1] + s[3]);
      bool covered = false;
      for (std::size_t k = 0; k < pos.size(); ++k)
        if (k != i && pos[k].contains(mx, my, tol)) covered = true;
      for (const auto& q : neg)
        if (q.contains(mx, my, -tol)) covered = true;
      if (!covered) d.segments.push_back(s);
    }
  for (std::size_t i = 0; i < neg.size(); ++i)
    for (const auto& s : neg[i].outline(len)) {
      const double mx = 0.5 * (s[0] + s[2]), my = 0.5 * (s[1] + s[3]);
      bool keep = std::any_of(pos.begin(), pos.end(), [&](const Primitive& p) { return p.contains(mx, my); });
      for (std::size_t k = 0; k < neg.size(); ++k)
        if (k != i && neg[k].contains(mx, my, tol)) keep = false;
      if (keep) d.segments.push_back(s);
    }
  d.inside = inside;
  auto index = std::make_shared<detail::SegmentIndex2D>(d.segments, 0.05);
  d.dist = [index](double x, double y) { return index->distance(x, y, 100.0); };
  return d;
}

}  // namespace

InitialDomain initial_domain(const ScenarioConfig& c) {
  InitialDomain d;
  switch (c.domain) {
    case DomainKind::Ball: {
      const double rho = c.rho;
      d.inside = [rho](double x, double y) { return std::hypot(x, y) < rho; };
      d.dist = [rho](double x, double y) { return std::abs(rho - std::hypot(x, y)); };
      return d;
    }
    case DomainKind::Annulus: {
      const double r1 = c.rho1, r2 = c.rho2;
      d.inside = [r1, r2](double x, double y) {
        const double r = std::hypot(x, y);
        return r > r1 && r < r2;
      };
      d.dist = [r1, r2](double x, double y) {
        const double r = std::hypot(x, y);
        return std::min(std::abs(r - r1), std::abs(r2 - r));
      };
      return d;
    }
    case DomainKind::Dumbbell: {
      Primitive left, right, neck;
      left.cx = -c.lobe_offset;
      right.cx = c.lobe_offset;
      left.r = right.r = c.lobe_radius;
      neck.kind = Primitive::Rect;
      neck.x0 = -c.lobe_offset;
      neck.x1 = c.lobe_offset;
      neck.y0 = -c.neck_halfwidth;
      neck.y1 = c.neck_halfwidth;
      return planar_domain({left, right, neck}, {});
    }
    case DomainKind::MultiHole: {
      Primitive disc;
      disc.r = c.outer_radius;
      std::vector<Primitive> holes;
      for (const auto& h : c.holes) {
        Primitive p;
        p.cx = h.x;
        p.cy = h.y;
        p.r = h.radius;
        holes.push_back(p);
      }
      return planar_domain({disc}, holes);
    }
  }
  return d;
}

// ---- building -----------------------------------------------------------------

namespace {

double snap_up(double x, double h) { return std::ceil(x / h - 1e-9) * h; }

std::function<double(double, double)> datum_function(const ScenarioConfig& c, const InitialDomain& dom) {
  std::optional<DatumExpression> expr;
  if (c.datum) expr.emplace(*c.datum);
  return [expr, dom](double x, double y) {
    if (!dom.inside(x, y)) return ESCAPED;
    const double dist = dom.dist(x, y);
    if (!(dist > 1e-12)) return ESCAPED;  // node on the boundary
    const double r = std::hypot(x, y);
    double u = expr ? expr->eval(r, x, y, dist) : 1.0 / dist + r * r;
    if (!std::isfinite(u)) throw ConfigError("datum is not finite inside the domain at (" +
                                             io::format_double(x) + ", " + io::format_double(y) + ")");
    return u;
  };
}

// time step dividing the snapshot interval, below the stability limit
double aligned_dt(double interval, double limit, int& snap_every) {
  snap_every = std::max(1, static_cast<int>(std::ceil(interval / limit - 1e-9)));
  return interval / snap_every;
}

}  // namespace

BuiltScenario build_scenario(const ScenarioConfig& c) {
  validate_config(c);
  BuiltScenario b;
  b.a = c.level();
  const InitialDomain dom = initial_domain(c);
  const auto u0f = datum_function(c, dom);
  const double extent = snap_up(c.R, c.h);

  const GridMode gmode = c.radial() ? GridMode::Radial1D : GridMode::Cartesian2D;
  const GridSpec gg = make_grid(gmode, c.h, extent, c.n);
  std::vector<double> u0(gg.size());
  for (std::size_t i = 0; i < u0.size(); ++i) {
    auto ijk = gg.unindex(i);
    const double x = gg.coord(0, ijk[0]), y = gg.dims() > 1 ? gg.coord(1, ijk[1]) : 0.0;
    u0[i] = u0f(x, y);
  }
  GraphField u0field(gg, std::move(u0), 0.0);
  if (!u0field.any_finite()) throw ConfigError("the domain contains no grid node; refine h");

  double dt;
  if (c.fixed_dt) {
    dt = *c.fixed_dt;
    b.graph_snap_every = std::max(1, static_cast<int>(std::lround(c.snap_interval / dt)));
  } else {
    dt = aligned_dt(c.snap_interval, cfl_dt(gg), b.graph_snap_every);
  }
  b.graph = CappedProblem{u0field, c.L, c.eps, c.R, c.T, dt};
  validate(b.graph);
  {
    const GraphField start = capped_initial(b.graph);
    b.monitor_level = c.monitor_level ? *c.monitor_level : resolved_level(start, b.a);
    b.holder_level = c.holder_level ? *c.holder_level : std::floor(start.finite_min()) + 2.0;
  }

  // vtilde: the domain itself, on the graph grid
  Shape dshape;
  if (c.domain == DomainKind::Ball) dshape = RadialShell{0.0, c.rho};
  else if (c.domain == DomainKind::Annulus) dshape = RadialShell{c.rho1, c.rho2};
  else dshape = PlanarDomain{dom.inside, dom.segments};
  b.vtilde = LevelSetProblem{truncated_signed_distance(dshape, gg, LevelSetLabel::Vtilde_boundary), 1.0, c.T,
                             std::min(dt, levelset_cfl_dt(gg))};

  if (!c.levelset_w) return b;

  // one dimension up
  const double rw = snap_up(c.domain_radius() + 0.5, c.h_w);
  const double zlo = std::floor(u0field.finite_min()) - 1.0;
  double ztop = c.L - 3.0;
  if (!c.monotone_Ls.empty()) ztop = std::max(ztop, c.monotone_Ls.back() + 2.0);
  const double zhi = zlo + snap_up(ztop - zlo, c.h_w);
  GridSpec wg;
  if (c.radial()) wg = make_grid_window(GridMode::Axisym2D, c.h_w, c.n, {0.0, zlo, 0.0}, {rw, zhi, 0.0});
  else wg = make_grid_window(GridMode::Cartesian3D, c.h_w, 1, {-rw, -rw, zlo}, {rw, rw, zhi});
  int snap_w = 1;
  const double dt_w = aligned_dt(c.snap_interval, levelset_cfl_dt(wg), snap_w);
  b.w_snap_every = snap_w;

  Shape wshape;
  if (c.radial()) wshape = RadialGraph{[u0f](double r) { return u0f(r, 0.0); }, c.domain_radius()};
  else wshape = SampledGraph{u0field};
  b.w = LevelSetProblem{truncated_signed_distance(wshape, wg, LevelSetLabel::W_graph), 1.0, c.T, dt_w};
  b.v = LevelSetProblem{truncated_signed_distance(dshape, wg, LevelSetLabel::V_cylinder), 1.0, c.T, dt_w};
  if (c.radial()) {
    const GridSpec rg = make_grid_window(GridMode::Radial1D, c.h_w, c.n, {0.0, 0.0, 0.0}, {rw, 0.0, 0.0});
    b.vtilde_coarse =
        LevelSetProblem{truncated_signed_distance(dshape, rg, LevelSetLabel::Vtilde_boundary), 1.0, c.T, dt_w};
  }
  // capped analogues: epigraph of min(u0, L) via min(w0, L - z)
  for (double Lc : c.monotone_Ls) {
    LevelSetField wl = b.w->w0;
    for (std::size_t i = 0; i < wl.values.size(); ++i) {
      const double z = wg.coord(wg.dims() - 1, wg.unindex(i)[wg.dims() - 1]);
      wl.values[i] = std::min(wl.values[i], std::clamp(Lc - z, -1.0, 1.0));
    }
    b.wL.push_back(LevelSetProblem{std::move(wl), 1.0, c.T, dt_w});
  }
  return b;
}

// ---- running ------------------------------------------------------------------

namespace {

struct Runs {
  GraphTrajectory graph;
  LevelSetRun vtilde;
  std::optional<LevelSetRun> w, v, vtilde_coarse;
  std::vector<LevelSetTrajectory> wL;
  std::optional<HolderResult> holder;
};

class Logger {
 public:
  explicit Logger(std::ostream* os) : os_(os) {}
  template <class... A>
  void operator()(const A&... parts) const {
    if (!os_) return;
    ((*os_) << ... << parts) << "\n";
    os_->flush();
  }

 private:
  std::ostream* os_;
};

std::vector<std::string> applicable_checks(const ScenarioConfig& c) {
  std::vector<std::string> out{"c1", "holder", "vanishing", "projection", "robustness", "fattening"};
  if (c.levelset_w) {
    out.insert(out.end(), {"ordering", "zero_level"});
    if (c.radial()) out.push_back("cylinder");
    if (!c.monotone_Ls.empty()) out.push_back("monotone");
  }
  if (c.domain == DomainKind::Annulus) out.insert(out.end(), {"annulus_cap", "annulus_inner"});
  if (!c.radial()) out.push_back("split");
  return out;
}

// Snapshots strictly before the level-set extinction.
template <class Series>
double worst_before(const Series& s, std::optional<double> t_end) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    if (t_end && s.times[i] >= *t_end) break;
    worst = std::max(worst, s.distances[i]);
  }
  return worst;
}

CheckResult make(const std::string& name, const ScenarioConfig& c, double worst, double thr, bool pass,
                 std::string note = {}) {
  return CheckResult{name, c.name, worst, thr, pass, std::move(note)};
}

std::vector<CheckResult> evaluate(const std::string& check, const ScenarioConfig& c, const BuiltScenario& b,
                                  Runs& r) {
  const double a = b.a;
  const double interval = c.snap_interval;
  if (check == "c1") {
    const MonitorSummary s = summarize(r.graph.monitors);
    return {make("c1_monotone", c, s.c1_worst_ratio, 1.01, s.c1_nonincreasing),
            make("gradient_bound", c, s.grad_worst_ratio, 1.0, s.grad_bound_ok)};
  }
  if (check == "holder") {
    const HolderResult& h = r.holder.value();
    return {make("holder", c, h.worst, 1.05 * h.bound, h.pass,
                 "level=" + io::format_double(b.holder_level) + " M=" + io::format_double(h.M) +
                     " pairs=" + std::to_string(h.pairs))};
  }
  if (check == "vanishing") {
    const VanishingTimes v = vanishing_times(r.graph, r.vtilde.traj, a);
    if (!v.t_graph || !v.t_levelset)
      return {make("vanishing", c, ESCAPED, 0.0, false,
                   std::string("no vanishing within the horizon for ") +
                       (!v.t_graph ? (!v.t_levelset ? "either run" : "the graph run") : "the level-set run"))};
    const double d = std::abs(*v.t_graph - *v.t_levelset);
    const double thr = 2.0 * interval + 0.1 * *v.t_levelset;
    return {make("vanishing", c, d, thr, d <= thr,
                 "t_graph=" + io::format_double(*v.t_graph) + " t_levelset=" + io::format_double(*v.t_levelset))};
  }
  if (check == "projection") {
    const auto t_end = vanishing_times(r.graph, r.vtilde.traj, a).t_levelset;
    const DistanceSeries s = projection_vs_levelset(r.graph, r.vtilde.traj, a, c.L);
    const double worst = worst_before(s, t_end);
    return {make("projection", c, worst, 5.0 * c.h, worst <= 5.0 * c.h)};
  }
  if (check == "robustness") {
    auto t_end = vanishing_times(r.graph, r.vtilde.traj, a).t_levelset;
    // stop once the lower sublevel set is gone
    if (const auto t2 = vanishing_times(r.graph, r.vtilde.traj, a - 5.0).t_graph)
      t_end = t_end ? std::min(*t_end, *t2) : *t2;
    const DistanceSeries s = level_robustness(r.graph, a, a - 5.0);
    const double worst = worst_before(s, t_end);
    return {make("robustness", c, worst, 2.0 * c.h, worst <= 2.0 * c.h)};
  }
  if (check == "fattening") {
    int suspicious = 0;
    for (const auto& f : r.vtilde.fattening) suspicious += f.verdict == FatteningVerdict::Suspicious;
    return {make("fattening", c, suspicious, 0.0, suspicious == 0, "suspicious snapshots of vtilde")};
  }
  if (check == "ordering") {
    const double m = ordering_w_v(r.w->traj, r.v->traj);
    return {make("ordering", c, m, -1e-12, m >= -1e-12)};
  }
  if (check == "zero_level") {
    const ZeroLevelReport z = graph_on_zero_level(r.graph, r.w->traj, a, 0.25 * b.graph.fixed_dt.value());
    const double thr = 3.0 * c.h_w;
    return {make("zero_level", c, z.worst, thr, z.worst <= thr && z.samples > 0,
                 "samples=" + std::to_string(z.samples) + (z.truncated ? " truncated" : ""))};
  }
  if (check == "cylinder") {
    const double d = cylinder_product(r.v->traj, r.vtilde_coarse->traj);
    return {make("cylinder", c, d, 1e-10, d <= 1e-10)};
  }
  if (check == "monotone") {
    const MonotoneLimitReport m = monotone_limit(c.monotone_Ls, r.wL, r.w->traj);
    return {make("monotone", c, m.worst_order_violation, 1e-12, m.pass,
                 std::string(m.ordered ? "ordered" : "unordered") + (m.gaps_decreasing ? "" : " gaps-not-decreasing"))};
  }
  if (check == "annulus_cap") {
    const auto T_in = inner_crossing_vanish_time(r.vtilde.traj);
    std::optional<double> t_drop;
    bool stays = true;
    for (const auto& s : r.graph.snapshots) {
      const double u = s.values.front();
      if (!t_drop && u < c.L - 1.0) t_drop = s.time;
      else if (t_drop && !(u < c.L - 1.0)) stays = false;
    }
    if (!T_in || !t_drop) return {make("annulus_cap", c, ESCAPED, 0.0, false, "hole did not close within the horizon")};
    const double late = *t_drop - *T_in;
    return {make("annulus_cap", c, late, 0.1 * *T_in, late <= 0.1 * *T_in && stays,
                 "T=" + io::format_double(*T_in) + " t_drop=" + io::format_double(*t_drop) +
                     (stays ? "" : " origin value returned to the cap"))};
  }
  if (check == "annulus_inner") {
    // the inner boundary of {u < a} is gone once u(0) < a
    const auto T_in = inner_crossing_vanish_time(r.vtilde.traj);
    std::optional<double> t_inner;
    for (const auto& s : r.graph.snapshots)
      if (s.values.front() < a) {
        t_inner = s.time;
        break;
      }
    if (!T_in || !t_inner)
      return {make("annulus_inner", c, ESCAPED, 3.0 * interval, false, "hole did not close within the horizon")};
    const double d = std::abs(*t_inner - *T_in);
    return {make("annulus_inner", c, d, 3.0 * interval, d <= 3.0 * interval,
                 "T=" + io::format_double(*T_in) + " t_graph=" + io::format_double(*t_inner))};
  }
  if (check == "split") {
    const auto tg = split_time(r.graph.times(), component_history(r.graph, a));
    const auto tl = split_time(r.vtilde.traj.times(), component_history(r.vtilde.traj));
    if (!tg || !tl)
      return {make("split", c, ESCAPED, 3.0 * interval, false,
                   std::string("no split in ") + (!tl ? "the level-set run" : "the graph run"))};
    const double d = std::abs(*tg - *tl);
    return {make("split", c, d, 3.0 * interval, d <= 3.0 * interval,
                 "t_graph=" + io::format_double(*tg) + " t_levelset=" + io::format_double(*tl))};
  }
  throw ConfigError("unknown check '" + check + "'");
}

bool has(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// Second graph pass feeding dense snapshots to a HolderStream; M comes from
// the stored trajectory. Per-snapshot worst quotients are folded into the
// monitor records.
HolderResult streamed_holder(const BuiltScenario& b, GraphTrajectory& traj) {
  const double M = holder_constant(traj, b.holder_level);
  HolderStream stream(b.holder_level, M, traj.grid().n);
  const double dt = b.graph.fixed_dt.value();
  const int stride = std::max(1, static_cast<int>(std::floor(stream.window() / (8.0 * dt))));
  std::vector<double> times;
  solve_capped(b.graph, stride, nullptr,
               [&](const GraphField& u) {
                 times.push_back(u.time);
                 stream.add(u);
               },
               false);
  const HolderResult& res = stream.result();
  std::size_t j = 0;
  for (auto& rec : traj.monitors) {
    rec.holder_worst = 0.0;
    rec.M = res.M;
    for (; j < times.size() && times[j] <= rec.time + 0.5 * dt; ++j)
      rec.holder_worst = std::max(rec.holder_worst, res.worst_by_snapshot[j]);
  }
  return res;
}

}  // namespace

RunOutcome run(ScenarioConfig cfg, const RunOptions& opts) {
  RunOutcome out;
  Logger log(opts.log);
  if (opts.h) cfg.h = *opts.h;
  if (opts.T) cfg.T = *opts.T;
  if (!opts.checks.empty()) cfg.checks = opts.checks;

  BuiltScenario b;
  std::vector<std::string> checks;
  try {
    b = build_scenario(cfg);
    const auto avail = applicable_checks(cfg);
    if (has(cfg.checks, "all")) checks = avail;
    else if (!has(cfg.checks, "none"))
      for (const auto& k : cfg.checks) {
        if (!has(avail, k)) throw ConfigError("check '" + k + "' does not apply to scenario " + cfg.name);
        checks.push_back(k);
      }
  } catch (const CflError& e) {
    out.exit_code = kExitConfig;
    out.failures.push_back(std::string("config: ") + e.what());
    log("error: ", e.what());
    return out;
  } catch (const std::invalid_argument& e) {
    out.exit_code = kExitConfig;
    out.failures.push_back(std::string("config: ") + e.what());
    log("error: ", e.what());
    return out;
  }

  Runs r;
  try {
    log("graph run: ", to_string(b.graph.u0.grid.mode), " h=", cfg.h, " nodes=", b.graph.u0.grid.size());
    r.graph = solve_capped(b.graph, b.graph_snap_every);
    attach_monitors(r.graph, b.monitor_level);
    if (has(checks, "holder") || has(cfg.outputs, "monitors")) {
      r.holder = streamed_holder(b, r.graph);
      log("holder pass: level=", b.holder_level, " M=", r.holder->M, " pairs=", r.holder->pairs);
    }
    log("vtilde run");
    r.vtilde = solve_levelset(b.vtilde, b.graph_snap_every);
    const bool need_w = std::any_of(checks.begin(), checks.end(), [](const std::string& k) {
      return k == "ordering" || k == "zero_level" || k == "cylinder" || k == "monotone";
    }) || has(cfg.outputs, "levelset_snapshots");
    if (b.w && need_w) {
      log("w run: nodes=", b.w->w0.grid.size());
      r.w = solve_levelset(*b.w, b.w_snap_every);
      log("v run");
      r.v = solve_levelset(*b.v, b.w_snap_every);
      if (b.vtilde_coarse) r.vtilde_coarse = solve_levelset(*b.vtilde_coarse, b.w_snap_every);
      if (has(checks, "monotone"))
        for (std::size_t i = 0; i < b.wL.size(); ++i) {
          log("w^L run: L=", cfg.monotone_Ls[i]);
          r.wL.push_back(solve_levelset(b.wL[i], b.w_snap_every).traj);
        }
    }
  } catch (const SchemeError& e) {
    out.exit_code = kExitCheckFailure;
    out.checks.push_back(make("scheme", cfg, ESCAPED, 0.0, false, e.what()));
    out.failures.push_back(std::string("scheme: ") + e.what());
    log("error: ", e.what());
    return out;
  }

  for (const auto& k : checks) {
    std::vector<CheckResult> results;
    try {
      results = evaluate(k, cfg, b, r);
    } catch (const std::exception& e) {
      results = {make(k, cfg, ESCAPED, 0.0, false, e.what())};
    }
    for (auto& res : results) {
      log("check ", res.name, ": ", res.pass ? "pass" : "FAIL", " worst=", io::format_double(res.worst_value),
          " threshold=", io::format_double(res.threshold), res.note.empty() ? "" : " (" + res.note + ")");
      if (!res.pass) out.failures.push_back(res.name);
      out.checks.push_back(std::move(res));
    }
  }
  out.exit_code = out.failures.empty() ? kExitPass : kExitCheckFailure;

  // sinks
  fs::create_directories(opts.out);
  {
    std::ofstream os(opts.out / "config.json");
    os << config_to_json(cfg);
  }
  if (has(cfg.outputs, "snapshots")) {
    io::write_trajectory(opts.out, "graph", r.graph);
    io::write_trajectory(opts.out, "vtilde", r.vtilde.traj);
  }
  if (has(cfg.outputs, "levelset_snapshots") && r.w) {
    io::write_trajectory(opts.out, "w", r.w->traj);
    io::write_trajectory(opts.out, "v", r.v->traj);
  }
  if (has(cfg.outputs, "monitors")) io::write_monitor_csv_file(opts.out / "monitors.csv", r.graph.monitors);
  if (has(cfg.outputs, "report")) {
    std::ofstream os(opts.out / "report.ndjson");
    io::write_report(os, out.checks);
  }
  if (has(cfg.outputs, "svg")) {
    std::vector<double> times = cfg.svg_times;
    if (times.empty()) times = {0.0, 0.25 * cfg.T, 0.5 * cfg.T, 0.75 * cfg.T, cfg.T};
    std::vector<std::string> warnings;
    auto keep = [&](const io::SvgResult& s) { warnings.insert(warnings.end(), s.warnings.begin(), s.warnings.end()); };
    keep(io::emit_svg_contours(r.graph, times, opts.out / "svg", "graph", b.a));
    keep(io::emit_svg_contours(r.vtilde.traj, times, opts.out / "svg", "vtilde"));
    if (r.w) keep(io::emit_svg_contours(r.w->traj, times, opts.out / "svg", "w"));
    for (const auto& w : warnings) log("warning: ", w);
  }
  log(out.exit_code == kExitPass ? "all checks passed" : "checks failed: " + std::to_string(out.failures.size()));
  return out;
}

// ---- post-processing ----------------------------------------------------------

namespace {

// Points on the boundary of {u < a}: crossing radii (1D) or contour midpoints (2D).
std::vector<std::array<double, 2>> boundary_points(const GraphField& u, double a) {
  std::vector<double> vals(u.values);
  for (double& x : vals) x = is_escaped(x) ? 1.0 : std::min(x - a, 1.0);
  std::vector<std::array<double, 2>> pts;
  if (u.grid.mode == GridMode::Radial1D) {
    std::vector<double> coords(vals.size());
    for (int i = 0; i < u.grid.count[0]; ++i) coords[i] = u.grid.coord(0, i);
    for (double r : zero_crossings(vals, coords)) pts.push_back({r, 0.0});
    return pts;
  }
  for (const auto& s : contour_segments(vals, u.grid, 0.0)) pts.push_back({0.5 * (s[0] + s[2]), 0.5 * (s[1] + s[3])});
  return pts;
}

double point_hausdorff(const std::vector<std::array<double, 2>>& A, const std::vector<std::array<double, 2>>& B) {
  if (A.empty() && B.empty()) return 0.0;
  if (A.empty() || B.empty()) return ESCAPED;
  auto directed = [](const auto& P, const auto& Q) {
    double worst = 0.0;
    for (const auto& p : P) {
      double best = ESCAPED;
      for (const auto& q : Q) best = std::min(best, std::hypot(p[0] - q[0], p[1] - q[1]));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(A, B), directed(B, A));
}

}  // namespace

int compare_runs(const fs::path& da, const fs::path& db, std::ostream& os) {
  ScenarioConfig ca, cb;
  GraphTrajectory ga, gb;
  LevelSetTrajectory va, vb;
  try {
    ca = load_config(da / "config.json");
    cb = load_config(db / "config.json");
    ga = io::read_graph_trajectory(da, "graph");
    gb = io::read_graph_trajectory(db, "graph");
    va = io::read_levelset_trajectory(da, "vtilde");
    vb = io::read_levelset_trajectory(db, "vtilde");
  } catch (const std::exception& e) {
    os << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (ga.snapshots.empty() || gb.snapshots.empty() || va.snapshots.empty() || vb.snapshots.empty()) {
    os << "error: run directories must hold graph and vtilde snapshots\n";
    return kExitConfig;
  }
  const std::string label = ca.name + " vs " + cb.name;
  const double a = std::min(ca.level(), cb.level());
  const double interval = std::max(ca.snap_interval, cb.snap_interval);
  std::vector<CheckResult> res;

  const VanishingTimes ta = vanishing_times(ga, va, a), tb = vanishing_times(gb, vb, a);
  auto time_check = [&](const char* name, std::optional<double> x, std::optional<double> y) {
    if (!x && !y) {
      res.push_back({name, label, 0.0, 0.0, true, "neither run vanishes"});
      return;
    }
    if (!x || !y) {
      res.push_back({name, label, ESCAPED, 0.0, false, "only one run vanishes"});
      return;
    }
    const double d = std::abs(*x - *y), thr = 2.0 * interval + 0.1 * std::max(*x, *y);
    res.push_back({name, label, d, thr, d <= thr, ""});
  };
  time_check("t_graph_delta", ta.t_graph, tb.t_graph);
  time_check("t_levelset_delta", ta.t_levelset, tb.t_levelset);

  double worst = 0.0;
  std::size_t matched = 0;
  for (const auto& sa : ga.snapshots) {
    const auto& sb = gb.snapshots[gb.nearest(sa.time)];
    if (std::abs(sb.time - sa.time) > 1e-9) continue;
    if (ta.t_graph && sa.time >= *ta.t_graph) break;
    ++matched;
    worst = std::max(worst, point_hausdorff(boundary_points(sa, a), boundary_points(sb, a)));
  }
  const double thr = 5.0 * std::max(ca.h, cb.h);
  res.push_back({"graph_boundary", label, worst, thr, matched > 0 && worst <= thr,
                 "common snapshots=" + std::to_string(matched)});
  io::write_report(os, res);
  return std::all_of(res.begin(), res.end(), [](const CheckResult& c) { return c.pass; }) ? kExitPass
                                                                                           : kExitCheckFailure;
}

int render_run(const fs::path& dir, const std::vector<double>& times, std::ostream& log) {
  try {
    const ScenarioConfig c = load_config(dir / "config.json");
    const GraphTrajectory g = io::read_graph_trajectory(dir, "graph");
    const LevelSetTrajectory v = io::read_levelset_trajectory(dir, "vtilde");
    if (g.snapshots.empty() || v.snapshots.empty()) {
      log << "error: no graph/vtilde snapshots in " << dir.string() << "\n";
      return kExitConfig;
    }
    std::vector<io::SvgResult> out{io::emit_svg_contours(g, times, dir / "render", "graph", c.level()),
                                   io::emit_svg_contours(v, times, dir / "render", "vtilde")};
    const LevelSetTrajectory w = io::read_levelset_trajectory(dir, "w");
    if (!w.snapshots.empty()) out.push_back(io::emit_svg_contours(w, times, dir / "render", "w"));
    for (const auto& r : out) {
      for (const auto& wmsg : r.warnings) log << "warning: " << wmsg << "\n";
      for (const auto& f : r.files) log << f.string() << "\n";
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitPass;
}

}  // namespace mcf
