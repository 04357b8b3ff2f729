#include "uplab/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace uplab {

namespace {

const char* const kSuiteNames[] = {"identities", "flat-hpw",    "flat-hardy", "hyperbolic",
                                   "ko-refute",  "chpw-bounds", "all"};

// Section -> accepted keys. The empty section is the top level.
const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"", {"suite", "seed", "output_dir", "tolerance"}},
      {"norm", {"family", "dimension", "exponent", "matrix", "name"}},
      {"triple", {"n", "p", "q"}},
      {"grids", {"lambda", "epsilon", "rho", "alpha", "beta", "dimensions"}},
      {"params", {"hardy_r", "hardy_R", "ko_alpha_min", "ko_alpha_max", "ko_nodes", "ko_n"}},
      {"quadrature", {"rel_tol", "max_subdivisions", "mc_samples", "lattice_points"}},
  };
  return s;
}

struct Value {
  enum Kind { Number, String, Array } kind = Number;
  std::string text;  // raw number token or string contents
  std::vector<std::string> items;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a trailing comment that is not inside a string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

bool parse_double(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size() && errno == 0 && std::isfinite(out);
}

bool parse_u64(const std::string& tok, std::uint64_t& out) {
  if (tok.empty() || tok[0] == '-' || tok[0] == '+') return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtoull(tok.c_str(), &end, 0);
  return end == tok.c_str() + tok.size() && errno == 0;
}

class Reader {
 public:
  explicit Reader(std::vector<ConfigIssue>& issues) : issues_(issues) {}

  void parse(const std::string& text) {
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const std::string s = trim(strip_comment(raw));
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') {
          issue(line, "syntax error: unterminated section header");
          continue;
        }
        section = trim(s.substr(1, s.size() - 2));
        if (!schema().count(section) || section.empty()) {
          issue(line, "unknown section [" + section + "]");
          section = "?";
        } else if (!sections_.insert({section, line}).second) {
          issue(line, "duplicate section [" + section + "]");
        }
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        issue(line, "syntax error: expected key = value");
        continue;
      }
      const std::string key = trim(s.substr(0, eq));
      if (!valid_key(key)) {
        issue(line, "syntax error: invalid key '" + key + "'");
        continue;
      }
      if (section == "?") continue;  // already reported
      if (!schema().at(section).count(key)) {
        issue(line, "unknown key '" + qualified(section, key) + "'");
        continue;
      }
      Value v;
      v.line = line;
      if (!parse_value(trim(s.substr(eq + 1)), v)) {
        issue(line, "syntax error: malformed value for '" + qualified(section, key) + "'");
        continue;
      }
      if (!values_.insert({qualified(section, key), v}).second)
        issue(line, "duplicate key '" + qualified(section, key) + "'");
    }
  }

  static std::string qualified(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
  }

  bool has(const std::string& k) const { return values_.count(k) > 0; }
  bool has_section(const std::string& s) const { return sections_.count(s) > 0; }
  int section_line(const std::string& s) const {
    const auto it = sections_.find(s);
    return it == sections_.end() ? 0 : it->second;
  }
  int line_of(const std::string& k) const {
    const auto it = values_.find(k);
    return it == values_.end() ? 0 : it->second.line;
  }

  void get_string(const std::string& k, std::string& out) {
    const Value* v = find(k);
    if (!v) return;
    if (v->kind != Value::String) return issue(v->line, "'" + k + "' must be a quoted string");
    out = v->text;
  }
  void get_double(const std::string& k, double& out) {
    const Value* v = find(k);
    if (!v) return;
    if (v->kind != Value::Number || !parse_double(v->text, out))
      issue(v->line, "'" + k + "' must be a finite number");
  }
  void get_int(const std::string& k, int& out) {
    double d = 0;
    const Value* v = find(k);
    if (!v) return;
    if (v->kind != Value::Number || !parse_double(v->text, d) || d != std::floor(d) ||
        std::abs(d) > 1e9)
      return issue(v->line, "'" + k + "' must be an integer");
    out = static_cast<int>(d);
  }
  void get_u64(const std::string& k, std::uint64_t& out) {
    const Value* v = find(k);
    if (!v) return;
    if (v->kind != Value::Number || !parse_u64(v->text, out))
      issue(v->line, "'" + k + "' must be a non-negative integer");
  }
  void get_list(const std::string& k, std::vector<double>& out) {
    const Value* v = find(k);
    if (!v) return;
    if (v->kind != Value::Array) return issue(v->line, "'" + k + "' must be a list [a, b, ...]");
    out.clear();
    for (const auto& item : v->items) {
      double d = 0;
      if (!parse_double(item, d)) return issue(v->line, "'" + k + "' holds a non-numeric entry");
      out.push_back(d);
    }
  }

  void issue(int line, std::string msg) { issues_.push_back({line, std::move(msg)}); }

 private:
  const Value* find(const std::string& k) const {
    const auto it = values_.find(k);
    return it == values_.end() ? nullptr : &it->second;
  }

  static bool parse_value(const std::string& s, Value& v) {
    if (s.empty()) return false;
    if (s.front() == '"') {
      if (s.size() < 2 || s.back() != '"') return false;
      v.kind = Value::String;
      v.text = s.substr(1, s.size() - 2);
      return v.text.find('"') == std::string::npos;
    }
    if (s.front() == '[') {
      if (s.back() != ']') return false;
      v.kind = Value::Array;
      const std::string body = trim(s.substr(1, s.size() - 2));
      if (body.empty()) return true;
      std::stringstream ss(body);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) return false;
        v.items.push_back(item);
      }
      return body.back() != ',';
    }
    v.kind = Value::Number;
    v.text = s;
    return s.find_first_of(" \t\"[],") == std::string::npos;
  }

  std::vector<ConfigIssue>& issues_;
  std::map<std::string, Value> values_;
  std::map<std::string, int> sections_;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
  return out + "]";
}

bool needs(SuiteName have, SuiteName s) { return have == s || have == SuiteName::All; }

bool all_positive(const std::vector<double>& v) {
  for (double x : v)
    if (!(x > 0)) return false;
  return true;
}

bool all_integers_at_least(const std::vector<double>& v, int lo) {
  for (double x : v)
    if (x != std::floor(x) || x < lo || x > 64) return false;
  return true;
}

using LineOf = std::function<int(const std::string&)>;

std::vector<ConfigIssue> validate(const RunConfig& c, const LineOf& line_of) {
  std::vector<ConfigIssue> out;
  auto bad = [&](const std::string& key, std::string msg) {
    out.push_back({line_of(key), std::move(msg)});
  };
  const std::string who = "suite '" + suite_name(c.suite) + "' ";
  auto require_grid = [&](const std::vector<double>& g, const std::string& name) {
    if (g.empty()) {
      bad("grids." + name, who + "requires a non-empty grids." + name);
      return false;
    }
    return true;
  };

  try {
    c.quadrature.validate();
  } catch (const DomainError& e) {
    bad("quadrature", std::string("quadrature: ") + e.what());
  }
  if (c.tolerance && !(*c.tolerance > 0)) bad("tolerance", "tolerance must be positive");

  const bool flat = needs(c.suite, SuiteName::FlatHpw) || needs(c.suite, SuiteName::FlatHardy);
  if (flat) {
    try {
      build_norm(c.norm);
    } catch (const DomainError& e) {
      bad("norm", std::string("norm: ") + e.what());
    }
  }
  if (needs(c.suite, SuiteName::Identities)) {
    if (!c.triple) bad("triple", who + "requires a [triple] section");
    if (require_grid(c.grids.lambda, "lambda") && !all_positive(c.grids.lambda))
      bad("grids.lambda", "grids.lambda entries must be positive");
  }
  if (needs(c.suite, SuiteName::FlatHpw)) {
    if (require_grid(c.grids.lambda, "lambda") && !all_positive(c.grids.lambda))
      bad("grids.lambda", "grids.lambda entries must be positive");
  }
  if (needs(c.suite, SuiteName::FlatHardy)) {
    if (c.norm.dimension < 3) bad("norm.dimension", who + "requires norm.dimension >= 3");
    if (!(0 < c.params.hardy_r && c.params.hardy_r < c.params.hardy_R))
      bad("params.hardy_r", "params must satisfy 0 < hardy_r < hardy_R");
    if (require_grid(c.grids.epsilon, "epsilon")) {
      for (double e : c.grids.epsilon)
        if (!(e > 0 && e < c.params.hardy_r)) {
          bad("grids.epsilon", "grids.epsilon entries must lie in (0, hardy_r)");
          break;
        }
      if (c.grids.epsilon.size() < 3)
        bad("grids.epsilon", "grids.epsilon needs at least 3 entries for the limit fit");
    }
  }
  if (needs(c.suite, SuiteName::Hyperbolic)) {
    if (require_grid(c.grids.rho, "rho"))
      for (double r : c.grids.rho)
        if (!(r > 0)) {
          bad("grids.rho", "grids.rho entries must be positive");
          break;
        }
    if (require_grid(c.grids.alpha, "alpha") && !all_positive(c.grids.alpha))
      bad("grids.alpha", "grids.alpha entries must be positive");
  }
  const bool dims = needs(c.suite, SuiteName::Hyperbolic) || needs(c.suite, SuiteName::KoRefute) ||
                    needs(c.suite, SuiteName::ChpwBounds);
  if (dims && require_grid(c.grids.dimensions, "dimensions") &&
      !all_integers_at_least(c.grids.dimensions, 3))
    bad("grids.dimensions", "grids.dimensions entries must be integers in [3, 64]");
  if (needs(c.suite, SuiteName::KoRefute)) {
    if (c.params.ko_n < 3) bad("params.ko_n", "params.ko_n must be at least 3");
    if (c.params.ko_nodes < 1) bad("params.ko_nodes", "params.ko_nodes must be positive");
    if (!(0 <= c.params.ko_alpha_min && c.params.ko_alpha_min < c.params.ko_alpha_max))
      bad("params.ko_alpha_min", "params must satisfy 0 <= ko_alpha_min < ko_alpha_max");
  }
  if (needs(c.suite, SuiteName::ChpwBounds)) {
    if (!all_positive(c.grids.alpha)) bad("grids.alpha", "grids.alpha entries must be positive");
    for (double b : c.grids.beta)
      if (!(b >= 0)) {
        bad("grids.beta", "grids.beta entries must be non-negative");
        break;
      }
  }
  return out;
}

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string out;
  for (const auto& i : issues) {
    if (!out.empty()) out += "\n";
    out += i.line > 0 ? "line " + std::to_string(i.line) + ": " + i.message : i.message;
  }
  return out;
}

}  // namespace

std::string suite_name(SuiteName s) { return kSuiteNames[static_cast<int>(s)]; }

SuiteName parse_suite_name(const std::string& s) {
  for (int i = 0; i < 7; ++i)
    if (s == kSuiteNames[i]) return static_cast<SuiteName>(i);
  throw DomainError("unknown suite '" + s + "'");
}

std::vector<SuiteName> concrete_suites() {
  return {SuiteName::Identities, SuiteName::FlatHpw,  SuiteName::FlatHardy,
          SuiteName::Hyperbolic, SuiteName::KoRefute, SuiteName::ChpwBounds};
}

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : DomainError(join_issues(issues)), issues_(std::move(issues)) {}

RunConfig parse_config(const std::string& text) {
  std::vector<ConfigIssue> issues;
  Reader r(issues);
  r.parse(text);

  RunConfig c;
  if (r.has("suite")) {
    std::string s;
    r.get_string("suite", s);
    try {
      if (!s.empty()) c.suite = parse_suite_name(s);
    } catch (const DomainError& e) {
      r.issue(r.line_of("suite"), e.what());
    }
  } else {
    r.issue(0, "missing required key 'suite'");
  }
  r.get_u64("seed", c.quadrature.mc_seed);
  r.get_string("output_dir", c.output_dir);
  if (r.has("tolerance")) {
    double t = 0;
    r.get_double("tolerance", t);
    c.tolerance = t;
  }

  r.get_string("norm.family", c.norm.family);
  r.get_int("norm.dimension", c.norm.dimension);
  r.get_double("norm.exponent", c.norm.exponent);
  r.get_list("norm.matrix", c.norm.matrix);
  r.get_string("norm.name", c.norm.name);

  if (r.has_section("triple")) {
    int n = 0;
    double p = 0, q = 0;
    bool complete = true;
    for (const char* k : {"triple.n", "triple.p", "triple.q"})
      if (!r.has(k)) {
        r.issue(r.section_line("triple"), std::string("[triple] is missing '") + (k + 7) + "'");
        complete = false;
      }
    const std::size_t before = issues.size();
    r.get_int("triple.n", n);
    r.get_double("triple.p", p);
    r.get_double("triple.q", q);
    if (complete && issues.size() == before) {
      try {
        c.triple = ExponentTriple(n, p, q);
      } catch (const AdmissibilityError& e) {
        r.issue(r.section_line("triple"), "triple (" + num(n) + ", " + num(p) + ", " + num(q) +
                                              ") is not admissible: fails " +
                                              e.failed_inequality());
      }
    }
  }

  r.get_list("grids.lambda", c.grids.lambda);
  r.get_list("grids.epsilon", c.grids.epsilon);
  r.get_list("grids.rho", c.grids.rho);
  r.get_list("grids.alpha", c.grids.alpha);
  r.get_list("grids.beta", c.grids.beta);
  r.get_list("grids.dimensions", c.grids.dimensions);

  r.get_double("params.hardy_r", c.params.hardy_r);
  r.get_double("params.hardy_R", c.params.hardy_R);
  r.get_double("params.ko_alpha_min", c.params.ko_alpha_min);
  r.get_double("params.ko_alpha_max", c.params.ko_alpha_max);
  r.get_int("params.ko_nodes", c.params.ko_nodes);
  r.get_int("params.ko_n", c.params.ko_n);

  r.get_double("quadrature.rel_tol", c.quadrature.rel_tol);
  r.get_int("quadrature.max_subdivisions", c.quadrature.max_subdivisions);
  r.get_u64("quadrature.mc_samples", c.quadrature.mc_samples);
  r.get_int("quadrature.lattice_points", c.quadrature.lattice_points);

  if (issues.empty()) {
    auto line_of = [&](const std::string& key) {
      if (r.has(key)) return r.line_of(key);
      const auto dot = key.find('.');
      return r.section_line(key.substr(0, dot));
    };
    for (auto& i : validate(c, line_of)) issues.push_back(std::move(i));
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

std::vector<ConfigIssue> validate_config(const RunConfig& c) {
  return validate(c, [](const std::string&) { return 0; });
}

std::string render_config(const RunConfig& c) {
  std::string out;
  out += "suite = \"" + suite_name(c.suite) + "\"\n";
  out += "seed = " + std::to_string(c.quadrature.mc_seed) + "\n";
  out += "output_dir = \"" + c.output_dir + "\"\n";
  if (c.tolerance) out += "tolerance = " + num(*c.tolerance) + "\n";

  out += "\n[norm]\n";
  out += "family = \"" + c.norm.family + "\"\n";
  out += "dimension = " + std::to_string(c.norm.dimension) + "\n";
  out += "exponent = " + num(c.norm.exponent) + "\n";
  if (!c.norm.matrix.empty()) out += "matrix = " + list(c.norm.matrix) + "\n";
  if (!c.norm.name.empty()) out += "name = \"" + c.norm.name + "\"\n";

  if (c.triple) {
    out += "\n[triple]\n";
    out += "n = " + std::to_string(c.triple->n()) + "\n";
    out += "p = " + num(c.triple->p()) + "\n";
    out += "q = " + num(c.triple->q()) + "\n";
  }

  out += "\n[grids]\n";
  const std::pair<const char*, const std::vector<double>*> grids[] = {
      {"lambda", &c.grids.lambda}, {"epsilon", &c.grids.epsilon}, {"rho", &c.grids.rho},
      {"alpha", &c.grids.alpha},   {"beta", &c.grids.beta},       {"dimensions", &c.grids.dimensions}};
  for (const auto& [name, g] : grids) out += std::string(name) + " = " + list(*g) + "\n";

  out += "\n[params]\n";
  out += "hardy_r = " + num(c.params.hardy_r) + "\n";
  out += "hardy_R = " + num(c.params.hardy_R) + "\n";
  out += "ko_alpha_min = " + num(c.params.ko_alpha_min) + "\n";
  out += "ko_alpha_max = " + num(c.params.ko_alpha_max) + "\n";
  out += "ko_nodes = " + std::to_string(c.params.ko_nodes) + "\n";
  out += "ko_n = " + std::to_string(c.params.ko_n) + "\n";

  out += "\n[quadrature]\n";
  out += "rel_tol = " + num(c.quadrature.rel_tol) + "\n";
  out += "max_subdivisions = " + std::to_string(c.quadrature.max_subdivisions) + "\n";
  out += "mc_samples = " + std::to_string(c.quadrature.mc_samples) + "\n";
  out += "lattice_points = " + std::to_string(c.quadrature.lattice_points) + "\n";
  return out;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::string> custom_norm_names() { return {"l2-l4-blend", "l2-l1smooth-blend"}; }

MinkowskiNorm build_norm(const NormConfig& c) {
  if (c.dimension < 1 || c.dimension > 64) throw DomainError("dimension must lie in [1, 64]");
  const int n = c.dimension;
  if (c.family == "euclidean") return MinkowskiNorm::euclidean(n);
  if (c.family == "weighted-euclidean") {
    if (c.matrix.size() != static_cast<std::size_t>(n * n))
      throw DomainError("weighted-euclidean needs a matrix with dimension^2 = " +
                        std::to_string(n * n) + " entries");
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = c.matrix[i * n + j];
    return MinkowskiNorm::weighted_euclidean(a);
  }
  if (c.family == "lp") return MinkowskiNorm::lp(n, c.exponent);
  if (c.family == "custom") {
    if (c.name == "l2-l4-blend")
      return MinkowskiNorm::custom(
          n, [](const Vector& y) { return 0.5 * (y.norm() + std::pow(y.array().pow(4).sum(), 0.25)); },
          {}, c.name);
    if (c.name == "l2-l1smooth-blend")
      // Euclidean plus a smoothed l1 term sum sqrt(y_i^2 + |y|^2); still 1-homogeneous and convex.
      return MinkowskiNorm::custom(
          n,
          [](const Vector& y) {
            const double s = y.squaredNorm();
            double t = 0;
            for (int i = 0; i < y.size(); ++i) t += std::sqrt(y[i] * y[i] + s);
            return 0.5 * (std::sqrt(s) + t / y.size());
          },
          {}, c.name);
    throw DomainError("unknown custom norm '" + c.name + "'");
  }
  throw DomainError("unknown norm family '" + c.family + "'");
}

}  // namespace uplab
