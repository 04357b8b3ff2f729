#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uplab/errors.hpp"
#include "uplab/flat.hpp"
#include "uplab/norm.hpp"
#include "uplab/quadrature.hpp"

namespace uplab {

enum class SuiteName { Identities, FlatHpw, FlatHardy, Hyperbolic, KoRefute, ChpwBounds, All };

std::string suite_name(SuiteName s);
/// Throws DomainError on an unknown name.
SuiteName parse_suite_name(const std::string& s);
/// The six concrete suites in run order.
std::vector<SuiteName> concrete_suites();

struct NormConfig {
  std::string family = "euclidean";  // euclidean | weighted-euclidean | lp | custom
  int dimension = 3;
  double exponent = 2.0;       // lp only
  std::vector<double> matrix;  // weighted-euclidean only, row-major
  std::string name;            // custom only, see custom_norm_names()

  bool operator==(const NormConfig&) const = default;
};

struct Grids {
  std::vector<double> lambda;
  std::vector<double> epsilon;
  std::vector<double> rho;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> dimensions;

  bool operator==(const Grids&) const = default;
};

struct Params {
  double hardy_r = 1.0;
  double hardy_R = 2.0;
  double ko_alpha_min = 3.0;
  double ko_alpha_max = 100.0;
  int ko_nodes = 4096;
  int ko_n = 4;

  bool operator==(const Params&) const = default;
};

struct RunConfig {
  SuiteName suite = SuiteName::Identities;
  NormConfig norm;
  std::optional<ExponentTriple> triple;
  Grids grids;
  Params params;
  QuadratureSpec quadrature;  // the top-level `seed` key is quadrature.mc_seed
  std::string output_dir = "out";
  std::optional<double> tolerance;  // overrides every accuracy tolerance

  bool operator==(const RunConfig&) const = default;
};

struct ConfigIssue {
  int line = 0;  // 0: not tied to a line
  std::string message;
};

/// Collects every problem found in a config. what() lists them one per line
/// as "line N: message".
class ConfigError : public DomainError {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Parses and validates. Throws ConfigError listing every issue found.
RunConfig parse_config(const std::string& text);
/// Canonical text form; parse_config(render_config(c)) == c.
std::string render_config(const RunConfig& c);
/// Reads a file and parses it. Throws Error when the file cannot be read.
RunConfig load_config(const std::string& path);

/// Suite-specific required fields. Returns the issues (empty when valid).
std::vector<ConfigIssue> validate_config(const RunConfig& c);

std::vector<std::string> custom_norm_names();
/// Throws DomainError for an invalid block.
MinkowskiNorm build_norm(const NormConfig& c);

}  // namespace uplab
