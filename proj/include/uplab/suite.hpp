#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "uplab/config.hpp"
#include "uplab/flat.hpp"

namespace uplab {

/// How a check row is judged against its tolerance.
///   abs:    |slack| <= tol
///   rel:    |slack| / |target| <= tol
///   min:    slack >= -tol
///   strict: slack > tol * ratio_error   (tol is a safety factor)
///   exact:  slack == 0                  (counts)
/// A --tolerance override replaces tol for abs, rel and min only.
enum class CheckMode { Abs, Rel, Min, Strict, Exact };

std::string mode_name(CheckMode m);

struct CheckResult {
  std::string suite;
  std::string check;
  InequalityReport row;
  CheckMode mode = CheckMode::Abs;
  double tolerance = 0.0;
  bool pass = false;
  std::string error;  // non-empty when the computation threw
};

/// Columns of an xy-series or small table for external plotting.
struct PlotSeries {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct SuiteResult {
  std::string name;
  std::vector<CheckResult> checks;
  std::vector<PlotSeries> series;
  double wall_seconds = 0.0;
  std::string config_hash;  // FNV-1a 64 of render_config, hex
  std::uint64_t seed = 0;

  /// True iff there is at least one check and every check passes.
  bool pass() const;
};

/// Applies the mode and a non-finite guard to a filled-in check.
void judge(CheckResult& c);

/// Runs one concrete suite. Computation errors are recorded on the check they
/// belong to; the remaining checks still run.
SuiteResult run_suite(const RunConfig& config, SuiteName which);
/// Runs config.suite, expanding `all` into every concrete suite.
std::vector<SuiteResult> run_suites(const RunConfig& config);

std::string config_hash(const RunConfig& config);

/// Deterministic CSV of the check rows: check,param,lhs,rhs,ratio,target,slack,err,
/// mode,tolerance,pass.
std::string suite_csv(const SuiteResult& r);
/// The same rows plus metadata (suite, pass, wall_seconds, config_hash, seed).
std::string suite_json(const SuiteResult& r);
/// Human-readable table with slack and tolerance of every check.
std::string summary_text(const std::vector<SuiteResult>& results);

/// Writes <suite>.csv and <suite>.json per result plus summary.txt into dir.
/// Throws Error on I/O failure.
void write_suite_outputs(const std::vector<SuiteResult>& results, const std::string& dir);

/// Writes one <name>.csv per plot series into dir and returns the paths. A
/// result without series writes nothing and prints a warning to `warn`.
std::vector<std::string> emit_plot_data(const SuiteResult& result, const std::string& dir,
                                        std::ostream& warn);

enum ExitCode { kExitPass = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitIo = 3 };

}  // namespace uplab
