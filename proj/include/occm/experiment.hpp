#pragma once

// Config-driven experiments: one JSON config {command, params, seed, output}
// per run, a result document {config, result, metadata}, and manifests that
// rerun a list of configs and compare selected result fields to tolerances.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "occm/grid_measure.hpp"
#include "occm/json_io.hpp"

namespace occm {

using io::Json;

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitInvalid = 2, kExitNumerical = 3 };

/// A config that does not validate; `field` is a JSON pointer to the culprit.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  std::string command;
  Json params = Json::object();
  std::optional<std::uint64_t> seed;
  std::string output;  // empty: stdout
};

const std::vector<std::string>& known_commands();
bool is_stochastic(const std::string& command);

/// Checks top-level keys, the command name and the seed rule. Per-command
/// parameters are checked when the command runs.
ExperimentConfig parse_config(const Json& j);
Json config_to_json(const ExperimentConfig& c);

struct CsvTable {
  std::string suffix;  // appended to the output stem, e.g. "_profile.csv"
  std::string body;
};

struct RunResult {
  Json result;
  std::vector<CsvTable> tables;
  bool numerical_failure = false;
};

/// Runs the command. Throws ConfigError for bad params and occm::Error from
/// the library.
RunResult run_experiment(const ExperimentConfig& c);

/// {config, result}: the deterministic part of a result document.
Json result_body(const ExperimentConfig& c, const RunResult& r);

/// Runs, writes the result document (and CSV tables next to it) and maps
/// failures onto exit codes. Nothing is written on exit 2.
int run(const ExperimentConfig& c, std::ostream& log);

struct CheckOutcome {
  std::string criterion;
  std::string path;
  std::string op;
  Json actual;
  Json expected;
  bool pass = false;
};

struct ReproduceReport {
  std::vector<CheckOutcome> checks;
  std::vector<std::string> bodies;  // result_body(...).dump() per criterion
  bool all_pass() const;
};

/// Manifest: {criteria: [{name, config, checks: [{path, op, value | ref, tol}]}]}.
/// Paths are JSON pointers into the result body. Ops: <=, >=, <, >, ==,
/// approx (|a - b| <= tol), rel (|a - b| <= tol |b|), true, false,
/// decreasing, increasing (strict, on arrays).
ReproduceReport reproduce(const Json& manifest);
int reproduce_file(const std::string& path, std::ostream& out);

/// (1/3) N(0, 1) + (1/3) N(n, 1) + (1/3) N(0, n^2) in d = 1, and its limit
/// collection {alpha, alpha} with alpha = (1/3) N(0, 1).
struct ThreeGaussianMixture {
  DiscreteMeasure measure;
  Collection limit;
};

ThreeGaussianMixture three_gaussian_mixture(double n, double h);

}  // namespace occm
