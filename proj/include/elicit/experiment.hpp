#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "elicit/instance.hpp"
#include "elicit/oracle.hpp"

namespace elicit {

/// Declarative experiment description. JSON schema (unknown keys are
/// ConfigError at every level):
///
///   experiment     "sweep-k" | "comptron-run" | "lowerbound" | "prop2" |
///                  "robust" | "bound-audit"                     (required)
///   instance       {"path": file} or {"generator": name, ...params}
///                  generators: "uniform-gaps" {n, seed?},
///                  "theorem2" {k?}, "prop2" {k?}
///   k              [int, ...]                                   (required)
///   eta            constant flip rate in [0, 1/2), default 0
///   delta          failure probability in (0, 1), default 0.05
///   trials         >= 1, default 1
///   seed           master seed, default 0
///   resample       draw a fresh generated instance per trial, default false
///   class          "all" | "threshold", default "all"
///   out            output directory, default "out"
///   record_timing  fill the wall_ms column, default false
///   threads        worker threads, default 1
struct ExperimentConfig {
  std::string experiment;
  nlohmann::json instance = nlohmann::json::object();
  std::vector<int> k;
  double eta = 0.0;
  double delta = 0.05;
  int trials = 1;
  std::uint64_t seed = 0;
  bool resample = false;
  std::string hypothesis_class = "all";
  std::string out = "out";
  bool record_timing = false;
  int threads = 1;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

ExperimentConfig load_config(const std::string& path);

/// FNV-1a 64 over the canonical JSON dump.
std::uint64_t config_hash(const ExperimentConfig& config);

/// Builds a generated instance from {"generator": name, ...}. `seed` is used
/// when the generator object carries no "seed" of its own.
TabularInstance<double> generate_instance(const nlohmann::json& spec, std::uint64_t seed);

/// n points, uniform weights, labels fair coins, gaps uniform in (0, 1]
/// with the wrong decision at utility 0.
TabularInstance<double> uniform_gap_instance(Index n, std::uint64_t seed);

struct SweepRecord {
  int k = 0;
  int trial = 0;
  double excess_risk = 0.0;
  double est_error = 0.0;
  std::uint64_t queries = 0;
  double wall_ms = 0.0;
};

inline constexpr const char* kSweepHeader = "k,trial,excess_risk,est_error,queries,wall_ms";

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_sweep_csv(std::istream& in);
std::vector<SweepRecord> read_sweep_csv(const std::string& path);

struct RateFit {
  bool defined = false;
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual of the log-log fit.
  double residual = 0.0;
  std::size_t points = 0;
  std::string message;
};

/// Least-squares slope of log(y) against log(x) over points with y > 0.
/// Undefined with fewer than 3 such points.
RateFit fit_loglog(const std::vector<std::pair<double, double>>& xy);

/// Rate of the mean est_error per k.
RateFit fit_rate(const std::vector<SweepRecord>& records);

/// Outcome of run(): records (sorted by k, trial), the manifest, and the
/// human-readable summary lines that the CLI prints.
struct RunResult {
  std::vector<SweepRecord> records;
  nlohmann::json manifest;
  std::vector<std::string> summary;
  /// Experiment-specific payload written to <out>/<experiment>.json.
  nlohmann::json details = nlohmann::json::object();
  std::vector<std::string> warnings;
  /// Count of failed checks (bound-audit violations); nonzero maps to exit 1.
  std::size_t failures = 0;
};

/// Runs the experiment in memory.
RunResult run_experiment(const ExperimentConfig& config);

/// Runs and writes <out>/records.csv (when the experiment produces rows),
/// <out>/<experiment>.json and <out>/manifest.json.
RunResult run(const ExperimentConfig& config);

}  // namespace elicit
