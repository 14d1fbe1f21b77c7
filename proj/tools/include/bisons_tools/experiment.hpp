#pragma once

// Experiment driver behind `bisons run`: builds the loss stream, plays one
// algorithm over it, scores it against the hindsight comparator and writes
// trace.csv, summary.json and (for lbftrl) stability.csv.

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "bisons/config.hpp"

namespace bisons::tools {

struct ExperimentConfig {
  std::string algo;       // bisons | qbisons | lbftrl | ons
  int d = 0;
  long long T = 0;
  std::uint64_t seed = 0;
  std::string adversary;  // built-in generator name, or empty
  std::string data_path;  // returns / measurement file, or empty
  Config params;          // algorithm and adversary overrides
  std::string out_dir;
};

/// Keys of a flat config that configure the run itself rather than the
/// algorithm: algo, d, T, seed, adversary, data, out.
ExperimentConfig experiment_from_config(const Config& cfg);

/// Throws Errc::kInvalidArgument / kParameter on a config that cannot run,
/// including override keys the chosen algorithm does not understand.
void validate_experiment(const ExperimentConfig& cfg);

struct TraceRow {
  long long t = 0;
  int epoch = 1;
  long long internal_time = 1;
  double loss = 0.0;
  double cum_loss = 0.0;
  double comparator_cum_loss = 0.0;
  double regret = 0.0;
  bool reset = false;
};

struct StabilityRow {
  long long t = 0;
  std::string kind;
  int target = -1;
  int layer = -1;
  long long repetition = -1;
  double term = 0.0;
  double hessian_trace = 0.0;
};

struct ExperimentResult {
  std::vector<TraceRow> trace;
  std::vector<StabilityRow> stability;  // lbftrl only
  nlohmann::json summary;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes the result files into `dir` (created if missing).
void write_experiment(const ExperimentResult& result, const std::string& dir);

void write_trace(std::ostream& out, const std::vector<TraceRow>& rows);
void write_stability(std::ostream& out, const std::vector<StabilityRow>& rows);

}  // namespace bisons::tools
