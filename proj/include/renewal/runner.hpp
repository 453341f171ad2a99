#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "renewal/core.hpp"
#include "renewal/eval.hpp"
#include "renewal/policy.hpp"
#include "renewal/simgen.hpp"

namespace renewal {

// Resolved settings for one command-line invocation.
struct RunConfig {
  std::string mode = "simulate";  // simulate | replay | tune | generate
  std::size_t rows = 300000;      // rows streamed after the initial batch
  Thresholds thresholds;
  TaskKind model = TaskKind::Regression;
  // Empty selects the mode default: "none", except tune, which drifts
  // gradually over the two batches at the middle of the stream.
  std::string drift;
  std::uint64_t seed = 1;
  std::string out;
  std::string csv_path;
  std::string schema_path;
  bool flags_only = false;
  // Optional overrides applied on top of the default stream for `model`.
  nlohmann::json stream = nlohmann::json::object();

  void validate() const;
  std::string resolved_drift() const;
  // Stream of rows + L rows: the first L seed the model and reference batch.
  StreamSpec stream_spec() const;
  // "key=value" lines echoed into every output file.
  std::vector<std::string> describe() const;
};

// Fields present in `doc` override `base`.
RunConfig run_config_from_json(const nlohmann::json& doc, RunConfig base);

struct RunResult {
  std::vector<DecisionRecord> records;
  MetricKind metric = MetricKind::Rmse;
  std::string csv;  // what was (or would be) written to RunConfig::out
};

// First L rows of `stream` seed the model and the reference batch; the rest
// are fed to the pipeline one L-row chunk at a time. A trailing partial
// chunk never reaches a decision.
std::vector<DecisionRecord> run_pipeline(const Batch& stream, const Thresholds& thresholds, std::uint64_t seed);

RunResult simulate(const RunConfig& cfg);
RunResult replay_files(const RunConfig& cfg);

struct TuneCell {
  double z = 0.0;
  double y = 0.0;
  double x = 0.0;
  bool baseline = false;
  std::size_t retain = 0;
  std::size_t update = 0;
  std::size_t retrain = 0;
  double final_metric = 0.0;
};

struct TuneReport {
  std::vector<TuneCell> cells;  // z-major, then the (y, x) pairs in grid order
  std::string csv;
};

// Similarity thresholds {0.3, 0.5, 0.7} crossed with the loss-change pairs
// y/x in {1/0.4, 0.9/0.4, 0.8/0.4, 1/0.3, 0.9/0.3, 0.8/0.3}, all on one
// generated stream.
TuneReport tune(const RunConfig& cfg);

// Writes the simulate stream to csv_path plus its schema sidecar.
void generate_files(const RunConfig& cfg);

}  // namespace renewal
