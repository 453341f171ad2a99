// Command-line front end: simulate | replay | tune | generate.

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "renewal/runner.hpp"

namespace {

struct Flags {
  std::optional<std::size_t> rows;
  std::optional<std::size_t> batch;
  std::optional<double> sim_threshold;
  std::optional<double> lc_low;
  std::optional<double> lc_high;
  std::optional<std::string> model;
  std::optional<std::string> drift;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> csv;
  std::optional<std::string> schema;
  std::optional<std::string> config;
  bool flags_only = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--rows", f.rows, "Rows streamed after the initial batch");
  cmd->add_option("--batch", f.batch, "Minimum rows per decision (L)");
  cmd->add_option("--sim-threshold", f.sim_threshold, "Similarity threshold z");
  cmd->add_option("--lc-low", f.lc_low, "Lower loss-change threshold x");
  cmd->add_option("--lc-high", f.lc_high, "Upper loss-change threshold y");
  cmd->add_option("--model", f.model, "regression | classification");
  cmd->add_option("--drift", f.drift, "none | abrupt:ROW | gradual:START:END");
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_option("--out", f.out, "Output CSV path");
  cmd->add_option("--config", f.config, "JSON config file; command-line flags take precedence");
}

renewal::RunConfig resolve(const std::string& mode, const Flags& f) {
  renewal::RunConfig cfg;
  if (f.config) {
    std::ifstream in(*f.config);
    if (!in) throw renewal::Error("cannot open config file '" + *f.config + "'");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw renewal::ValidationError("config file is not valid JSON: " + std::string(e.what()));
    }
    cfg = renewal::run_config_from_json(doc, cfg);
  }
  cfg.mode = mode;
  if (f.rows) cfg.rows = *f.rows;
  if (f.batch) cfg.thresholds.min_rows = *f.batch;
  if (f.sim_threshold) cfg.thresholds.similarity = *f.sim_threshold;
  if (f.lc_low) cfg.thresholds.lc_low = *f.lc_low;
  if (f.lc_high) cfg.thresholds.lc_high = *f.lc_high;
  if (f.model) cfg.model = renewal::parse_task_kind(*f.model);
  if (f.drift) cfg.drift = *f.drift;
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out = *f.out;
  if (f.csv) cfg.csv_path = *f.csv;
  if (f.schema) cfg.schema_path = *f.schema;
  if (f.flags_only) cfg.flags_only = true;
  return cfg;
}

void print_summary(const renewal::RunResult& result) {
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& r : result.records) ++counts[static_cast<int>(r.flag)];
  std::cout << "decisions: " << result.records.size() << " (retain " << counts[0] << ", update " << counts[1]
            << ", retrain " << counts[2] << ")\n";
  if (!result.records.empty()) {
    double first = result.records.front().post_metric;
    double last = result.records.back().post_metric;
    std::cout << "final " << renewal::to_string(result.metric) << ": " << renewal::format_double(last) << "\n";
    if (first != 0.0 && first == first && last == last)
      std::cout << "improvement vs batch 1: "
                << renewal::format_double(renewal::relative_improvement(first, last, result.metric)) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data renewal engine: batch similarity and loss-change driven model renewal"};
  app.require_subcommand(1);

  Flags f;
  auto* sim = app.add_subcommand("simulate", "Run the pipeline on a generated stream");
  add_common(sim, f);
  sim->add_flag("--flags-only", f.flags_only, "Write only batch_index,rows,flag");

  auto* rep = app.add_subcommand("replay", "Run the pipeline over a CSV file");
  add_common(rep, f);
  rep->add_option("--csv", f.csv, "Data CSV path")->required();
  rep->add_option("--schema", f.schema, "Schema JSON sidecar path")->required();
  rep->add_flag("--flags-only", f.flags_only, "Write only batch_index,rows,flag");

  auto* tun = app.add_subcommand("tune", "Threshold grid over one generated stream");
  add_common(tun, f);

  auto* gen = app.add_subcommand("generate", "Write the simulate stream as CSV plus schema sidecar");
  add_common(gen, f);
  gen->add_option("--csv", f.csv, "Data CSV path")->required();
  gen->add_option("--schema", f.schema, "Schema JSON sidecar path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      auto cfg = resolve("simulate", f);
      if (cfg.out.empty()) throw renewal::ValidationError("--out is required");
      print_summary(renewal::simulate(cfg));
    } else if (rep->parsed()) {
      auto cfg = resolve("replay", f);
      if (cfg.out.empty()) throw renewal::ValidationError("--out is required");
      print_summary(renewal::replay_files(cfg));
    } else if (tun->parsed()) {
      auto cfg = resolve("tune", f);
      if (cfg.out.empty()) throw renewal::ValidationError("--out is required");
      auto report = renewal::tune(cfg);
      std::cout << "grid cells: " << report.cells.size() << "\n";
    } else if (gen->parsed()) {
      renewal::generate_files(resolve("generate", f));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
