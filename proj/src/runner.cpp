#include "renewal/runner.hpp"

#include <array>
#include <fstream>
#include <future>
#include <limits>

namespace renewal {

using json = nlohmann::json;

namespace {

constexpr std::array<double, 3> kGridSimilarity = {0.3, 0.5, 0.7};
constexpr std::array<std::pair<double, double>, 6> kGridLossChange = {
    {{1.0, 0.4}, {0.9, 0.4}, {0.8, 0.4}, {1.0, 0.3}, {0.9, 0.3}, {0.8, 0.3}}};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw Error("failed writing '" + path + "'");
}

RunResult finish(const RunConfig& cfg, std::vector<DecisionRecord> records, MetricKind metric) {
  RunResult result;
  result.metric = metric;
  result.records = std::move(records);
  ExportOptions opts;
  opts.header_lines = cfg.describe();
  opts.flags_only = cfg.flags_only;
  result.csv = render_metrics_csv(result.records, trajectory_from(result.records, metric), opts);
  if (!cfg.out.empty()) write_text(cfg.out, result.csv);
  return result;
}

}  // namespace

void RunConfig::validate() const {
  if (mode != "simulate" && mode != "replay" && mode != "tune" && mode != "generate")
    throw ValidationError("unknown mode '" + mode + "'");
  thresholds.validate();
  if (rows < 1) throw ValidationError("--rows must be >= 1");
  if (mode == "replay" && (csv_path.empty() || schema_path.empty()))
    throw ValidationError("replay needs --csv and --schema");
  if (mode == "generate" && (csv_path.empty() || schema_path.empty()))
    throw ValidationError("generate needs --csv and --schema");
  if (mode != "replay") stream_spec().validate();
}

std::string RunConfig::resolved_drift() const {
  if (!drift.empty()) return drift;
  if (mode != "tune") return "none";
  const std::size_t batch = thresholds.min_rows;
  const std::size_t start = batch + (rows / 2 / batch) * batch;
  return "gradual:" + std::to_string(start) + ":" + std::to_string(start + 2 * batch);
}

StreamSpec RunConfig::stream_spec() const {
  StreamSpec spec = StreamSpec::make_default(model, rows + thresholds.min_rows, resolved_drift(), seed);
  if (!stream.empty()) {
    spec = stream_spec_from_json(stream, spec);
    if (spec.task != model) throw ValidationError("stream task does not match --model");
  }
  return spec;
}

std::vector<std::string> RunConfig::describe() const {
  std::vector<std::string> lines = {
      "mode=" + mode,
      "rows=" + std::to_string(rows),
      "batch=" + std::to_string(thresholds.min_rows),
      "sim_threshold=" + format_double(thresholds.similarity),
      "lc_low=" + format_double(thresholds.lc_low),
      "lc_high=" + format_double(thresholds.lc_high),
      "model=" + std::string(to_string(model)),
      "seed=" + std::to_string(seed),
      "flags_only=" + std::string(flags_only ? "true" : "false"),
  };
  if (mode == "replay") {
    lines.push_back("csv=" + csv_path);
    lines.push_back("schema=" + schema_path);
  } else {
    lines.push_back("drift=" + resolved_drift());
    lines.push_back("stream=" + to_json(stream_spec()).dump());
  }
  return lines;
}

RunConfig run_config_from_json(const json& doc, RunConfig base) {
  try {
    if (doc.contains("mode")) base.mode = doc.at("mode").get<std::string>();
    if (doc.contains("rows")) base.rows = doc.at("rows").get<std::size_t>();
    if (doc.contains("batch")) base.thresholds.min_rows = doc.at("batch").get<std::size_t>();
    if (doc.contains("sim_threshold")) base.thresholds.similarity = doc.at("sim_threshold").get<double>();
    if (doc.contains("lc_low")) base.thresholds.lc_low = doc.at("lc_low").get<double>();
    if (doc.contains("lc_high")) base.thresholds.lc_high = doc.at("lc_high").get<double>();
    if (doc.contains("model")) base.model = parse_task_kind(doc.at("model").get<std::string>());
    if (doc.contains("drift")) base.drift = doc.at("drift").get<std::string>();
    if (doc.contains("seed")) base.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("out")) base.out = doc.at("out").get<std::string>();
    if (doc.contains("csv")) base.csv_path = doc.at("csv").get<std::string>();
    if (doc.contains("schema")) base.schema_path = doc.at("schema").get<std::string>();
    if (doc.contains("flags_only")) base.flags_only = doc.at("flags_only").get<bool>();
    if (doc.contains("stream")) base.stream = doc.at("stream");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid config: ") + e.what());
  }
  return base;
}

std::vector<DecisionRecord> run_pipeline(const Batch& stream, const Thresholds& thresholds, std::uint64_t seed) {
  thresholds.validate();
  const std::size_t batch = thresholds.min_rows;
  if (stream.size() < batch)
    throw ValidationError("stream has " + std::to_string(stream.size()) + " rows, fewer than one batch of " +
                          std::to_string(batch));
  Batch initial = validate_batch(stream.rows().slice(0, batch), stream.schema());

  RegressionConfig reg;
  reg.seed = seed;
  PerceptronConfig cls;
  cls.seed = seed;
  Pipeline pipeline(initial, fit_default(initial, reg, cls), thresholds);

  for (std::size_t start = batch; start < stream.size(); start += batch) {
    std::size_t count = std::min(batch, stream.size() - start);
    pipeline.step(validate_batch(stream.rows().slice(start, count), stream.schema()));
  }
  return pipeline.history();
}

RunResult simulate(const RunConfig& cfg) {
  cfg.validate();
  Batch stream = generate(cfg.stream_spec());
  return finish(cfg, run_pipeline(stream, cfg.thresholds, cfg.seed), metric_for(cfg.model));
}

RunResult replay_files(const RunConfig& cfg) {
  cfg.validate();
  Batch stream = replay(cfg.csv_path, cfg.schema_path);
  return finish(cfg, run_pipeline(stream, cfg.thresholds, cfg.seed), metric_for(stream.schema().task()));
}

TuneReport tune(const RunConfig& cfg) {
  cfg.validate();
  const Batch stream = generate(cfg.stream_spec());
  const MetricKind metric = metric_for(cfg.model);

  std::vector<std::future<TuneCell>> jobs;
  for (double z : kGridSimilarity) {
    for (auto [y, x] : kGridLossChange) {
      jobs.push_back(std::async(std::launch::async, [&stream, &cfg, z, y, x] {
        Thresholds t{z, x, y, cfg.thresholds.min_rows};
        std::vector<DecisionRecord> records = run_pipeline(stream, t, cfg.seed);
        TuneCell cell{z, y, x, z == 0.5 && y == 0.9 && x == 0.3};
        for (const auto& r : records) {
          if (r.flag == RenewalFlag::Retain) ++cell.retain;
          if (r.flag == RenewalFlag::Update) ++cell.update;
          if (r.flag == RenewalFlag::Retrain) ++cell.retrain;
        }
        cell.final_metric = records.empty() ? std::numeric_limits<double>::quiet_NaN() : records.back().post_metric;
        return cell;
      }));
    }
  }

  TuneReport report;
  for (auto& job : jobs) report.cells.push_back(job.get());

  for (const auto& line : cfg.describe()) report.csv += "# " + line + "\n";
  report.csv += "z,y,x,baseline,retain,update,retrain,final_" + std::string(to_string(metric)) + "\n";
  for (const auto& c : report.cells) {
    report.csv += format_double(c.z) + "," + format_double(c.y) + "," + format_double(c.x) + "," +
                  (c.baseline ? "1" : "0") + "," + std::to_string(c.retain) + "," + std::to_string(c.update) + "," +
                  std::to_string(c.retrain) + "," + format_double(c.final_metric) + "\n";
  }
  if (!cfg.out.empty()) write_text(cfg.out, report.csv);
  return report;
}

void generate_files(const RunConfig& cfg) {
  cfg.validate();
  Batch stream = generate(cfg.stream_spec());
  write_csv(stream, cfg.csv_path);
  save_schema(stream.schema(), cfg.schema_path);
}

}  // namespace renewal
