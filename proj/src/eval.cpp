#include "renewal/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>

namespace renewal {

std::string_view to_string(MetricKind kind) { return kind == MetricKind::Rmse ? "rmse" : "auc"; }

MetricKind metric_for(TaskKind task) { return task == TaskKind::Regression ? MetricKind::Rmse : MetricKind::Auc; }

double auc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw ValidationError("auc: scores and labels differ in length");
  std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of positive ranks with ties sharing their average rank.
  double positives = 0.0;
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      double y = labels[order[k]];
      if (y == 1.0) {
        positives += 1.0;
        rank_sum += avg_rank;
      } else if (y != 0.0 && y != -1.0) {
        throw ValidationError("auc: labels must be binary");
      }
    }
    i = j + 1;
  }
  double negatives = static_cast<double>(n) - positives;
  if (positives == 0.0 || negatives == 0.0) throw ValidationError("auc needs both classes present");
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

double relative_improvement(double before, double after, MetricKind kind) {
  if (kind == MetricKind::Rmse) {
    if (!(before > 0.0)) throw ValidationError("RMSE improvement needs a positive baseline");
    return (before - after) / before;
  }
  if (before == 0.0) throw ValidationError("AUC improvement needs a non-zero baseline");
  return (after - before) / before;
}

void MetricTrajectory::add(std::size_t batch_index, double value, RenewalFlag flag) {
  if (!points_.empty() && batch_index <= points_.back().batch_index)
    throw ValidationError("trajectory batch indices must be strictly increasing");
  points_.push_back({batch_index, value, flag});
}

MetricTrajectory trajectory_from(const std::vector<DecisionRecord>& records, MetricKind kind) {
  MetricTrajectory t(kind);
  for (const auto& r : records) t.add(r.batch_index, r.post_metric, r.flag);
  return t;
}

std::string render_metrics_csv(const std::vector<DecisionRecord>& records, const MetricTrajectory& trajectory,
                               const ExportOptions& options) {
  if (trajectory.points().size() != records.size())
    throw ValidationError("trajectory and record list differ in length");
  for (std::size_t i = 0; i < records.size(); ++i)
    if (trajectory.points()[i].batch_index != records[i].batch_index)
      throw ValidationError("trajectory and records disagree on batch indices");

  std::string out;
  for (const auto& line : options.header_lines) out += "# " + line + "\n";
  out += options.flags_only ? "batch_index,rows,flag" : kDecisionCsvHeader;
  out += "\n";

  std::array<std::size_t, 3> counts{};
  for (const auto& r : records) {
    ++counts[static_cast<std::size_t>(r.flag)];
    if (options.flags_only) {
      out += std::to_string(r.batch_index) + "," + std::to_string(r.rows) + "," +
             std::to_string(static_cast<int>(r.flag)) + "\n";
    } else {
      out += to_csv_row(r) + "\n";
    }
  }

  out += "# summary: records=" + std::to_string(records.size()) + " retain=" + std::to_string(counts[0]) +
         " update=" + std::to_string(counts[1]) + " retrain=" + std::to_string(counts[2]) + "\n";
  if (!records.empty() && !options.flags_only) {
    const auto& pts = trajectory.points();
    double first = pts.front().value;
    double last = pts.back().value;
    out += "# final_" + std::string(to_string(trajectory.kind())) + "=" + format_double(last) + "\n";
    std::string improvement = "nan";
    if (std::isfinite(first) && std::isfinite(last) && first != 0.0)
      improvement = format_double(relative_improvement(first, last, trajectory.kind()));
    out += "# improvement_vs_batch1=" + improvement + "\n";
  }
  return out;
}

void export_metrics(const std::vector<DecisionRecord>& records, const MetricTrajectory& trajectory,
                    const std::filesystem::path& path, const ExportOptions& options) {
  std::string text = render_metrics_csv(records, trajectory, options);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace renewal
