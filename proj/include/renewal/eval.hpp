#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "renewal/core.hpp"
#include "renewal/policy.hpp"

namespace renewal {

enum class MetricKind { Rmse, Auc };

std::string_view to_string(MetricKind kind);
MetricKind metric_for(TaskKind task);

// Mann-Whitney estimate of P(score+ > score-) + 0.5 P(tie). Labels are 0/1
// (or -1/+1); both classes must be present.
double auc(std::span<const double> scores, std::span<const double> labels);

// RMSE: (before - after) / before. AUC: (after - before) / before.
double relative_improvement(double before, double after, MetricKind kind);

struct TrajectoryPoint {
  std::size_t batch_index = 0;
  double value = 0.0;
  RenewalFlag flag = RenewalFlag::Retain;
};

class MetricTrajectory {
 public:
  explicit MetricTrajectory(MetricKind kind) : kind_(kind) {}

  // Throws ValidationError unless batch_index exceeds the previous one.
  void add(std::size_t batch_index, double value, RenewalFlag flag);

  MetricKind kind() const { return kind_; }
  const std::vector<TrajectoryPoint>& points() const { return points_; }

 private:
  MetricKind kind_;
  std::vector<TrajectoryPoint> points_;
};

MetricTrajectory trajectory_from(const std::vector<DecisionRecord>& records, MetricKind kind);

struct ExportOptions {
  // Written first, each prefixed with "# ".
  std::vector<std::string> header_lines;
  // Drops similarity, loss and metric columns.
  bool flags_only = false;
};

// Decision CSV text: '#' config lines, column header, one row per record,
// then '#' summary lines (record count, flag counts, final metric,
// improvement against the first record).
std::string render_metrics_csv(const std::vector<DecisionRecord>& records, const MetricTrajectory& trajectory,
                               const ExportOptions& options = {});

// Writes render_metrics_csv to `path`; throws Error on I/O failure.
void export_metrics(const std::vector<DecisionRecord>& records, const MetricTrajectory& trajectory,
                    const std::filesystem::path& path, const ExportOptions& options = {});

}  // namespace renewal
