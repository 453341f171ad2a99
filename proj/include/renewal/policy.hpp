#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "renewal/core.hpp"
#include "renewal/loss.hpp"
#include "renewal/models.hpp"
#include "renewal/similarity.hpp"

namespace renewal {

struct Decision {
  RenewalFlag flag = RenewalFlag::Retain;
  SimilarityReport similarity;
  std::optional<LossPair> loss;  // absent when similarity alone decided
};

// Loss-change branch of the rule, used once similarity is below z:
// lc > y retrains, x < lc <= y updates, lc <= x retains.
RenewalFlag flag_for_loss_change(double lc, const Thresholds& t);

// Full rule on precomputed values. `lc` is ignored when p >= z.
RenewalFlag flag_for(double p, std::optional<double> lc, const Thresholds& t);

// Compares `next` against `prev`. Loss is evaluated only when the aggregate
// similarity falls below z: lm is the frozen model's loss on `prev`, ln its
// loss on `next`.
Decision decide(const Batch& prev, const Batch& next, const Predictor& model, const Thresholds& t);

// Retain returns `model` itself; Update warm-fits on prev followed by next;
// Retrain fits a fresh model on next alone. Training failures are rethrown
// as TrainingError carrying `flag`.
PredictorPtr apply(RenewalFlag flag, const PredictorPtr& model, const Batch& prev, const Batch& next);

struct DecisionRecord {
  std::size_t batch_index = 0;  // 1-based
  std::size_t rows = 0;         // rows streamed so far, including this batch
  double similarity = 0.0;
  std::optional<LossPair> loss;
  RenewalFlag flag = RenewalFlag::Retain;
  // RMSE (regression) or AUC (classification) of the post-decision model on
  // the decided batch; NaN when AUC is undefined for a single-class batch.
  double post_metric = 0.0;
};

inline constexpr const char* kDecisionCsvHeader = "batch_index,rows,similarity,lm,ln,lc,flag,post_metric";

// Missing loss fields are written as empty cells; the flag is its numeric code.
std::string to_csv_row(const DecisionRecord& record);

// Metric used for post_metric: RMSE or AUC depending on the model's task.
double post_decision_metric(const Predictor& model, const Batch& batch);

// Gated decision loop. Incoming rows accumulate until at least L are
// pending; then the pending rows are decided against the reference batch,
// the flag is applied, and the decided rows become the new reference.
class Pipeline {
 public:
  Pipeline(Batch reference, PredictorPtr model, Thresholds thresholds);

  std::optional<DecisionRecord> step(const Batch& incoming);

  const Batch& reference() const { return reference_; }
  const PredictorPtr& model() const { return model_; }
  const Thresholds& thresholds() const { return thresholds_; }
  std::size_t pending_rows() const { return pending_.rows(); }
  std::size_t rows_seen() const { return rows_seen_; }
  const std::vector<DecisionRecord>& history() const { return history_; }

 private:
  Batch reference_;
  PredictorPtr model_;
  Thresholds thresholds_;
  Matrix pending_;
  std::size_t rows_seen_ = 0;
  std::vector<DecisionRecord> history_;
};

}  // namespace renewal
