#include "renewal/policy.hpp"

#include <cmath>
#include <limits>

#include "renewal/eval.hpp"

namespace renewal {

RenewalFlag flag_for_loss_change(double lc, const Thresholds& t) {
  if (lc > t.lc_high) return RenewalFlag::Retrain;
  if (lc > t.lc_low) return RenewalFlag::Update;
  return RenewalFlag::Retain;
}

RenewalFlag flag_for(double p, std::optional<double> lc, const Thresholds& t) {
  if (p >= t.similarity) return RenewalFlag::Retain;
  if (!lc) throw ValidationError("loss change rate required when similarity is below threshold");
  return flag_for_loss_change(*lc, t);
}

Decision decide(const Batch& prev, const Batch& next, const Predictor& model, const Thresholds& t) {
  t.validate();
  Decision d;
  d.similarity = batch_similarity(prev, next);
  if (d.similarity.aggregate >= t.similarity) return d;
  d.loss = make_loss_pair(model.loss_on(prev), model.loss_on(next));
  d.flag = flag_for_loss_change(d.loss->lc, t);
  return d;
}

PredictorPtr apply(RenewalFlag flag, const PredictorPtr& model, const Batch& prev, const Batch& next) {
  if (!model) throw ValidationError("apply needs a model");
  try {
    switch (flag) {
      case RenewalFlag::Retain: return model;
      case RenewalFlag::Update: return model->warm_fit(Batch::concat(prev, next));
      case RenewalFlag::Retrain: return model->fit(next);
    }
  } catch (const TrainingError& e) {
    throw TrainingError(std::string(to_string(flag)) + ": " + e.what(), flag);
  }
  throw ValidationError("unknown renewal flag");
}

std::string to_csv_row(const DecisionRecord& r) {
  std::string row = std::to_string(r.batch_index) + "," + std::to_string(r.rows) + "," + format_double(r.similarity);
  if (r.loss) {
    row += "," + format_double(r.loss->lm) + "," + format_double(r.loss->ln) + "," + format_double(r.loss->lc);
  } else {
    row += ",,,";
  }
  row += "," + std::to_string(static_cast<int>(r.flag)) + "," + format_double(r.post_metric);
  return row;
}

double post_decision_metric(const Predictor& model, const Batch& batch) {
  if (model.task() == TaskKind::Regression) return model.loss_on(batch);
  std::vector<double> labels = batch.targets();
  bool has_pos = false, has_neg = false;
  for (double v : labels) (v == 1.0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) return std::numeric_limits<double>::quiet_NaN();
  return auc(model.predict(batch.features()), labels);
}

Pipeline::Pipeline(Batch reference, PredictorPtr model, Thresholds thresholds)
    : reference_(std::move(reference)), model_(std::move(model)), thresholds_(thresholds) {
  thresholds_.validate();
  if (!model_) throw ValidationError("pipeline needs an initial model");
  if (!(model_->schema() == reference_.schema()))
    throw ValidationError("model schema does not match the reference batch schema");
}

std::optional<DecisionRecord> Pipeline::step(const Batch& incoming) {
  if (!(incoming.schema() == reference_.schema()))
    throw ValidationError("incoming rows do not match the pipeline schema");
  pending_.append_rows(incoming.rows());
  rows_seen_ += incoming.size();
  if (pending_.rows() < thresholds_.min_rows) return std::nullopt;

  Batch next = validate_batch(std::move(pending_), reference_.schema());
  pending_ = Matrix();

  Decision d = decide(reference_, next, *model_, thresholds_);
  model_ = apply(d.flag, model_, reference_, next);

  DecisionRecord record;
  record.batch_index = history_.size() + 1;
  record.rows = rows_seen_;
  record.similarity = d.similarity.aggregate;
  record.loss = d.loss;
  record.flag = d.flag;
  record.post_metric = post_decision_metric(*model_, next);
  history_.push_back(record);

  reference_ = std::move(next);
  return record;
}

}  // namespace renewal
