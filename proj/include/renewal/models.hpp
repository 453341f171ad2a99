#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "renewal/core.hpp"

namespace renewal {

struct RegressionConfig {
  double ridge = 1e-4;  // lambda on the squared weight norm
  double learning_rate = 0.1;
  int epochs = 500;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PerceptronConfig {
  double learning_rate = 1.0;
  int epochs = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

// Per-feature z-scoring frozen at fit time. Zero-variance features keep
// scale 1 so they center to 0.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& features);
  static Standardizer identity(std::size_t width);
  Matrix apply(const Matrix& features) const;
};

struct TrainingInfo {
  std::size_t rows = 0;
  bool warm_started = false;
  bool degenerate = false;  // single-class classification batch
  double step_size = 0.0;
  // Objective value before the first epoch and after each epoch
  // (regression), or training mistakes per pass (perceptron).
  std::vector<double> history;
};

class Predictor;
using PredictorPtr = std::shared_ptr<const Predictor>;

// A fitted model. Instances are immutable; fit/warm_fit return new ones.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual TaskKind task() const = 0;
  virtual std::vector<double> predict(const Matrix& features) const = 0;
  // RMSE for regression; mean perceptron criterion for classification.
  virtual double loss_on(const Batch& batch) const = 0;
  // Fresh fit on `batch` using this model's configuration.
  virtual PredictorPtr fit(const Batch& batch) const = 0;
  // Continues training from the current parameters.
  virtual PredictorPtr warm_fit(const Batch& batch) const = 0;
  virtual std::string snapshot() const = 0;

  const Schema& schema() const { return schema_; }
  const TrainingInfo& info() const { return info_; }

 protected:
  Predictor(Schema schema, TrainingInfo info) : schema_(std::move(schema)), info_(std::move(info)) {}

 private:
  Schema schema_;
  TrainingInfo info_;
};

// Shared state of the two linear predictors: weights live in standardized
// feature space.
class LinearModel : public Predictor {
 public:
  const Standardizer& standardizer() const { return standardizer_; }
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }

  // Weights and intercept expressed on raw (unstandardized) features.
  std::vector<double> raw_weights() const;
  double raw_bias() const;

  std::vector<double> predict(const Matrix& features) const override;

 protected:
  LinearModel(Schema schema, TrainingInfo info, Standardizer standardizer, std::vector<double> weights,
              double bias);

  Standardizer standardizer_;
  std::vector<double> weights_;
  double bias_;
};

class LinearRegressor final : public LinearModel {
 public:
  LinearRegressor(Schema schema, RegressionConfig cfg, TrainingInfo info, Standardizer standardizer,
                  std::vector<double> weights, double bias);

  // Model with raw-space coefficients and no standardization.
  static std::shared_ptr<const LinearRegressor> from_parameters(const Schema& schema, std::vector<double> weights,
                                                                double bias, RegressionConfig cfg = {});

  TaskKind task() const override { return TaskKind::Regression; }
  double loss_on(const Batch& batch) const override;
  PredictorPtr fit(const Batch& batch) const override;
  PredictorPtr warm_fit(const Batch& batch) const override;
  std::string snapshot() const override;

  const RegressionConfig& config() const { return cfg_; }

 private:
  RegressionConfig cfg_;
};

class Perceptron final : public LinearModel {
 public:
  Perceptron(Schema schema, PerceptronConfig cfg, TrainingInfo info, Standardizer standardizer,
             std::vector<double> weights, double bias);

  static std::shared_ptr<const Perceptron> from_parameters(const Schema& schema, std::vector<double> weights,
                                                           double bias, PerceptronConfig cfg = {});

  TaskKind task() const override { return TaskKind::Classification; }
  double loss_on(const Batch& batch) const override;
  PredictorPtr fit(const Batch& batch) const override;
  PredictorPtr warm_fit(const Batch& batch) const override;
  std::string snapshot() const override;

  const PerceptronConfig& config() const { return cfg_; }

 private:
  PerceptronConfig cfg_;
};

// Ridge regression by full-batch gradient descent on
//   (1/N) sum (y - w.z - b)^2 + ridge * |w|^2
// over standardized features z. Throws TrainingError when every feature row
// is identical but targets disagree.
std::shared_ptr<const LinearRegressor> linreg_fit(const Batch& batch, const RegressionConfig& cfg);

// Perceptron: passes over a seeded shuffle, updating w += lr*y*z,
// b += lr*y on every y*(w.z + b) <= 0. After each pass the running average
// of all iterates is a candidate; the candidate (or warm start) with the
// fewest training mistakes is kept. Target 0/1 is mapped to -1/+1.
std::shared_ptr<const Perceptron> perceptron_fit(const Batch& batch, const PerceptronConfig& cfg);

std::vector<double> predict(const Predictor& model, const Matrix& features);

// Rebuilds a predictor from snapshot(); rejects blobs whose schema hash or
// task does not match `schema`.
PredictorPtr restore_predictor(const std::string& blob, const Schema& schema);

// Fresh model of the kind implied by the schema's target.
PredictorPtr fit_default(const Batch& batch, const RegressionConfig& reg = {}, const PerceptronConfig& cls = {});

// Labels of a binary target column mapped to -1/+1.
std::vector<double> signed_labels(const Batch& batch);

namespace ridge {

// params = [w_1..w_k, b] over standardized features.
double objective(std::span<const double> params, const Matrix& z, std::span<const double> y, double lambda);
std::vector<double> gradient(std::span<const double> params, const Matrix& z, std::span<const double> y,
                             double lambda);

}  // namespace ridge

}  // namespace renewal
