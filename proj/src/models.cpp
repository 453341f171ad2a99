#include "renewal/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

#include "renewal/loss.hpp"

namespace renewal {

using json = nlohmann::json;

namespace {

constexpr int kSnapshotVersion = 1;

// Re-expresses (w, b) fitted under `from` so the same affine function holds
// under `to`.
void restandardize(const Standardizer& from, const Standardizer& to, std::vector<double>& w, double& b) {
  for (std::size_t j = 0; j < w.size(); ++j) {
    b += w[j] * (to.mean[j] - from.mean[j]) / from.scale[j];
    w[j] *= to.scale[j] / from.scale[j];
  }
}

double affine(std::span<const double> w, double b, std::span<const double> x) {
  double s = b;
  for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
  return s;
}

void check_feature_width(const Schema& schema, const Matrix& features) {
  if (features.cols() != schema.feature_count())
    throw ValidationError("feature width " + std::to_string(features.cols()) + " does not match model width " +
                          std::to_string(schema.feature_count()));
}

void check_batch_schema(const Schema& schema, const Batch& batch) {
  if (!(batch.schema() == schema)) throw ValidationError("batch schema does not match the model schema");
}

json standardizer_json(const Standardizer& s) { return {{"mean", s.mean}, {"scale", s.scale}}; }

bool all_rows_identical(const Matrix& m) {
  for (std::size_t r = 1; r < m.rows(); ++r)
    if (!std::equal(m.row(r).begin(), m.row(r).end(), m.row(0).begin())) return false;
  return true;
}

std::shared_ptr<const LinearRegressor> run_regression(const Batch& batch, const RegressionConfig& cfg,
                                                      const LinearRegressor* warm) {
  cfg.validate();
  if (batch.schema().task() != TaskKind::Regression)
    throw ValidationError("linear regression needs a numeric target");
  if (batch.size() < 2) throw TrainingError("linear regression needs at least 2 rows");

  Matrix x = batch.features();
  std::vector<double> y = batch.targets();
  if (all_rows_identical(x) && std::any_of(y.begin(), y.end(), [&](double v) { return v != y.front(); }))
    throw TrainingError("degenerate design: every feature row is identical but targets differ");

  Standardizer stats = Standardizer::fit(x);
  Matrix z = stats.apply(x);
  std::size_t k = z.cols();

  std::vector<double> params(k + 1, 0.0);
  TrainingInfo info;
  info.rows = batch.size();
  if (warm != nullptr) {
    std::vector<double> w = warm->weights();
    double b = warm->bias();
    restandardize(warm->standardizer(), stats, w, b);
    std::copy(w.begin(), w.end(), params.begin());
    params[k] = b;
    info.warm_started = true;
  }

  // Centered columns decouple the intercept: its curvature is 2, while the
  // weight block is bounded by 2 * (k + ridge) for unit-variance columns.
  // These caps keep every epoch descending.
  double step = std::min(cfg.learning_rate, 0.9 / std::max(1.0, static_cast<double>(k) + cfg.ridge));
  double bias_step = std::min(cfg.learning_rate, 0.9);
  info.step_size = step;

  info.history.reserve(static_cast<std::size_t>(cfg.epochs) + 1);
  info.history.push_back(ridge::objective(params, z, y, cfg.ridge));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<double> g = ridge::gradient(params, z, y, cfg.ridge);
    for (std::size_t j = 0; j < k; ++j) params[j] -= step * g[j];
    params[k] -= bias_step * g[k];
    info.history.push_back(ridge::objective(params, z, y, cfg.ridge));
  }

  std::vector<double> w(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(k));
  return std::make_shared<const LinearRegressor>(batch.schema(), cfg, std::move(info), std::move(stats), std::move(w),
                                                 params[k]);
}

std::size_t count_mistakes(const Matrix& z, std::span<const double> labels, std::span<const double> w, double b) {
  std::size_t mistakes = 0;
  for (std::size_t i = 0; i < z.rows(); ++i)
    if (labels[i] * affine(w, b, z.row(i)) <= 0.0) ++mistakes;
  return mistakes;
}

std::shared_ptr<const Perceptron> run_perceptron(const Batch& batch, const PerceptronConfig& cfg,
                                                 const Perceptron* warm) {
  cfg.validate();
  if (batch.schema().task() != TaskKind::Classification)
    throw ValidationError("perceptron needs a binary target");
  if (batch.size() < 2) throw TrainingError("perceptron needs at least 2 rows");

  Matrix x = batch.features();
  std::vector<double> labels = signed_labels(batch);
  Standardizer stats = Standardizer::fit(x);
  Matrix z = stats.apply(x);
  std::size_t k = z.cols();

  TrainingInfo info;
  info.rows = batch.size();
  info.step_size = cfg.learning_rate;

  bool single_class = std::all_of(labels.begin(), labels.end(), [&](double v) { return v == labels.front(); });
  if (single_class) {
    info.degenerate = true;
    return std::make_shared<const Perceptron>(batch.schema(), cfg, std::move(info), std::move(stats),
                                              std::vector<double>(k, 0.0), labels.front());
  }

  std::vector<double> w(k, 0.0);
  double b = 0.0;
  if (warm != nullptr) {
    w = warm->weights();
    b = warm->bias();
    restandardize(warm->standardizer(), stats, w, b);
    info.warm_started = true;
  }

  std::vector<double> best_w = w;
  double best_b = b;
  std::size_t best_mistakes = count_mistakes(z, labels, w, b);
  info.history.push_back(static_cast<double>(best_mistakes));

  // Candidates are the running averages of every visited iterate, taken at
  // the end of each pass.
  std::vector<double> sum_w(k, 0.0);
  double sum_b = 0.0;
  double visits = 0.0;

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(z.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 0; epoch < cfg.epochs && best_mistakes > 0; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      auto zi = z.row(i);
      double y = labels[i];
      if (y * affine(w, b, zi) <= 0.0) {
        for (std::size_t j = 0; j < k; ++j) w[j] += cfg.learning_rate * y * zi[j];
        b += cfg.learning_rate * y;
      }
      for (std::size_t j = 0; j < k; ++j) sum_w[j] += w[j];
      sum_b += b;
      visits += 1.0;
    }
    std::vector<double> avg_w(k);
    for (std::size_t j = 0; j < k; ++j) avg_w[j] = sum_w[j] / visits;
    double avg_b = sum_b / visits;
    std::size_t mistakes = count_mistakes(z, labels, avg_w, avg_b);
    info.history.push_back(static_cast<double>(mistakes));
    if (mistakes <= best_mistakes) {
      best_mistakes = mistakes;
      best_w = std::move(avg_w);
      best_b = avg_b;
    }
  }
  return std::make_shared<const Perceptron>(batch.schema(), cfg, std::move(info), std::move(stats),
                                            std::move(best_w), best_b);
}

const json& require(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ValidationError(std::string("snapshot is missing '") + key + "'");
  return doc.at(key);
}

}  // namespace

void RegressionConfig::validate() const {
  if (!(ridge >= 0.0)) throw ValidationError("ridge weight must be >= 0");
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be > 0");
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
}

void PerceptronConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be > 0");
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
}

Standardizer Standardizer::fit(const Matrix& features) {
  std::size_t k = features.cols();
  Standardizer s{std::vector<double>(k, 0.0), std::vector<double>(k, 1.0)};
  double n = static_cast<double>(features.rows());
  if (features.rows() == 0) return s;
  for (std::size_t j = 0; j < k; ++j) {
    double sum = 0.0;
    for (std::size_t r = 0; r < features.rows(); ++r) sum += features(r, j);
    double mean = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < features.rows(); ++r) {
      double d = features(r, j) - mean;
      ss += d * d;
    }
    double sd = std::sqrt(ss / n);
    s.mean[j] = mean;
    s.scale[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Standardizer Standardizer::identity(std::size_t width) {
  return {std::vector<double>(width, 0.0), std::vector<double>(width, 1.0)};
}

Matrix Standardizer::apply(const Matrix& features) const {
  if (features.cols() != mean.size()) throw ValidationError("standardizer width mismatch");
  Matrix out(features.rows(), features.cols());
  for (std::size_t r = 0; r < features.rows(); ++r)
    for (std::size_t j = 0; j < features.cols(); ++j) out(r, j) = (features(r, j) - mean[j]) / scale[j];
  return out;
}

LinearModel::LinearModel(Schema schema, TrainingInfo info, Standardizer standardizer, std::vector<double> weights,
                         double bias)
    : Predictor(std::move(schema), std::move(info)),
      standardizer_(std::move(standardizer)),
      weights_(std::move(weights)),
      bias_(bias) {
  std::size_t k = this->schema().feature_count();
  if (weights_.size() != k || standardizer_.mean.size() != k || standardizer_.scale.size() != k)
    throw ValidationError("model parameter width does not match schema feature count");
}

std::vector<double> LinearModel::raw_weights() const {
  std::vector<double> w(weights_.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = weights_[j] / standardizer_.scale[j];
  return w;
}

double LinearModel::raw_bias() const {
  double b = bias_;
  for (std::size_t j = 0; j < weights_.size(); ++j) b -= weights_[j] * standardizer_.mean[j] / standardizer_.scale[j];
  return b;
}

std::vector<double> LinearModel::predict(const Matrix& features) const {
  check_feature_width(schema(), features);
  std::vector<double> out(features.rows());
  for (std::size_t r = 0; r < features.rows(); ++r) {
    auto x = features.row(r);
    double s = bias_;
    for (std::size_t j = 0; j < weights_.size(); ++j)
      s += weights_[j] * (x[j] - standardizer_.mean[j]) / standardizer_.scale[j];
    out[r] = s;
  }
  return out;
}

LinearRegressor::LinearRegressor(Schema schema, RegressionConfig cfg, TrainingInfo info, Standardizer standardizer,
                                 std::vector<double> weights, double bias)
    : LinearModel(std::move(schema), std::move(info), std::move(standardizer), std::move(weights), bias),
      cfg_(cfg) {}

std::shared_ptr<const LinearRegressor> LinearRegressor::from_parameters(const Schema& schema,
                                                                        std::vector<double> weights, double bias,
                                                                        RegressionConfig cfg) {
  if (schema.task() != TaskKind::Regression) throw ValidationError("linear regression needs a numeric target");
  return std::make_shared<const LinearRegressor>(schema, cfg, TrainingInfo{}, Standardizer::identity(weights.size()),
                                                 std::move(weights), bias);
}

double LinearRegressor::loss_on(const Batch& batch) const {
  check_batch_schema(schema(), batch);
  std::vector<double> pred = predict(batch.features());
  std::vector<double> y = batch.targets();
  return rmse(pred, y);
}

PredictorPtr LinearRegressor::fit(const Batch& batch) const { return run_regression(batch, cfg_, nullptr); }

PredictorPtr LinearRegressor::warm_fit(const Batch& batch) const {
  check_batch_schema(schema(), batch);
  return run_regression(batch, cfg_, this);
}

std::string LinearRegressor::snapshot() const {
  json doc = {
      {"format", "renewal-predictor"},
      {"version", kSnapshotVersion},
      {"task", "regression"},
      {"schema_hash", schema().hash()},
      {"standardization", standardizer_json(standardizer_)},
      {"parameters", {{"weights", weights_}, {"bias", bias_}}},
      {"config",
       {{"ridge", cfg_.ridge}, {"learning_rate", cfg_.learning_rate}, {"epochs", cfg_.epochs}, {"seed", cfg_.seed}}},
      {"training", {{"rows", info().rows}, {"warm_started", info().warm_started}}},
  };
  return doc.dump();
}

Perceptron::Perceptron(Schema schema, PerceptronConfig cfg, TrainingInfo info, Standardizer standardizer,
                       std::vector<double> weights, double bias)
    : LinearModel(std::move(schema), std::move(info), std::move(standardizer), std::move(weights), bias), cfg_(cfg) {}

std::shared_ptr<const Perceptron> Perceptron::from_parameters(const Schema& schema, std::vector<double> weights,
                                                              double bias, PerceptronConfig cfg) {
  if (schema.task() != TaskKind::Classification) throw ValidationError("perceptron needs a binary target");
  return std::make_shared<const Perceptron>(schema, cfg, TrainingInfo{}, Standardizer::identity(weights.size()),
                                            std::move(weights), bias);
}

double Perceptron::loss_on(const Batch& batch) const {
  check_batch_schema(schema(), batch);
  std::vector<double> labels = signed_labels(batch);
  return perceptron_loss(raw_weights(), raw_bias(), batch.features(), labels) / static_cast<double>(batch.size());
}

PredictorPtr Perceptron::fit(const Batch& batch) const { return run_perceptron(batch, cfg_, nullptr); }

PredictorPtr Perceptron::warm_fit(const Batch& batch) const {
  check_batch_schema(schema(), batch);
  return run_perceptron(batch, cfg_, this);
}

std::string Perceptron::snapshot() const {
  json doc = {
      {"format", "renewal-predictor"},
      {"version", kSnapshotVersion},
      {"task", "classification"},
      {"schema_hash", schema().hash()},
      {"standardization", standardizer_json(standardizer_)},
      {"parameters", {{"weights", weights_}, {"bias", bias_}}},
      {"config", {{"learning_rate", cfg_.learning_rate}, {"epochs", cfg_.epochs}, {"seed", cfg_.seed}}},
      {"training",
       {{"rows", info().rows}, {"warm_started", info().warm_started}, {"degenerate", info().degenerate}}},
  };
  return doc.dump();
}

std::shared_ptr<const LinearRegressor> linreg_fit(const Batch& batch, const RegressionConfig& cfg) {
  return run_regression(batch, cfg, nullptr);
}

std::shared_ptr<const Perceptron> perceptron_fit(const Batch& batch, const PerceptronConfig& cfg) {
  return run_perceptron(batch, cfg, nullptr);
}

std::vector<double> predict(const Predictor& model, const Matrix& features) { return model.predict(features); }

PredictorPtr restore_predictor(const std::string& blob, const Schema& schema) {
  json doc;
  try {
    doc = json::parse(blob);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("snapshot is not valid JSON: ") + e.what());
  }
  try {
    if (require(doc, "format").get<std::string>() != "renewal-predictor")
      throw ValidationError("snapshot has an unknown format tag");
    if (require(doc, "version").get<int>() != kSnapshotVersion)
      throw ValidationError("unsupported snapshot version");
    if (require(doc, "schema_hash").get<std::string>() != schema.hash())
      throw ValidationError("snapshot schema hash does not match the stream schema");
    TaskKind task = parse_task_kind(require(doc, "task").get<std::string>());
    if (task != schema.task()) throw ValidationError("snapshot task does not match the schema target");

    const json& st = require(doc, "standardization");
    Standardizer stats{st.at("mean").get<std::vector<double>>(), st.at("scale").get<std::vector<double>>()};
    const json& params = require(doc, "parameters");
    auto w = params.at("weights").get<std::vector<double>>();
    double b = params.at("bias").get<double>();
    const json& cfg = require(doc, "config");
    const json& tr = require(doc, "training");
    TrainingInfo info;
    info.rows = tr.at("rows").get<std::size_t>();
    info.warm_started = tr.at("warm_started").get<bool>();

    if (task == TaskKind::Regression) {
      RegressionConfig rc{cfg.at("ridge").get<double>(), cfg.at("learning_rate").get<double>(),
                          cfg.at("epochs").get<int>(), cfg.at("seed").get<std::uint64_t>()};
      return std::make_shared<const LinearRegressor>(schema, rc, std::move(info), std::move(stats), std::move(w), b);
    }
    info.degenerate = tr.at("degenerate").get<bool>();
    PerceptronConfig pc{cfg.at("learning_rate").get<double>(), cfg.at("epochs").get<int>(),
                        cfg.at("seed").get<std::uint64_t>()};
    return std::make_shared<const Perceptron>(schema, pc, std::move(info), std::move(stats), std::move(w), b);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed snapshot: ") + e.what());
  }
}

PredictorPtr fit_default(const Batch& batch, const RegressionConfig& reg, const PerceptronConfig& cls) {
  if (batch.schema().task() == TaskKind::Regression) return linreg_fit(batch, reg);
  return perceptron_fit(batch, cls);
}

std::vector<double> signed_labels(const Batch& batch) {
  if (batch.schema().task() != TaskKind::Classification) throw ValidationError("batch has no binary target");
  std::vector<double> y = batch.targets();
  for (double& v : y) v = v == 1.0 ? 1.0 : -1.0;
  return y;
}

namespace ridge {

double objective(std::span<const double> params, const Matrix& z, std::span<const double> y, double lambda) {
  std::size_t k = z.cols();
  if (params.size() != k + 1 || y.size() != z.rows()) throw ValidationError("ridge objective: dimension mismatch");
  std::span<const double> w = params.first(k);
  double b = params[k];
  double sse = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    double r = y[i] - affine(w, b, z.row(i));
    sse += r * r;
  }
  double norm = 0.0;
  for (double v : w) norm += v * v;
  return sse / static_cast<double>(z.rows()) + lambda * norm;
}

std::vector<double> gradient(std::span<const double> params, const Matrix& z, std::span<const double> y,
                             double lambda) {
  std::size_t k = z.cols();
  if (params.size() != k + 1 || y.size() != z.rows()) throw ValidationError("ridge gradient: dimension mismatch");
  std::span<const double> w = params.first(k);
  double b = params[k];
  std::vector<double> g(k + 1, 0.0);
  double scale = -2.0 / static_cast<double>(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    auto zi = z.row(i);
    double r = y[i] - affine(w, b, zi);
    for (std::size_t j = 0; j < k; ++j) g[j] += scale * r * zi[j];
    g[k] += scale * r;
  }
  for (std::size_t j = 0; j < k; ++j) g[j] += 2.0 * lambda * w[j];
  return g;
}

}  // namespace ridge

}  // namespace renewal
