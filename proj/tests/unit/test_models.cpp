#include <doctest.h>

#include <cmath>
#include <random>

#include "renewal/loss.hpp"
#include "renewal/models.hpp"

using namespace renewal;

namespace {

Schema one_feature_regression() {
  return Schema({{"x", AttributeKind::Numeric}, {"y", AttributeKind::TargetNumeric}});
}

Schema two_feature_classification() {
  return Schema({{"u", AttributeKind::Numeric}, {"v", AttributeKind::Numeric}, {"c", AttributeKind::TargetBinary}});
}

Batch line_batch(std::size_t n) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    double x = -3.0 + 6.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    rows.push_back({x, 2.0 * x + 1.0});
  }
  return validate_batch(rows, one_feature_regression());
}

Batch noisy_regression(std::uint64_t seed, std::size_t n) {
  Schema s({{"a", AttributeKind::Numeric},
            {"b", AttributeKind::Numeric},
            {"f", AttributeKind::Binary},
            {"y", AttributeKind::TargetNumeric}});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::bernoulli_distribution coin(0.3);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    double a = 10.0 + 5.0 * g(rng), b = g(rng), f = coin(rng) ? 1.0 : 0.0;
    rows.push_back({a, b, f, 0.5 * a - 3.0 * b + 2.0 * f + 4.0 + 0.3 * g(rng)});
  }
  return validate_batch(rows, s);
}

Batch clusters(std::uint64_t seed, std::size_t n, double gap) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.3);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    double c = i % 2 == 0 ? 1.0 : 0.0;
    double shift = c == 1.0 ? gap : -gap;
    rows.push_back({shift + g(rng), 0.5 * shift + g(rng), c});
  }
  return validate_batch(rows, two_feature_classification());
}

}  // namespace

TEST_CASE("ridge regression recovers a noiseless line") {
  RegressionConfig cfg;
  cfg.ridge = 0.0;
  auto m = linreg_fit(line_batch(50), cfg);
  REQUIRE(m->raw_weights().size() == 1);
  CHECK(std::abs(m->raw_weights()[0] - 2.0) < 1e-3);
  CHECK(std::abs(m->raw_bias() - 1.0) < 1e-3);
}

TEST_CASE("large ridge shrinks weights toward zero and the intercept toward the mean") {
  RegressionConfig cfg;
  cfg.ridge = 1e6;
  Batch b = line_batch(50);
  auto m = linreg_fit(b, cfg);
  CHECK(std::abs(m->weights()[0]) < 1e-4);
  double mean = 0.0;
  for (double v : b.targets()) mean += v;
  mean /= static_cast<double>(b.size());
  CHECK(std::abs(m->bias() - mean) < 1e-6);
}

TEST_CASE("constant feature with a constant target fits exactly") {
  auto b = validate_batch({{4.0, 7.0}, {4.0, 7.0}, {4.0, 7.0}}, one_feature_regression());
  auto m = linreg_fit(b, {});
  CHECK(m->loss_on(b) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m->predict(Matrix::from_rows({{4.0}}))[0] == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("regression training errors") {
  auto contradictory = validate_batch({{4.0, 7.0}, {4.0, 8.0}}, one_feature_regression());
  CHECK_THROWS_AS(linreg_fit(contradictory, {}), TrainingError);
  auto single = validate_batch({{1.0, 2.0}}, one_feature_regression());
  CHECK_THROWS_AS(linreg_fit(single, {}), TrainingError);
  CHECK_THROWS_AS(linreg_fit(clusters(1, 10, 1.0), {}), ValidationError);
  RegressionConfig bad;
  bad.ridge = -1.0;
  CHECK_THROWS_AS(linreg_fit(line_batch(5), bad), ValidationError);
}

TEST_CASE("predict examples") {
  auto reg = LinearRegressor::from_parameters(one_feature_regression(), {2.0}, 1.0);
  CHECK(predict(*reg, Matrix::from_rows({{3.0}}))[0] == 7.0);
  auto cls = Perceptron::from_parameters(two_feature_classification(), {1.0, 0.0}, -1.0);
  CHECK(predict(*cls, Matrix::from_rows({{1.0, 0.0}}))[0] == 0.0);
  CHECK_THROWS_AS(predict(*cls, Matrix::from_rows({{1.0}})), ValidationError);
}

TEST_CASE("ridge gradient matches central differences") {
  Batch b = noisy_regression(3, 200);
  Matrix z = Standardizer::fit(b.features()).apply(b.features());
  std::vector<double> y = b.targets();
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> p(z.cols() + 1);
    for (double& v : p) v = g(rng);
    const double lambda = trial % 2 == 0 ? 0.0 : 0.7;
    std::vector<double> grad = ridge::gradient(p, z, y, lambda);
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double h = 1e-5;
      std::vector<double> up = p, down = p;
      up[j] += h;
      down[j] -= h;
      double fd = (ridge::objective(up, z, y, lambda) - ridge::objective(down, z, y, lambda)) / (2 * h);
      CHECK(std::abs(fd - grad[j]) <= 1e-5 * std::max(1.0, std::abs(grad[j])));
    }
  }
}

TEST_CASE("gradient descent never increases the objective") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RegressionConfig cfg;
    cfg.learning_rate = 10.0;  // capped internally
    auto m = linreg_fit(noisy_regression(seed, 300), cfg);
    const auto& h = m->info().history;
    REQUIRE(h.size() == static_cast<std::size_t>(cfg.epochs) + 1);
    for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] <= h[i - 1] + 1e-12 * std::abs(h[i - 1]));
  }
}

TEST_CASE("warm fit on the training batch never increases its loss") {
  RegressionConfig cfg;
  cfg.ridge = 0.0;
  cfg.epochs = 5;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Batch b = noisy_regression(seed, 200);
    PredictorPtr m = linreg_fit(b, cfg);
    double before = m->loss_on(b);
    for (int round = 0; round < 3; ++round) {
      m = m->warm_fit(b);
      double after = m->loss_on(b);
      CHECK(after <= before + 1e-12);
      before = after;
    }
  }
}

TEST_CASE("warm fit keeps the fitted function when restandardizing") {
  Batch first = noisy_regression(1, 200);
  Batch second = noisy_regression(2, 200);
  RegressionConfig cfg;
  cfg.epochs = 1;
  cfg.learning_rate = 1e-12;
  auto m = linreg_fit(first, {});
  auto w = m->warm_fit(second);
  CHECK(w->info().warm_started);
  std::vector<double> a = m->predict(second.features());
  auto nearly_frozen = LinearRegressor(first.schema(), cfg, {}, m->standardizer(), m->weights(), m->bias()).warm_fit(second);
  std::vector<double> b = nearly_frozen->predict(second.features());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-9);
}

TEST_CASE("perceptron separates clustered data") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Batch b = clusters(seed, 200, 2.0);
    PerceptronConfig cfg;
    cfg.seed = seed;
    auto m = perceptron_fit(b, cfg);
    CHECK(perceptron_loss(m->raw_weights(), m->raw_bias(), b.features(), signed_labels(b)) ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(m->loss_on(b) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(m->info().degenerate);
  }
}

TEST_CASE("single-class perceptron is degenerate and predicts that class") {
  auto b = validate_batch({{0.1, 0.2, 1}, {0.5, -0.2, 1}, {2.0, 1.0, 1}}, two_feature_classification());
  auto m = perceptron_fit(b, {});
  CHECK(m->info().degenerate);
  for (double s : m->predict(Matrix::from_rows({{-5, 5}, {0, 0}, {9, -1}}))) CHECK(s > 0.0);
}

TEST_CASE("xor is not separable and training does not throw") {
  auto b = validate_batch({{0, 0, 0}, {1, 1, 0}, {0, 1, 1}, {1, 0, 1}}, two_feature_classification());
  PerceptronConfig cfg;
  cfg.epochs = 200;
  PredictorPtr m;
  CHECK_NOTHROW(m = perceptron_fit(b, cfg));
  CHECK(m->loss_on(b) > 0.0);
}

TEST_CASE("perceptron warm fit never adds training mistakes") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Batch b = clusters(seed, 200, 0.4);
    PerceptronConfig cfg;
    cfg.seed = seed;
    auto m = perceptron_fit(b, cfg);
    auto w = m->warm_fit(b);
    CHECK(w->info().history.back() <= m->info().history.front() + 1e-12);
    auto mistakes = [&](const Predictor& p) {
      std::vector<double> s = p.predict(b.features());
      std::vector<double> y = signed_labels(b);
      std::size_t n = 0;
      for (std::size_t i = 0; i < s.size(); ++i) n += y[i] * s[i] <= 0.0;
      return n;
    };
    CHECK(mistakes(*w) <= mistakes(*m));
  }
}

TEST_CASE("snapshot round-trips bit-exactly") {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> g(0.0, 10.0);
  Batch reg_batch = noisy_regression(9, 100);
  PredictorPtr reg = linreg_fit(reg_batch, {});
  Batch cls_batch = clusters(9, 100, 0.5);
  PredictorPtr cls = perceptron_fit(cls_batch, {});
  for (const auto& [model, width] : {std::pair{reg, 3}, std::pair{cls, 2}}) {
    PredictorPtr back = restore_predictor(model->snapshot(), model->schema());
    CHECK(back->snapshot() == model->snapshot());
    Matrix x(50, static_cast<std::size_t>(width));
    for (std::size_t r = 0; r < x.rows(); ++r)
      for (std::size_t c = 0; c < x.cols(); ++c) x(r, c) = g(rng);
    CHECK(back->predict(x) == model->predict(x));
  }
}

TEST_CASE("restore rejects mismatched schemas and bad blobs") {
  PredictorPtr reg = linreg_fit(line_batch(10), {});
  Schema other({{"z", AttributeKind::Numeric}, {"y", AttributeKind::TargetNumeric}});
  CHECK_THROWS_AS(restore_predictor(reg->snapshot(), other), ValidationError);
  CHECK_THROWS_AS(restore_predictor("not json", one_feature_regression()), ValidationError);
  CHECK_THROWS_AS(restore_predictor("{}", one_feature_regression()), ValidationError);
}

TEST_CASE("standardizer freezes statistics and tolerates constant columns") {
  Matrix x = Matrix::from_rows({{1, 5}, {3, 5}});
  Standardizer s = Standardizer::fit(x);
  CHECK(s.mean == std::vector<double>{2, 5});
  CHECK(s.scale == std::vector<double>{1, 1});
  Matrix z = s.apply(x);
  CHECK(z(0, 0) == -1.0);
  CHECK(z(1, 1) == 0.0);
}
