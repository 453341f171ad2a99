#include <doctest.h>

#include <atomic>
#include <cmath>
#include <limits>
#include <random>

#include "renewal/policy.hpp"
#include "renewal/simgen.hpp"

using namespace renewal;

namespace {

// Forwards to a wrapped predictor and counts loss evaluations.
class CountingPredictor final : public Predictor {
 public:
  explicit CountingPredictor(PredictorPtr inner) : Predictor(inner->schema(), inner->info()), inner_(std::move(inner)) {}

  TaskKind task() const override { return inner_->task(); }
  std::vector<double> predict(const Matrix& f) const override { return inner_->predict(f); }
  double loss_on(const Batch& b) const override {
    ++calls;
    return inner_->loss_on(b);
  }
  PredictorPtr fit(const Batch& b) const override { return inner_->fit(b); }
  PredictorPtr warm_fit(const Batch& b) const override { return inner_->warm_fit(b); }
  std::string snapshot() const override { return inner_->snapshot(); }

  mutable std::atomic<int> calls{0};

 private:
  PredictorPtr inner_;
};

Batch stream(TaskKind task, std::size_t rows, const std::string& drift, std::uint64_t seed) {
  return generate(StreamSpec::make_default(task, rows, drift, seed));
}

Batch rows_of(const Batch& b, std::size_t first, std::size_t count) {
  return validate_batch(b.rows().slice(first, count), b.schema());
}

const Thresholds kDefault{};

}  // namespace

TEST_CASE("decision rule examples") {
  CHECK(flag_for(0.8, std::nullopt, kDefault) == RenewalFlag::Retain);
  CHECK(flag_for(0.2, 1.2, kDefault) == RenewalFlag::Retrain);
  CHECK(flag_for(0.2, 0.5, kDefault) == RenewalFlag::Update);
  CHECK(flag_for(0.2, 0.1, kDefault) == RenewalFlag::Retain);
  CHECK(flag_for(0.2, std::numeric_limits<double>::infinity(), kDefault) == RenewalFlag::Retrain);
  CHECK_THROWS_AS(flag_for(0.2, std::nullopt, kDefault), ValidationError);
}

TEST_CASE("decision table over boundary neighbourhoods") {
  const double eps = 1e-9;
  const double z = kDefault.similarity, x = kDefault.lc_low, y = kDefault.lc_high;
  for (double p : {z - eps, z, z + eps}) {
    for (double lc : {x - eps, x, x + eps, y - eps, y, y + eps}) {
      RenewalFlag f = flag_for(p, lc, kDefault);
      if (p >= z) {
        CHECK(f == RenewalFlag::Retain);
      } else if (lc > y) {
        CHECK(f == RenewalFlag::Retrain);
      } else if (lc > x) {
        CHECK(f == RenewalFlag::Update);
      } else {
        CHECK(f == RenewalFlag::Retain);
      }
    }
  }
  CHECK(flag_for(z, 5.0, kDefault) == RenewalFlag::Retain);
  CHECK(flag_for(z - eps, y, kDefault) == RenewalFlag::Update);
  CHECK(flag_for(z - eps, x, kDefault) == RenewalFlag::Retain);
}

TEST_CASE("decide skips loss evaluation when similarity clears the threshold") {
  Batch s = stream(TaskKind::Regression, 2000, "none", 3);
  Batch prev = rows_of(s, 0, 1000), next = rows_of(s, 1000, 1000);
  auto probe = std::make_shared<CountingPredictor>(fit_default(prev));

  Decision d = decide(prev, next, *probe, kDefault);
  REQUIRE(d.similarity.aggregate >= kDefault.similarity);
  CHECK(d.flag == RenewalFlag::Retain);
  CHECK_FALSE(d.loss.has_value());
  CHECK(probe->calls == 0);

  Thresholds strict{0.999, 0.3, 0.9, 1000};
  Decision e = decide(prev, next, *probe, strict);
  CHECK(e.loss.has_value());
  CHECK(probe->calls == 2);
}

TEST_CASE("decide measures the frozen model on both batches") {
  Batch s = stream(TaskKind::Regression, 2000, "abrupt:1000", 5);
  Batch prev = rows_of(s, 0, 1000), next = rows_of(s, 1000, 1000);
  PredictorPtr m = fit_default(prev);
  Decision d = decide(prev, next, *m, kDefault);
  REQUIRE(d.loss.has_value());
  CHECK(d.loss->lm == m->loss_on(prev));
  CHECK(d.loss->ln == m->loss_on(next));
  CHECK(d.flag == RenewalFlag::Retrain);
}

TEST_CASE("apply honours each flag") {
  Batch s = stream(TaskKind::Regression, 3000, "abrupt:1000", 8);
  Batch prev = rows_of(s, 0, 1000), next = rows_of(s, 1000, 1000), holdout = rows_of(s, 2000, 1000);
  PredictorPtr m = fit_default(prev);

  PredictorPtr kept = m;
  for (int i = 0; i < 5; ++i) kept = apply(RenewalFlag::Retain, kept, prev, next);
  CHECK(kept.get() == m.get());
  CHECK(kept->snapshot() == m->snapshot());

  PredictorPtr updated = apply(RenewalFlag::Update, m, prev, next);
  CHECK(updated->info().rows == prev.size() + next.size());
  CHECK(updated->info().warm_started);

  PredictorPtr retrained = apply(RenewalFlag::Retrain, m, prev, next);
  CHECK(retrained->info().rows == next.size());
  CHECK_FALSE(retrained->info().warm_started);
  CHECK(retrained->loss_on(holdout) < m->loss_on(holdout));
}

TEST_CASE("apply tags training failures with the flag") {
  Schema sc({{"x", AttributeKind::Numeric}, {"y", AttributeKind::TargetNumeric}});
  Batch good = validate_batch({{1, 1}, {2, 2}, {3, 3}}, sc);
  Batch bad = validate_batch({{1, 1}, {1, 2}}, sc);
  PredictorPtr m = fit_default(good);
  try {
    apply(RenewalFlag::Retrain, m, good, bad);
    FAIL("expected a training error");
  } catch (const TrainingError& e) {
    REQUIRE(e.flag().has_value());
    CHECK(*e.flag() == RenewalFlag::Retrain);
  }
}

TEST_CASE("pipeline gates decisions at multiples of L") {
  Batch s = stream(TaskKind::Regression, 4000, "none", 2);
  Thresholds t{0.5, 0.3, 0.9, 1000};
  Batch initial = rows_of(s, 0, 1000);
  Pipeline p(initial, fit_default(initial), t);
  std::vector<std::size_t> fired_at;
  for (std::size_t r = 1000; r < 4000; ++r) {
    PredictorPtr before = p.model();
    auto rec = p.step(rows_of(s, r, 1));
    if (rec) {
      fired_at.push_back(p.rows_seen());
      CHECK(rec->rows == p.rows_seen());
    } else {
      CHECK(p.model().get() == before.get());
      CHECK(p.pending_rows() < t.min_rows);
    }
  }
  CHECK(fired_at == std::vector<std::size_t>{1000, 2000, 3000});
  CHECK(p.history().size() == 3);
  CHECK(p.history()[2].batch_index == 3);
}

TEST_CASE("decision fires when the 10000th row arrives") {
  Batch s = stream(TaskKind::Regression, 20000, "none", 6);
  Batch initial = rows_of(s, 0, 10000);
  Pipeline p(initial, fit_default(initial), Thresholds{});
  CHECK_FALSE(p.step(rows_of(s, 10000, 500)).has_value());
  CHECK(p.pending_rows() == 500);
  CHECK_FALSE(p.step(rows_of(s, 10500, 9499)).has_value());
  CHECK(p.pending_rows() == 9999);
  auto rec = p.step(rows_of(s, 19999, 1));
  REQUIRE(rec.has_value());
  CHECK(rec->rows == 10000);
  CHECK(p.pending_rows() == 0);
  CHECK(p.reference().size() == 10000);
}

TEST_CASE("thirty batches give thirty records and the reference rolls over") {
  const std::size_t L = 1000;
  Batch s = stream(TaskKind::Regression, 31 * L, "none", 4);
  Batch initial = rows_of(s, 0, L);
  Pipeline p(initial, fit_default(initial), Thresholds{0.5, 0.3, 0.9, L});
  for (std::size_t b = 1; b <= 30; ++b) {
    Batch chunk = rows_of(s, b * L, L);
    auto rec = p.step(chunk);
    REQUIRE(rec.has_value());
    CHECK(p.reference().rows() == chunk.rows());
  }
  CHECK(p.history().size() == 30);
}

TEST_CASE("decision csv rows") {
  DecisionRecord r;
  r.batch_index = 1;
  r.rows = 100000;
  r.similarity = 0.34;
  r.loss = make_loss_pair(0.5, 0.75);
  r.flag = RenewalFlag::Update;
  r.post_metric = 30.17;
  CHECK(to_csv_row(r) == "1,100000,0.34,0.5,0.75,0.5,1,30.17");
  r.loss.reset();
  r.flag = RenewalFlag::Retain;
  CHECK(to_csv_row(r) == "1,100000,0.34,,,,0,30.17");
}

TEST_CASE("post metric is nan for a single-class batch") {
  Schema sc({{"x", AttributeKind::Numeric}, {"c", AttributeKind::TargetBinary}});
  Batch mixed = validate_batch({{-1, 0}, {1, 1}, {-2, 0}, {2, 1}}, sc);
  Batch ones = validate_batch({{1, 1}, {2, 1}}, sc);
  PredictorPtr m = fit_default(mixed);
  CHECK(post_decision_metric(*m, mixed) == 1.0);
  CHECK(std::isnan(post_decision_metric(*m, ones)));
}
