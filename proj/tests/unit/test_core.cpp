#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "renewal/core.hpp"

using namespace renewal;

namespace {

Schema binary_numeric_target() {
  return Schema({{"flag", AttributeKind::Binary}, {"y", AttributeKind::TargetNumeric}});
}

}  // namespace

TEST_CASE("schema rejects malformed attribute lists") {
  CHECK_THROWS_AS(Schema({{"a", AttributeKind::Numeric}}), ValidationError);
  CHECK_THROWS_AS(Schema({{"a", AttributeKind::Numeric}, {"a", AttributeKind::TargetNumeric}}), ValidationError);
  CHECK_THROWS_AS(Schema({{"a", AttributeKind::Numeric},
                          {"y", AttributeKind::TargetNumeric},
                          {"z", AttributeKind::TargetBinary}}),
                  ValidationError);
  CHECK_THROWS_AS(Schema({{"a", AttributeKind::Numeric, 0.0}, {"y", AttributeKind::TargetNumeric}}),
                  ValidationError);
  CHECK_THROWS_AS(Schema({{"a", AttributeKind::Numeric, 1.5}, {"y", AttributeKind::TargetNumeric}}),
                  ValidationError);
  CHECK_THROWS_AS(Schema({{"", AttributeKind::Numeric}, {"y", AttributeKind::TargetNumeric}}), ValidationError);
}

TEST_CASE("schema exposes target, features and a stable hash") {
  Schema s({{"a", AttributeKind::Numeric},
            {"y", AttributeKind::TargetBinary},
            {"b", AttributeKind::Binary, 0.0}});
  CHECK(s.target_index() == 1);
  CHECK(s.feature_indices() == std::vector<std::size_t>{0, 2});
  CHECK(s.task() == TaskKind::Classification);
  CHECK(s.index_of("b") == 2);
  CHECK_FALSE(s.index_of("missing").has_value());

  Schema same({{"a", AttributeKind::Numeric},
               {"y", AttributeKind::TargetBinary},
               {"b", AttributeKind::Binary, 0.0}});
  Schema other({{"a", AttributeKind::Numeric},
                {"y", AttributeKind::TargetBinary},
                {"b", AttributeKind::Binary, 1.0}});
  CHECK(s.hash() == same.hash());
  CHECK(s.hash() != other.hash());
  CHECK(s.hash().size() == 16);
}

TEST_CASE("attribute and task kinds round-trip through text") {
  for (auto k : {AttributeKind::Binary, AttributeKind::Numeric, AttributeKind::TargetNumeric,
                 AttributeKind::TargetBinary})
    CHECK(parse_attribute_kind(to_string(k)) == k);
  CHECK(parse_task_kind("regression") == TaskKind::Regression);
  CHECK(parse_task_kind("classification") == TaskKind::Classification);
  CHECK_THROWS_AS(parse_attribute_kind("categorical"), ValidationError);
  CHECK_THROWS_AS(parse_task_kind("ranking"), ValidationError);
}

TEST_CASE("validate_batch accepts a well-formed matrix") {
  Batch b = validate_batch({{1, 3.5}, {0, 4.0}}, binary_numeric_target());
  CHECK(b.size() == 2);
  CHECK(b.targets() == std::vector<double>{3.5, 4.0});
  CHECK(b.features().cols() == 1);
  CHECK(b.rows()(1, 0) == 0.0);
}

TEST_CASE("validate_batch rejects invalid input") {
  const Schema s = binary_numeric_target();
  CHECK_THROWS_AS(validate_batch({{0.5, 1.0}}, s), ValidationError);
  CHECK_THROWS_AS(validate_batch(std::vector<std::vector<double>>{}, s), ValidationError);
  CHECK_THROWS_AS(validate_batch({{1, 2, 3}}, s), ValidationError);
  CHECK_THROWS_AS(validate_batch({{1, std::numeric_limits<double>::quiet_NaN()}}, s), ValidationError);
  CHECK_THROWS_AS(validate_batch({{1, std::numeric_limits<double>::infinity()}}, s), ValidationError);
  CHECK_THROWS_AS(validate_batch(Matrix(2, 2, 1.0), s, {2.0, 1.0}), ValidationError);
  CHECK_NOTHROW(validate_batch(Matrix(2, 2, 1.0), s, {1.0, 1.0}));
}

TEST_CASE("validate_batch is total and order preserving on random input") {
  const Schema s = binary_numeric_target();
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(0, 5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::vector<double>> rows(1 + trial % 7);
    for (auto& r : rows) {
      const double candidates[] = {0.0, 1.0, 0.5, -3.0, std::numeric_limits<double>::quiet_NaN(), 2.0};
      r = {candidates[pick(rng)], candidates[pick(rng)]};
    }
    try {
      Batch b = validate_batch(rows, s);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(b.rows()(i, 0) == rows[i][0]);
        CHECK(b.rows()(i, 1) == rows[i][1]);
        CHECK((rows[i][0] == 0.0 || rows[i][0] == 1.0));
      }
    } catch (const ValidationError&) {
    }
  }
}

TEST_CASE("batch concat and tail keep row order") {
  const Schema s = binary_numeric_target();
  Batch a = validate_batch({{1, 1.0}, {0, 2.0}}, s);
  Batch b = validate_batch({{1, 3.0}}, s);
  Batch c = Batch::concat(a, b);
  CHECK(c.targets() == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(c.tail(2).targets() == std::vector<double>{2.0, 3.0});
  CHECK(c.tail(10).size() == 3);
}

TEST_CASE("thresholds validate their ordering") {
  CHECK_NOTHROW(Thresholds{}.validate());
  CHECK_THROWS_AS((Thresholds{0.5, 0.9, 0.3, 10}.validate()), ValidationError);
  CHECK_THROWS_AS((Thresholds{1.0, 0.3, 0.9, 10}.validate()), ValidationError);
  CHECK_THROWS_AS((Thresholds{0.5, 0.0, 0.9, 10}.validate()), ValidationError);
  CHECK_THROWS_AS((Thresholds{0.5, 0.3, 0.9, 0}.validate()), ValidationError);
}

TEST_CASE("flag codes are 0, 1, 2") {
  CHECK(static_cast<int>(RenewalFlag::Retain) == 0);
  CHECK(static_cast<int>(RenewalFlag::Update) == 1);
  CHECK(static_cast<int>(RenewalFlag::Retrain) == 2);
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1e3);
  for (int i = 0; i < 1000; ++i) {
    double v = n(rng);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.625) == "0.625");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("parse errors carry their line") {
  ParseError e("bad value", 7);
  CHECK(e.line() == 7);
  CHECK(std::string(e.what()).find("line 7") != std::string::npos);
}
