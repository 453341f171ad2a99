#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "renewal/core.hpp"

namespace renewal {

// Parameters of the data-generating process at one instant.
//
// Numeric feature j at absolute row t:
//   level[j] + amplitude[j] * sin(2 pi t / period_j + phase[j]) + N(0, feature_noise^2)
//   (+ the class mean of the row's label for classification streams)
// Binary feature k: Bernoulli(binary_rate[k]).
// Regression target: weights . features + intercept + N(0, noise^2).
// Classification target: Bernoulli(positive_rate).
struct Law {
  std::vector<double> level;
  std::vector<double> amplitude;
  std::vector<double> phase;
  std::vector<double> binary_rate;
  std::vector<double> weights;  // numeric features then binary features
  double intercept = 0.0;
  double noise = 0.0;
  std::vector<double> class_mean_negative;
  std::vector<double> class_mean_positive;
  double positive_rate = 0.5;

  // Elementwise (1 - t) * a + t * b.
  static Law lerp(const Law& a, const Law& b, double t);
  bool operator==(const Law&) const = default;
};

struct DriftSpec {
  enum class Kind { None, Abrupt, Gradual };
  Kind kind = Kind::None;
  std::size_t at_row = 0;     // Abrupt: first row drawn from the post-law
  std::size_t start_row = 0;  // Gradual: interpolation runs over [start_row, end_row)
  std::size_t end_row = 0;
  Law pre;
  Law post;

  // "none", "abrupt:ROW" or "gradual:START:END"; laws are left untouched.
  static DriftSpec parse(std::string_view text);
  std::string describe() const;
};

struct StreamSpec {
  TaskKind task = TaskKind::Regression;
  std::size_t numeric_features = 4;
  std::size_t binary_features = 1;
  std::vector<std::size_t> periods;  // one per numeric feature, in rows
  double feature_noise = 0.1;
  std::size_t total_rows = 1;
  DriftSpec drift;
  std::uint64_t seed = 0;

  // x0.., b0.., then target "y".
  Schema schema() const;
  void validate() const;

  // Sinusoidal regimes whose post-law shifts every phase by pi/2, flips
  // binary rates, rotates the regression weights to an orthogonal vector and
  // moves the class signal to another feature.
  static StreamSpec make_default(TaskKind task, std::size_t total_rows, const std::string& drift, std::uint64_t seed);
};

nlohmann::json to_json(const StreamSpec& spec);
// Keys missing from `doc` keep the values already in `base`.
StreamSpec stream_spec_from_json(const nlohmann::json& doc, StreamSpec base);

// Single-consumer, deterministic row source for a StreamSpec.
class StreamGenerator {
 public:
  explicit StreamGenerator(StreamSpec spec);

  std::optional<std::vector<double>> next();
  // Up to `count` rows; throws ValidationError when the stream is exhausted.
  Batch take(std::size_t count);

  std::size_t position() const { return position_; }
  std::size_t remaining() const { return spec_.total_rows - position_; }
  const StreamSpec& spec() const { return spec_; }
  const Schema& schema() const { return schema_; }

  // Law in force at absolute row `row`.
  Law law_at(std::size_t row) const;

 private:
  StreamSpec spec_;
  Schema schema_;
  std::mt19937_64 rng_;
  std::size_t position_ = 0;
};

// Whole stream as one batch.
Batch generate(const StreamSpec& spec);

// Sidecar schema: JSON object mapping attribute name to {"kind", "delta"}.
Schema load_schema(const std::filesystem::path& path);
void save_schema(const Schema& schema, const std::filesystem::path& path);

// Header row of attribute names followed by one row per record.
void write_csv(const Batch& batch, const std::filesystem::path& path);

// Streams rows of a CSV file in file order. The header fixes column order
// and must name exactly the attributes of the sidecar schema.
class CsvReplay {
 public:
  CsvReplay(const std::filesystem::path& csv_path, const std::filesystem::path& schema_path);

  std::optional<std::vector<double>> next();
  const Schema& schema() const { return schema_; }
  std::size_t line() const { return line_; }

 private:
  std::ifstream in_;
  Schema schema_;
  std::size_t line_ = 1;
};

Batch replay(const std::filesystem::path& csv_path, const std::filesystem::path& schema_path);

}  // namespace renewal
