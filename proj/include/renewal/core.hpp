#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace renewal {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input shape or value: dimension mismatch, non-binary value, empty data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed file content; line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class AttributeKind { Binary, Numeric, TargetNumeric, TargetBinary };

bool is_target(AttributeKind kind);
bool is_binary_valued(AttributeKind kind);
std::string_view to_string(AttributeKind kind);
AttributeKind parse_attribute_kind(std::string_view text);

struct Attribute {
  std::string name;
  AttributeKind kind = AttributeKind::Numeric;
  double delta = 1.0;
};

enum class TaskKind { Regression, Classification };

std::string_view to_string(TaskKind task);
TaskKind parse_task_kind(std::string_view text);

// Ordered attribute list shared by every batch of a stream. Exactly one
// attribute is the target; the rest are features in schema order.
class Schema {
 public:
  explicit Schema(std::vector<Attribute> attributes);

  const std::vector<Attribute>& attributes() const { return attributes_; }
  std::size_t width() const { return attributes_.size(); }
  std::size_t target_index() const { return target_; }
  const std::vector<std::size_t>& feature_indices() const { return features_; }
  std::size_t feature_count() const { return features_.size(); }
  TaskKind task() const;
  std::optional<std::size_t> index_of(std::string_view name) const;

  // FNV-1a over the canonical "name:kind:delta;" rendering, hex encoded.
  std::string hash() const;

  bool operator==(const Schema& other) const;

 private:
  std::vector<Attribute> attributes_;
  std::size_t target_ = 0;
  std::vector<std::size_t> features_;
};

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::vector<double> column(std::size_t c) const;
  const std::vector<double>& data() const { return data_; }

  void append_row(std::span<const double> values);
  void append_rows(const Matrix& other);
  // Rows [first, first + count).
  Matrix slice(std::size_t first, std::size_t count) const;
  // Keeps the last `count` rows.
  Matrix tail(std::size_t count) const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Validated window of rows. Immutable once built.
class Batch {
 public:
  const Schema& schema() const { return schema_; }
  const Matrix& rows() const { return rows_; }
  std::size_t size() const { return rows_.rows(); }
  const std::vector<double>& timestamps() const { return timestamps_; }

  std::vector<double> column(std::size_t index) const { return rows_.column(index); }
  std::vector<double> targets() const { return rows_.column(schema_.target_index()); }
  Matrix features() const;

  // Rows of `a` followed by rows of `b`; schemas must match.
  static Batch concat(const Batch& a, const Batch& b);
  // Most recent `count` rows.
  Batch tail(std::size_t count) const;

 private:
  friend Batch validate_batch(Matrix, const Schema&, std::vector<double>);
  Batch(Schema schema, Matrix rows, std::vector<double> timestamps)
      : schema_(std::move(schema)), rows_(std::move(rows)), timestamps_(std::move(timestamps)) {}

  Schema schema_;
  Matrix rows_;
  std::vector<double> timestamps_;
};

// Throws ValidationError on empty input, width mismatch, NaN/inf values,
// non-{0,1} values in binary columns, or decreasing timestamps.
Batch validate_batch(Matrix rows, const Schema& schema, std::vector<double> timestamps = {});
Batch validate_batch(const std::vector<std::vector<double>>& rows, const Schema& schema);

enum class RenewalFlag : int { Retain = 0, Update = 1, Retrain = 2 };

std::string_view to_string(RenewalFlag flag);

// A fit that cannot proceed. Carries the renewal flag when raised while
// applying a decision.
class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& what, std::optional<RenewalFlag> flag = std::nullopt)
      : Error(what), flag_(flag) {}
  std::optional<RenewalFlag> flag() const { return flag_; }

 private:
  std::optional<RenewalFlag> flag_;
};

struct Thresholds {
  double similarity = 0.5;  // z
  double lc_low = 0.3;      // x
  double lc_high = 0.9;     // y
  std::size_t min_rows = 10000;  // L

  void validate() const;
};

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace renewal
