#include "renewal/core.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace renewal {

bool is_target(AttributeKind kind) {
  return kind == AttributeKind::TargetNumeric || kind == AttributeKind::TargetBinary;
}

bool is_binary_valued(AttributeKind kind) {
  return kind == AttributeKind::Binary || kind == AttributeKind::TargetBinary;
}

std::string_view to_string(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::Binary: return "binary";
    case AttributeKind::Numeric: return "numeric";
    case AttributeKind::TargetNumeric: return "target_numeric";
    case AttributeKind::TargetBinary: return "target_binary";
  }
  return "unknown";
}

AttributeKind parse_attribute_kind(std::string_view text) {
  if (text == "binary") return AttributeKind::Binary;
  if (text == "numeric") return AttributeKind::Numeric;
  if (text == "target_numeric") return AttributeKind::TargetNumeric;
  if (text == "target_binary") return AttributeKind::TargetBinary;
  throw ValidationError("unknown attribute kind '" + std::string(text) + "'");
}

std::string_view to_string(TaskKind task) {
  return task == TaskKind::Regression ? "regression" : "classification";
}

TaskKind parse_task_kind(std::string_view text) {
  if (text == "regression") return TaskKind::Regression;
  if (text == "classification") return TaskKind::Classification;
  throw ValidationError("unknown model kind '" + std::string(text) + "'");
}

std::string_view to_string(RenewalFlag flag) {
  switch (flag) {
    case RenewalFlag::Retain: return "retain";
    case RenewalFlag::Update: return "update";
    case RenewalFlag::Retrain: return "retrain";
  }
  return "unknown";
}

Schema::Schema(std::vector<Attribute> attributes) : attributes_(std::move(attributes)) {
  if (attributes_.empty()) throw ValidationError("schema has no attributes");
  std::set<std::string> names;
  std::size_t targets = 0;
  bool any_weighted_feature = false;
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    const auto& a = attributes_[i];
    if (a.name.empty()) throw ValidationError("attribute " + std::to_string(i) + " has empty name");
    if (!names.insert(a.name).second) throw ValidationError("duplicate attribute name '" + a.name + "'");
    if (!(a.delta >= 0.0 && a.delta <= 1.0))
      throw ValidationError("attribute '" + a.name + "' delta must lie in [0,1]");
    if (is_target(a.kind)) {
      ++targets;
      target_ = i;
    } else {
      features_.push_back(i);
      any_weighted_feature = any_weighted_feature || a.delta > 0.0;
    }
  }
  if (targets != 1)
    throw ValidationError("schema must have exactly one target attribute, found " + std::to_string(targets));
  if (!any_weighted_feature) throw ValidationError("schema needs a non-target attribute with delta > 0");
}

TaskKind Schema::task() const {
  return attributes_[target_].kind == AttributeKind::TargetBinary ? TaskKind::Classification
                                                                   : TaskKind::Regression;
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i)
    if (attributes_[i].name == name) return i;
  return std::nullopt;
}

std::string Schema::hash() const {
  std::string canonical;
  for (const auto& a : attributes_) {
    canonical += a.name;
    canonical += ':';
    canonical += to_string(a.kind);
    canonical += ':';
    canonical += format_double(a.delta);
    canonical += ';';
  }
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

bool Schema::operator==(const Schema& other) const {
  if (attributes_.size() != other.attributes_.size()) return false;
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    const auto& a = attributes_[i];
    const auto& b = other.attributes_[i];
    if (a.name != b.name || a.kind != b.kind || a.delta != b.delta) return false;
  }
  return true;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw ValidationError("matrix data size does not match shape");
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(0, rows.front().size());
  m.data_.reserve(rows.size() * m.cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols_)
      throw ValidationError("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                            " values, expected " + std::to_string(m.cols_));
    m.append_row(rows[i]);
  }
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = data_[r * cols_ + c];
  return out;
}

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_)
    throw ValidationError("row has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(cols_));
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

void Matrix::append_rows(const Matrix& other) {
  if (other.rows_ == 0) return;
  if (rows_ == 0 && cols_ == 0) cols_ = other.cols_;
  if (other.cols_ != cols_) throw ValidationError("column count mismatch when appending rows");
  data_.insert(data_.end(), other.data_.begin(), other.data_.end());
  rows_ += other.rows_;
}

Matrix Matrix::slice(std::size_t first, std::size_t count) const {
  if (first > rows_ || count > rows_ - first) throw ValidationError("row slice out of range");
  auto begin = data_.begin() + static_cast<std::ptrdiff_t>(first * cols_);
  return Matrix(count, cols_, std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count * cols_)));
}

Matrix Matrix::tail(std::size_t count) const {
  if (count >= rows_) return *this;
  return slice(rows_ - count, count);
}

Matrix Batch::features() const {
  const auto& idx = schema_.feature_indices();
  Matrix out(size(), idx.size());
  for (std::size_t r = 0; r < size(); ++r)
    for (std::size_t j = 0; j < idx.size(); ++j) out(r, j) = rows_(r, idx[j]);
  return out;
}

Batch Batch::concat(const Batch& a, const Batch& b) {
  if (!(a.schema_ == b.schema_)) throw ValidationError("cannot concatenate batches with different schemas");
  Matrix rows = a.rows_;
  rows.append_rows(b.rows_);
  std::vector<double> ts;
  if (!a.timestamps_.empty() && !b.timestamps_.empty()) {
    ts = a.timestamps_;
    ts.insert(ts.end(), b.timestamps_.begin(), b.timestamps_.end());
  }
  return validate_batch(std::move(rows), a.schema_, std::move(ts));
}

Batch Batch::tail(std::size_t count) const {
  if (count >= size()) return *this;
  std::vector<double> ts;
  if (!timestamps_.empty()) ts.assign(timestamps_.end() - static_cast<std::ptrdiff_t>(count), timestamps_.end());
  return Batch(schema_, rows_.tail(count), std::move(ts));
}

Batch validate_batch(Matrix rows, const Schema& schema, std::vector<double> timestamps) {
  if (rows.rows() == 0) throw ValidationError("batch must contain at least one row");
  if (rows.cols() != schema.width())
    throw ValidationError("batch has " + std::to_string(rows.cols()) + " columns, schema expects " +
                          std::to_string(schema.width()));
  const auto& attrs = schema.attributes();
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (std::size_t c = 0; c < rows.cols(); ++c) {
      double v = rows(r, c);
      if (!std::isfinite(v))
        throw ValidationError("row " + std::to_string(r) + ", column '" + attrs[c].name +
                              "': missing or non-finite value");
      if (is_binary_valued(attrs[c].kind) && v != 0.0 && v != 1.0)
        throw ValidationError("row " + std::to_string(r) + ", column '" + attrs[c].name +
                              "': binary value must be 0 or 1, got " + format_double(v));
    }
  }
  if (!timestamps.empty()) {
    if (timestamps.size() != rows.rows()) throw ValidationError("timestamp count does not match row count");
    for (std::size_t i = 1; i < timestamps.size(); ++i)
      if (timestamps[i] < timestamps[i - 1]) throw ValidationError("timestamps must be non-decreasing");
  }
  return Batch(schema, std::move(rows), std::move(timestamps));
}

Batch validate_batch(const std::vector<std::vector<double>>& rows, const Schema& schema) {
  if (rows.empty()) throw ValidationError("batch must contain at least one row");
  return validate_batch(Matrix::from_rows(rows), schema);
}

void Thresholds::validate() const {
  if (!(similarity > 0.0 && similarity < 1.0)) throw ValidationError("similarity threshold z must lie in (0,1)");
  if (!(lc_low > 0.0)) throw ValidationError("lower loss-change threshold x must be > 0");
  if (!(lc_high > lc_low)) throw ValidationError("upper loss-change threshold y must exceed x");
  if (min_rows < 1) throw ValidationError("minimum batch rows L must be >= 1");
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace renewal
