#include "renewal/simgen.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace renewal {

using json = nlohmann::json;

namespace {

std::vector<double> lerp_vec(const std::vector<double>& a, const std::vector<double>& b, double t) {
  if (a.size() != b.size()) throw ValidationError("law parameter vectors differ in length");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - t) * a[i] + t * b[i];
  return out;
}

std::size_t parse_size(std::string_view text, std::string_view what) {
  std::size_t value = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ValidationError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  return value;
}

void check_law(const Law& law, const StreamSpec& spec, std::string_view name) {
  auto need = [&](const std::vector<double>& v, std::size_t n, std::string_view field) {
    if (v.size() != n)
      throw ValidationError(std::string(name) + " law: '" + std::string(field) + "' needs " + std::to_string(n) +
                            " values, has " + std::to_string(v.size()));
  };
  std::size_t d = spec.numeric_features;
  need(law.level, d, "level");
  need(law.amplitude, d, "amplitude");
  need(law.phase, d, "phase");
  need(law.binary_rate, spec.binary_features, "binary_rate");
  for (double r : law.binary_rate)
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError(std::string(name) + " law: binary rates must lie in [0,1]");
  if (!(law.noise >= 0.0)) throw ValidationError(std::string(name) + " law: noise must be >= 0");
  if (spec.task == TaskKind::Regression) {
    need(law.weights, d + spec.binary_features, "weights");
  } else {
    need(law.class_mean_negative, d, "class_mean_negative");
    need(law.class_mean_positive, d, "class_mean_positive");
    if (!(law.positive_rate >= 0.0 && law.positive_rate <= 1.0))
      throw ValidationError(std::string(name) + " law: positive_rate must lie in [0,1]");
  }
}

json law_to_json(const Law& l) {
  return {{"level", l.level},
          {"amplitude", l.amplitude},
          {"phase", l.phase},
          {"binary_rate", l.binary_rate},
          {"weights", l.weights},
          {"intercept", l.intercept},
          {"noise", l.noise},
          {"class_mean_negative", l.class_mean_negative},
          {"class_mean_positive", l.class_mean_positive},
          {"positive_rate", l.positive_rate}};
}

Law law_from_json(const json& j, Law l) {
  auto vec = [&](const char* key, std::vector<double>& dst) {
    if (j.contains(key)) dst = j.at(key).get<std::vector<double>>();
  };
  vec("level", l.level);
  vec("amplitude", l.amplitude);
  vec("phase", l.phase);
  vec("binary_rate", l.binary_rate);
  vec("weights", l.weights);
  vec("class_mean_negative", l.class_mean_negative);
  vec("class_mean_positive", l.class_mean_positive);
  if (j.contains("intercept")) l.intercept = j.at("intercept").get<double>();
  if (j.contains("noise")) l.noise = j.at("noise").get<double>();
  if (j.contains("positive_rate")) l.positive_rate = j.at("positive_rate").get<double>();
  return l;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

Schema resolve_schema(std::ifstream& in, const std::filesystem::path& csv_path,
                      const std::filesystem::path& schema_path) {
  if (!std::filesystem::exists(schema_path))
    throw ParseError("schema file '" + schema_path.string() + "' does not exist", 0);
  if (!in) throw ParseError("cannot open CSV file '" + csv_path.string() + "'", 0);

  json doc;
  {
    std::ifstream sf(schema_path);
    try {
      doc = json::parse(sf);
    } catch (const json::exception& e) {
      throw ParseError("schema file '" + schema_path.string() + "' is not valid JSON: " + e.what(), 0);
    }
  }
  if (!doc.is_object()) throw ParseError("schema file must hold a JSON object of attributes", 0);

  std::string header;
  if (!std::getline(in, header)) throw ParseError("CSV file is empty", 1);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  std::vector<std::string> names = split_csv_line(header);

  std::vector<Attribute> attrs;
  for (const auto& name : names) {
    if (!doc.contains(name)) throw ParseError("column '" + name + "' is not declared in the schema", 1);
    const json& a = doc.at(name);
    Attribute attr{name, parse_attribute_kind(a.at("kind").get<std::string>()), a.value("delta", 1.0)};
    attrs.push_back(std::move(attr));
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (std::find(names.begin(), names.end(), it.key()) == names.end())
      throw ParseError("schema attribute '" + it.key() + "' has no CSV column", 1);
  }
  try {
    return Schema(std::move(attrs));
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), 1);
  }
}

}  // namespace

Law Law::lerp(const Law& a, const Law& b, double t) {
  Law out;
  out.level = lerp_vec(a.level, b.level, t);
  out.amplitude = lerp_vec(a.amplitude, b.amplitude, t);
  out.phase = lerp_vec(a.phase, b.phase, t);
  out.binary_rate = lerp_vec(a.binary_rate, b.binary_rate, t);
  out.weights = lerp_vec(a.weights, b.weights, t);
  out.intercept = (1.0 - t) * a.intercept + t * b.intercept;
  out.noise = (1.0 - t) * a.noise + t * b.noise;
  out.class_mean_negative = lerp_vec(a.class_mean_negative, b.class_mean_negative, t);
  out.class_mean_positive = lerp_vec(a.class_mean_positive, b.class_mean_positive, t);
  out.positive_rate = (1.0 - t) * a.positive_rate + t * b.positive_rate;
  return out;
}

DriftSpec DriftSpec::parse(std::string_view text) {
  DriftSpec d;
  if (text == "none") return d;
  if (text.starts_with("abrupt:")) {
    d.kind = Kind::Abrupt;
    d.at_row = parse_size(text.substr(7), "drift row");
    return d;
  }
  if (text.starts_with("gradual:")) {
    std::string_view rest = text.substr(8);
    auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw ValidationError("gradual drift needs START:END");
    d.kind = Kind::Gradual;
    d.start_row = parse_size(rest.substr(0, colon), "drift start row");
    d.end_row = parse_size(rest.substr(colon + 1), "drift end row");
    if (d.start_row >= d.end_row) throw ValidationError("gradual drift needs START < END");
    return d;
  }
  throw ValidationError("drift must be none, abrupt:ROW or gradual:START:END, got '" + std::string(text) + "'");
}

std::string DriftSpec::describe() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::Abrupt: return "abrupt:" + std::to_string(at_row);
    case Kind::Gradual: return "gradual:" + std::to_string(start_row) + ":" + std::to_string(end_row);
  }
  return "none";
}

Schema StreamSpec::schema() const {
  std::vector<Attribute> attrs;
  for (std::size_t j = 0; j < numeric_features; ++j) attrs.push_back({"x" + std::to_string(j), AttributeKind::Numeric, 1.0});
  for (std::size_t k = 0; k < binary_features; ++k) attrs.push_back({"b" + std::to_string(k), AttributeKind::Binary, 1.0});
  attrs.push_back({"y", task == TaskKind::Regression ? AttributeKind::TargetNumeric : AttributeKind::TargetBinary, 1.0});
  return Schema(std::move(attrs));
}

void StreamSpec::validate() const {
  if (total_rows < 1) throw ValidationError("stream needs at least one row");
  if (numeric_features + binary_features == 0) throw ValidationError("stream needs at least one feature");
  if (periods.size() != numeric_features) throw ValidationError("one period is needed per numeric feature");
  for (std::size_t p : periods)
    if (p == 0) throw ValidationError("periods must be positive");
  if (!(feature_noise >= 0.0)) throw ValidationError("feature noise must be >= 0");
  if (drift.kind == DriftSpec::Kind::Gradual && drift.start_row >= drift.end_row)
    throw ValidationError("gradual drift needs start_row < end_row");
  check_law(drift.pre, *this, "pre-drift");
  if (drift.kind != DriftSpec::Kind::None) check_law(drift.post, *this, "post-drift");
}

StreamSpec StreamSpec::make_default(TaskKind task, std::size_t total_rows, const std::string& drift, std::uint64_t seed) {
  StreamSpec s;
  s.task = task;
  s.total_rows = total_rows;
  s.seed = seed;
  s.drift = DriftSpec::parse(drift);
  const std::size_t d = s.numeric_features;
  const std::size_t b = s.binary_features;
  // All periods divide 1000, so batches of any multiple of 1000 rows start
  // in phase with each other.
  constexpr std::size_t kPeriods[] = {250, 125, 200, 100};
  constexpr double kPreWeights[] = {1.5, -2.0, 1.0, 0.5, 1.0};

  Law& pre = s.drift.pre;
  Law& post = s.drift.post;
  for (std::size_t j = 0; j < d; ++j) {
    s.periods.push_back(kPeriods[j % 4]);
    pre.level.push_back(0.0);
    pre.amplitude.push_back(1.0);
    pre.phase.push_back(0.5 * static_cast<double>(j));
  }
  pre.binary_rate.assign(b, 0.05);
  for (std::size_t j = 0; j < d + b; ++j) pre.weights.push_back(kPreWeights[j % 5]);
  pre.intercept = 3.0;
  pre.noise = 0.5;
  // Class signal: clusters at +-kSeparation along one feature.
  constexpr double kSeparation = 1.0;
  const std::size_t signal = d >= 2 ? d - 2 : 0;
  pre.class_mean_negative.assign(d, 0.0);
  pre.class_mean_positive.assign(d, 0.0);
  if (d > 0) {
    pre.class_mean_negative[signal] = -kSeparation;
    pre.class_mean_positive[signal] = kSeparation;
  }
  pre.positive_rate = 0.5;

  post = pre;
  for (double& ph : post.phase) ph += std::numbers::pi / 2.0;
  post.binary_rate.assign(b, 0.95);
  // Rotating each weight pair by 90 degrees gives an orthogonal vector.
  for (std::size_t j = 0; j + 1 < pre.weights.size(); j += 2) {
    post.weights[j] = -pre.weights[j + 1];
    post.weights[j + 1] = pre.weights[j];
  }
  if (pre.weights.size() % 2 == 1) post.weights.back() = 0.0;
  post.intercept = -1.0;
  // The clusters trade places along the signal feature.
  post.class_mean_negative = pre.class_mean_positive;
  post.class_mean_positive = pre.class_mean_negative;
  return s;
}

json to_json(const StreamSpec& spec) {
  return {{"task", std::string(to_string(spec.task))},
          {"numeric_features", spec.numeric_features},
          {"binary_features", spec.binary_features},
          {"periods", spec.periods},
          {"feature_noise", spec.feature_noise},
          {"total_rows", spec.total_rows},
          {"seed", spec.seed},
          {"drift", spec.drift.describe()},
          {"pre_law", law_to_json(spec.drift.pre)},
          {"post_law", law_to_json(spec.drift.post)}};
}

StreamSpec stream_spec_from_json(const json& doc, StreamSpec base) {
  try {
    if (doc.contains("task")) base.task = parse_task_kind(doc.at("task").get<std::string>());
    if (doc.contains("numeric_features")) base.numeric_features = doc.at("numeric_features").get<std::size_t>();
    if (doc.contains("binary_features")) base.binary_features = doc.at("binary_features").get<std::size_t>();
    if (doc.contains("periods")) base.periods = doc.at("periods").get<std::vector<std::size_t>>();
    if (doc.contains("feature_noise")) base.feature_noise = doc.at("feature_noise").get<double>();
    if (doc.contains("total_rows")) base.total_rows = doc.at("total_rows").get<std::size_t>();
    if (doc.contains("seed")) base.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("drift")) {
      DriftSpec parsed = DriftSpec::parse(doc.at("drift").get<std::string>());
      parsed.pre = base.drift.pre;
      parsed.post = base.drift.post;
      base.drift = parsed;
    }
    if (doc.contains("pre_law")) base.drift.pre = law_from_json(doc.at("pre_law"), base.drift.pre);
    if (doc.contains("post_law")) base.drift.post = law_from_json(doc.at("post_law"), base.drift.post);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid stream spec: ") + e.what());
  }
  return base;
}

StreamGenerator::StreamGenerator(StreamSpec spec)
    : spec_((spec.validate(), std::move(spec))), schema_(spec_.schema()), rng_(spec_.seed) {}

Law StreamGenerator::law_at(std::size_t row) const {
  const DriftSpec& d = spec_.drift;
  switch (d.kind) {
    case DriftSpec::Kind::None: return d.pre;
    case DriftSpec::Kind::Abrupt: return row < d.at_row ? d.pre : d.post;
    case DriftSpec::Kind::Gradual: {
      if (row < d.start_row) return d.pre;
      if (row >= d.end_row) return d.post;
      double t = static_cast<double>(row - d.start_row) / static_cast<double>(d.end_row - d.start_row);
      return Law::lerp(d.pre, d.post, t);
    }
  }
  return d.pre;
}

std::optional<std::vector<double>> StreamGenerator::next() {
  if (position_ >= spec_.total_rows) return std::nullopt;
  const std::size_t t = position_++;
  const Law law = law_at(t);
  const std::size_t d = spec_.numeric_features;
  const std::size_t b = spec_.binary_features;
  const bool classify = spec_.task == TaskKind::Classification;

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double label = 0.0;
  if (classify) label = unit(rng_) < law.positive_rate ? 1.0 : 0.0;

  std::vector<double> row(d + b + 1);
  for (std::size_t j = 0; j < d; ++j) {
    double angle = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(spec_.periods[j]);
    double v = law.level[j] + law.amplitude[j] * std::sin(angle + law.phase[j]) + spec_.feature_noise * gauss(rng_);
    if (classify) v += label == 1.0 ? law.class_mean_positive[j] : law.class_mean_negative[j];
    row[j] = v;
  }
  for (std::size_t k = 0; k < b; ++k) row[d + k] = unit(rng_) < law.binary_rate[k] ? 1.0 : 0.0;

  if (classify) {
    row[d + b] = label;
  } else {
    double y = law.intercept + law.noise * gauss(rng_);
    for (std::size_t j = 0; j < d + b; ++j) y += law.weights[j] * row[j];
    row[d + b] = y;
  }
  return row;
}

Batch StreamGenerator::take(std::size_t count) {
  if (remaining() == 0) throw ValidationError("stream is exhausted");
  Matrix rows(0, schema_.width());
  for (std::size_t i = 0; i < count; ++i) {
    auto row = next();
    if (!row) break;
    rows.append_row(*row);
  }
  return validate_batch(std::move(rows), schema_);
}

Batch generate(const StreamSpec& spec) {
  StreamGenerator gen(spec);
  return gen.take(spec.total_rows);
}

Schema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open schema file '" + path.string() + "'", 0);
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw ParseError("schema file '" + path.string() + "' is not valid JSON: " + e.what(), 0);
  }
  if (!doc.is_object()) throw ParseError("schema file must hold a JSON object of attributes", 0);
  std::vector<Attribute> attrs;
  for (auto it = doc.begin(); it != doc.end(); ++it)
    attrs.push_back({it.key(), parse_attribute_kind(it.value().at("kind").get<std::string>()),
                     it.value().value("delta", 1.0)});
  return Schema(std::move(attrs));
}

void save_schema(const Schema& schema, const std::filesystem::path& path) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& a : schema.attributes()) doc[a.name] = {{"kind", std::string(to_string(a.kind))}, {"delta", a.delta}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

void write_csv(const Batch& batch, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  const auto& attrs = batch.schema().attributes();
  for (std::size_t c = 0; c < attrs.size(); ++c) out << (c ? "," : "") << attrs[c].name;
  out << "\n";
  const Matrix& m = batch.rows();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << "\n";
  }
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

CsvReplay::CsvReplay(const std::filesystem::path& csv_path, const std::filesystem::path& schema_path)
    : in_(csv_path), schema_(resolve_schema(in_, csv_path, schema_path)) {}

std::optional<std::vector<double>> CsvReplay::next() {
  std::string text;
  while (true) {
    if (!std::getline(in_, text)) return std::nullopt;
    ++line_;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (!trim(text).empty()) break;
  }
  std::vector<std::string> cells = split_csv_line(text);
  const auto& attrs = schema_.attributes();
  if (cells.size() != attrs.size())
    throw ParseError("expected " + std::to_string(attrs.size()) + " values, found " + std::to_string(cells.size()),
                     line_);
  std::vector<double> row(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const std::string& cell = cells[c];
    if (cell.empty()) throw ParseError("missing value in column '" + attrs[c].name + "'", line_);
    double v = 0.0;
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(v))
      throw ParseError("value '" + cell + "' in column '" + attrs[c].name + "' is not a number", line_);
    if (is_binary_valued(attrs[c].kind) && v != 0.0 && v != 1.0)
      throw ParseError("value '" + cell + "' in binary column '" + attrs[c].name + "' is not 0 or 1", line_);
    row[c] = v;
  }
  return row;
}

Batch replay(const std::filesystem::path& csv_path, const std::filesystem::path& schema_path) {
  CsvReplay source(csv_path, schema_path);
  Matrix rows(0, source.schema().width());
  while (auto row = source.next()) rows.append_row(*row);
  if (rows.rows() == 0) throw ParseError("CSV file has no data rows", source.line());
  return validate_batch(std::move(rows), source.schema());
}

}  // namespace renewal
