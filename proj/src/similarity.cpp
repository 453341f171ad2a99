#include "renewal/similarity.hpp"

#include <algorithm>
#include <cmath>

namespace renewal {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw ValidationError("length mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
}

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

double binary_similarity(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b);
  if (a.empty()) throw ValidationError("binary similarity needs at least one position");
  std::size_t both_zero = 0;
  std::size_t both_one = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] != 0.0 && a[i] != 1.0) || (b[i] != 0.0 && b[i] != 1.0))
      throw ValidationError("binary similarity input contains a value outside {0,1}");
    if (a[i] == b[i]) (a[i] == 0.0 ? both_zero : both_one)++;
  }
  return static_cast<double>(both_zero + both_one) / static_cast<double>(a.size());
}

double numeric_similarity(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b);
  if (a.size() < 2) throw ValidationError("numeric similarity needs at least 2 aligned values");

  bool const_a = is_constant(a);
  bool const_b = is_constant(b);
  if (const_a && const_b) return std::equal(a.begin(), a.end(), b.begin()) ? 1.0 : 0.0;
  if (const_a || const_b) return 0.0;

  // Single-pass co-moment accumulation (Welford).
  double mean_a = 0.0, mean_b = 0.0, m2_a = 0.0, m2_b = 0.0, co = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double n = static_cast<double>(i + 1);
    double da = a[i] - mean_a;
    double db = b[i] - mean_b;
    mean_a += da / n;
    mean_b += db / n;
    m2_a += da * (a[i] - mean_a);
    m2_b += db * (b[i] - mean_b);
    co += da * (b[i] - mean_b);
  }
  if (m2_a <= 0.0 || m2_b <= 0.0) return 0.0;
  double rho = std::abs(co) / std::sqrt(m2_a * m2_b);
  return std::clamp(rho, 0.0, 1.0);
}

double weighted_similarity(std::span<const double> sims, std::span<const double> deltas) {
  require_same_length(sims, deltas);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < sims.size(); ++i) {
    num += deltas[i] * sims[i];
    den += deltas[i];
  }
  if (!(den > 0.0)) throw ValidationError("all similarity weights are zero");
  return num / den;
}

double weighted_dissimilarity_complement(std::span<const double> sims, std::span<const double> deltas) {
  require_same_length(sims, deltas);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < sims.size(); ++i) {
    num += deltas[i] * (1.0 - sims[i]);
    den += deltas[i];
  }
  if (!(den > 0.0)) throw ValidationError("all similarity weights are zero");
  return 1.0 - num / den;
}

SimilarityReport batch_similarity(const Batch& prev, const Batch& next) {
  if (!(prev.schema() == next.schema())) throw ValidationError("batch similarity requires identical schemas");
  const Schema& schema = prev.schema();
  std::size_t n = std::min(prev.size(), next.size());
  const Matrix a = prev.rows().tail(n);
  const Matrix b = next.rows().tail(n);

  SimilarityReport report;
  std::vector<double> sims, deltas;
  for (std::size_t c = 0; c < schema.width(); ++c) {
    const Attribute& attr = schema.attributes()[c];
    AttributeSimilarity entry{attr.name, 0.0, false};
    if (!is_target(attr.kind) && attr.delta > 0.0) {
      std::vector<double> col_a = a.column(c);
      std::vector<double> col_b = b.column(c);
      if (attr.kind == AttributeKind::Binary) {
        entry.sim = binary_similarity(col_a, col_b);
      } else {
        if (n < 2)
          throw ValidationError("numeric attribute '" + attr.name + "' needs at least 2 aligned rows");
        entry.sim = numeric_similarity(col_a, col_b);
      }
      entry.used = true;
      sims.push_back(entry.sim);
      deltas.push_back(attr.delta);
    }
    report.per_attribute.push_back(std::move(entry));
  }
  report.aggregate = weighted_similarity(sims, deltas);
  return report;
}

std::string SimilarityReport::to_csv() const {
  std::string out = "name,sim,used\n";
  for (const auto& e : per_attribute)
    out += e.name + "," + format_double(e.sim) + "," + (e.used ? "1" : "0") + "\n";
  out += "aggregate," + format_double(aggregate) + ",1\n";
  return out;
}

}  // namespace renewal
