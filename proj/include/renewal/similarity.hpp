#pragma once

#include <span>
#include <string>
#include <vector>

#include "renewal/core.hpp"

namespace renewal {

struct AttributeSimilarity {
  std::string name;
  double sim = 0.0;
  bool used = false;  // false for the target and for delta == 0 attributes
};

struct SimilarityReport {
  std::vector<AttributeSimilarity> per_attribute;
  double aggregate = 0.0;

  // One "name,sim,used" row per attribute plus an "aggregate" row.
  std::string to_csv() const;
};

// Fraction of positions where both vectors hold the same state (both 0 or
// both 1). Throws ValidationError on length mismatch or non-binary values.
double binary_similarity(std::span<const double> a, std::span<const double> b);

// |Pearson(a, b)|, clamped to [0,1]. Constant inputs: 1 when both are
// constant and elementwise equal, 0 otherwise.
double numeric_similarity(std::span<const double> a, std::span<const double> b);

// Delta-weighted mean of per-attribute similarities.
double weighted_similarity(std::span<const double> sims, std::span<const double> deltas);
// Same quantity written as 1 - sum(delta * (1 - sim)) / sum(delta).
double weighted_dissimilarity_complement(std::span<const double> sims, std::span<const double> deltas);

// Compares the most recent min(|prev|, |next|) rows of both batches
// attribute by attribute; the target column is skipped.
SimilarityReport batch_similarity(const Batch& prev, const Batch& next);

}  // namespace renewal
