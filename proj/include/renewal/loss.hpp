#pragma once

#include <span>

#include "renewal/core.hpp"

namespace renewal {

// Loss of the current model on the reference batch (lm) and on the new
// batch (ln), and their change rate lc = |ln - lm| / lm.
struct LossPair {
  double lm = 0.0;
  double ln = 0.0;
  double lc = 0.0;
};

double rmse(std::span<const double> pred, std::span<const double> target);

// Sum of margin violations max(0, -y (w.x + b)); labels must be -1 or +1.
double perceptron_loss(std::span<const double> weights, double bias, const Matrix& features,
                       std::span<const double> labels);

// |ln - lm| / lm. Returns 0 when both are zero and +inf when only lm is.
double loss_change_rate(double lm, double ln);

LossPair make_loss_pair(double lm, double ln);

}  // namespace renewal
