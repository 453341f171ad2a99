#include "renewal/loss.hpp"

#include <cmath>
#include <limits>

namespace renewal {

double rmse(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size())
    throw ValidationError("rmse length mismatch: " + std::to_string(pred.size()) + " vs " +
                          std::to_string(target.size()));
  if (pred.empty()) throw ValidationError("rmse of empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    double r = pred[i] - target[i];
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(pred.size()));
}

double perceptron_loss(std::span<const double> weights, double bias, const Matrix& features,
                       std::span<const double> labels) {
  if (features.rows() != labels.size()) throw ValidationError("perceptron loss: row/label count mismatch");
  if (features.rows() > 0 && features.cols() != weights.size())
    throw ValidationError("perceptron loss: feature width " + std::to_string(features.cols()) +
                          " does not match weight length " + std::to_string(weights.size()));
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    double y = labels[i];
    if (y != 1.0 && y != -1.0) throw ValidationError("perceptron loss: labels must be -1 or +1");
    double activation = bias;
    auto x = features.row(i);
    for (std::size_t j = 0; j < weights.size(); ++j) activation += weights[j] * x[j];
    double violation = -y * activation;
    if (violation > 0.0) total += violation;
  }
  return total;
}

double loss_change_rate(double lm, double ln) {
  if (!(lm >= 0.0) || !(ln >= 0.0)) throw ValidationError("loss change rate needs non-negative losses");
  if (lm == 0.0) return ln == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(ln - lm) / lm;
}

LossPair make_loss_pair(double lm, double ln) { return {lm, ln, loss_change_rate(lm, ln)}; }

}  // namespace renewal
