#include "hcrn/loss.hpp"

#include <algorithm>
#include <cmath>

#include "hcrn/error.hpp"

namespace hcrn {

void validate_onehot(const Tensor& onehot) {
  if (onehot.rank() != 2) {
    throw DimensionError("one-hot labels must be [batch x c], got " + shape_string(onehot.shape()));
  }
  const std::size_t rows = onehot.extent(0), classes = onehot.extent(1);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t ones = 0;
    for (std::size_t k = 0; k < classes; ++k) {
      const double v = onehot[r * classes + k];
      if (v == 1.0) {
        ++ones;
      } else if (v != 0.0) {
        ones = 2;
        break;
      }
    }
    if (ones != 1) throw LabelError("malformed one-hot label in row " + std::to_string(r));
  }
}

LossReport cross_entropy(const Tensor& probs, const Tensor& onehot) {
  if (probs.rank() != 2 || probs.shape() != onehot.shape()) {
    throw DimensionError("cross_entropy: probs " + shape_string(probs.shape()) + " vs labels " +
                         shape_string(onehot.shape()));
  }
  validate_onehot(onehot);
  const std::size_t rows = probs.extent(0), classes = probs.extent(1);
  const double inv_batch = 1.0 / static_cast<double>(rows);

  LossReport report{0.0, Tensor(probs.shape())};
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < classes; ++k) {
      const std::size_t at = r * classes + k;
      if (onehot[at] == 1.0) total -= std::log(std::max(probs[at], kProbabilityFloor));
      report.grad_logits[at] = (probs[at] - onehot[at]) * inv_batch;
    }
  }
  report.loss = total * inv_batch;
  return report;
}

}  // namespace hcrn
