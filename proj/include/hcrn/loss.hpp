#pragma once

#include "hcrn/tensor.hpp"

namespace hcrn {

struct LossReport {
  double loss = 0.0;
  /// Gradient of the mean loss w.r.t. the pre-softmax logits, [batch x c].
  Tensor grad_logits;
};

/// Probabilities are clamped to this floor before the log.
inline constexpr double kProbabilityFloor = 1e-12;

/// Categorical cross-entropy averaged over the batch, with the fused
/// softmax gradient (probs - onehot) / batch.
///
/// probs and onehot are [batch x c]. A onehot row that is not a unit basis
/// vector raises LabelError naming the row.
LossReport cross_entropy(const Tensor& probs, const Tensor& onehot);

/// Checks that every row of a [batch x c] matrix is a one-hot vector.
void validate_onehot(const Tensor& onehot);

}  // namespace hcrn
