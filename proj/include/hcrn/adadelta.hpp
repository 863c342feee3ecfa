#pragma once

#include <vector>

#include "hcrn/tensor.hpp"

namespace hcrn {

struct AdadeltaOptions {
  double rho = 0.95;
  double eps = 1e-6;
  double lr = 1.0;

  bool operator==(const AdadeltaOptions&) const = default;
};

/// Decayed accumulators for one parameter tensor.
struct AdadeltaState {
  Tensor eg2;   // running mean of g^2
  Tensor edx2;  // running mean of update^2
  AdadeltaOptions options;

  static AdadeltaState fresh(const Shape& shape, AdadeltaOptions options = {});
};

/// Elementwise:
///   Eg2  <- rho*Eg2 + (1-rho)*g^2
///   d    <- -(sqrt(Edx2+eps) / sqrt(Eg2+eps)) * g
///   Edx2 <- rho*Edx2 + (1-rho)*d^2
///   p    <- p + lr*d
void adadelta_step(Tensor& param, const Tensor& grad, AdadeltaState& state);

}  // namespace hcrn
