#include "hcrn/adadelta.hpp"

#include "hcrn/error.hpp"
#include "hcrn/kernels.hpp"

namespace hcrn {

AdadeltaState AdadeltaState::fresh(const Shape& shape, AdadeltaOptions options) {
  return {Tensor(shape), Tensor(shape), options};
}

void adadelta_step(Tensor& param, const Tensor& grad, AdadeltaState& state) {
  if (param.shape() != grad.shape() || state.eg2.shape() != param.shape() ||
      state.edx2.shape() != param.shape()) {
    throw DimensionError("adadelta_step: param " + shape_string(param.shape()) + ", grad " +
                         shape_string(grad.shape()) + ", state " +
                         shape_string(state.eg2.shape()) + " disagree");
  }
  const AdadeltaOptions& o = state.options;
  kernels::active().adadelta(param.data(), grad.data(), state.eg2.data(), state.edx2.data(),
                             param.size(), o.rho, o.eps, o.lr);
}

}  // namespace hcrn
