#pragma once

#include <cstddef>
#include <vector>

#include "hcrn/tensor.hpp"

namespace hcrn {

/// Weights of one LSTM layer. Every gate matrix is [hidden x (hidden + input)]
/// and multiplies the concatenation [h_{t-1}, x_t], hidden part first.
struct LstmParams {
  Tensor w_forget, w_input, w_candidate, w_output;
  Tensor b_forget, b_input, b_candidate, b_output;

  static LstmParams zeros(std::size_t input, std::size_t hidden);

  std::size_t hidden() const { return b_forget.size(); }
  std::size_t input() const { return w_forget.extent(1) - hidden(); }

  /// Throws DimensionError when the eight tensors disagree.
  void validate() const;
};

struct LstmState {
  Tensor h;
  Tensor c;

  static LstmState zeros(std::size_t hidden);
};

/// Everything one step needs for backpropagation.
struct LstmStepCache {
  Tensor concat;  // [h_{t-1}, x_t]
  Tensor c_prev;
  Tensor forget, input, candidate, output;  // post-activation gate values
  Tensor c;
  Tensor tanh_c;
};

struct LstmStepResult {
  LstmState state;
  LstmStepCache cache;
};

/// f = sigma(W_f[h,x] + b_f), i = sigma(W_i[h,x] + b_i),
/// C~ = tanh(W_C[h,x] + b_C), C = f*C_prev + i*C~,
/// o = sigma(W_o[h,x] + b_o), h = o*tanh(C).
LstmStepResult lstm_step(const Tensor& x, const LstmState& prev, const LstmParams& params);

struct LstmSequenceCache {
  std::vector<LstmStepCache> steps;
  bool return_sequence = false;
  std::size_t input_features = 0;
};

struct LstmSequenceResult {
  Tensor output;  // [T x hidden] or [hidden]
  LstmSequenceCache cache;
};

/// Runs lstm_step over the rows of xs [T x d] from a zero state.
LstmSequenceResult lstm_sequence_forward(const Tensor& xs, const LstmParams& params,
                                         bool return_sequence);

struct LstmGrads {
  Tensor xs;
  LstmParams params;
};

/// Backpropagation through time for sum(grad_out * output).
LstmGrads lstm_backward(const LstmSequenceCache& cache, const LstmParams& params,
                        const Tensor& grad_out);

}  // namespace hcrn
