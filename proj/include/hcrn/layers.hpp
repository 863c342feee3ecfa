#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hcrn/rng.hpp"
#include "hcrn/tensor.hpp"

namespace hcrn {

enum class LayerKind {
  kConv2d,
  kMaxPool,
  kRelu,
  kDropout,
  kFlatten,
  kDense,
  kLstm,
  kMergeMul,
  kSoftmax,
};

const char* layer_kind_name(LayerKind kind);

enum class Activation { kNone, kRelu };

/// Declarative description of one layer. Only the fields relevant to `kind`
/// are meaningful; validate() checks those.
struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  std::string name;
  std::size_t kernel_rows = 0;
  std::size_t kernel_cols = 0;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t in_units = 0;   // dense, lstm input features, merge width
  std::size_t units = 0;      // dense outputs, lstm hidden width
  double drop = 0.0;
  bool return_sequence = false;
  Activation activation = Activation::kNone;

  static LayerSpec conv2d(std::string name, std::size_t kernel, std::size_t cin,
                          std::size_t cout);
  static LayerSpec maxpool(std::string name);
  static LayerSpec relu(std::string name);
  static LayerSpec dropout(std::string name, double p);
  static LayerSpec flatten(std::string name);
  static LayerSpec dense(std::string name, std::size_t in, std::size_t out,
                         Activation act);
  static LayerSpec lstm(std::string name, std::size_t in, std::size_t hidden,
                        bool return_sequence);
  static LayerSpec merge_mul(std::string name, std::size_t width);
  static LayerSpec softmax(std::string name);

  /// Throws ConfigError on invalid hyperparameters.
  void validate() const;
};

// ---- convolution ----------------------------------------------------------

/// Valid cross-correlation:
///   out[y,x,o] = bias[o] + sum_{dy,dx,c} in[y+dy, x+dx, c] * k[dy,dx,c,o]
Tensor conv2d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias);

struct Conv2dGrads {
  Tensor input;
  Tensor kernels;
  Tensor bias;
};

Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& kernels,
                            const Tensor& grad_out);

// ---- pooling --------------------------------------------------------------

struct PoolResult {
  Tensor output;
  /// Flat input offset of the selected element for each output element.
  std::vector<std::size_t> argmax;
};

/// 2x2 window, stride 2. An odd trailing row/column is dropped; ties go to
/// the first maximal element in row-major window order.
PoolResult maxpool2x2_forward(const Tensor& input);

Tensor maxpool2x2_backward(const Shape& input_shape,
                           const std::vector<std::size_t>& argmax,
                           const Tensor& grad_out);

// ---- activations ----------------------------------------------------------

Tensor relu_forward(const Tensor& input);
Tensor relu_backward(const Tensor& input, const Tensor& grad_out);

// ---- dense ----------------------------------------------------------------

/// activation(W * input + b) for W [m x n].
Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias,
                     Activation activation);

struct DenseGrads {
  Tensor input;
  Tensor weights;
  Tensor bias;
};

/// `output` is the forward result; it gates the gradient when the activation
/// is ReLU.
DenseGrads dense_backward(const Tensor& input, const Tensor& weights,
                          const Tensor& output, const Tensor& grad_out,
                          Activation activation);

// ---- dropout --------------------------------------------------------------

/// Mask entries are 0 or 1/(1-p).
struct DropoutMask {
  Tensor mask;
  double p = 0.0;
};

struct DropoutResult {
  Tensor output;
  DropoutMask mask;
};

/// Inverted dropout. In inference mode (or p == 0) the output equals the
/// input and the mask is all ones; no random numbers are drawn then.
DropoutResult dropout_apply(const Tensor& input, double p, Rng& rng, bool training);

Tensor dropout_backward(const DropoutMask& mask, const Tensor& grad_out);

// ---- merge ----------------------------------------------------------------

Tensor merge_mul_forward(const Tensor& a, const Tensor& b);

struct MergeGrads {
  Tensor a;
  Tensor b;
};

MergeGrads merge_mul_backward(const Tensor& a, const Tensor& b, const Tensor& grad_out);

// ---- softmax --------------------------------------------------------------

/// Max-subtracted softmax over a rank-1 tensor.
Tensor softmax(const Tensor& logits);

/// Vector-Jacobian product of softmax given its output.
Tensor softmax_backward(const Tensor& probs, const Tensor& grad_out);

}  // namespace hcrn
