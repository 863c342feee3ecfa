#include "hcrn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hcrn/error.hpp"
#include "hcrn/kernels.hpp"

namespace hcrn {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw DimensionError(message);
}

}  // namespace

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kMaxPool: return "maxpool";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kDropout: return "dropout";
    case LayerKind::kFlatten: return "flatten";
    case LayerKind::kDense: return "dense";
    case LayerKind::kLstm: return "lstm";
    case LayerKind::kMergeMul: return "merge_mul";
    case LayerKind::kSoftmax: return "softmax";
  }
  return "unknown";
}

LayerSpec LayerSpec::conv2d(std::string name, std::size_t kernel, std::size_t cin,
                            std::size_t cout) {
  LayerSpec s;
  s.kind = LayerKind::kConv2d;
  s.name = std::move(name);
  s.kernel_rows = s.kernel_cols = kernel;
  s.in_channels = cin;
  s.out_channels = cout;
  s.validate();
  return s;
}

LayerSpec LayerSpec::maxpool(std::string name) {
  LayerSpec s;
  s.kind = LayerKind::kMaxPool;
  s.name = std::move(name);
  return s;
}

LayerSpec LayerSpec::relu(std::string name) {
  LayerSpec s;
  s.kind = LayerKind::kRelu;
  s.name = std::move(name);
  return s;
}

LayerSpec LayerSpec::dropout(std::string name, double p) {
  LayerSpec s;
  s.kind = LayerKind::kDropout;
  s.name = std::move(name);
  s.drop = p;
  s.validate();
  return s;
}

LayerSpec LayerSpec::flatten(std::string name) {
  LayerSpec s;
  s.kind = LayerKind::kFlatten;
  s.name = std::move(name);
  return s;
}

LayerSpec LayerSpec::dense(std::string name, std::size_t in, std::size_t out,
                           Activation act) {
  LayerSpec s;
  s.kind = LayerKind::kDense;
  s.name = std::move(name);
  s.in_units = in;
  s.units = out;
  s.activation = act;
  s.validate();
  return s;
}

LayerSpec LayerSpec::lstm(std::string name, std::size_t in, std::size_t hidden,
                          bool return_sequence) {
  LayerSpec s;
  s.kind = LayerKind::kLstm;
  s.name = std::move(name);
  s.in_units = in;
  s.units = hidden;
  s.return_sequence = return_sequence;
  s.validate();
  return s;
}

LayerSpec LayerSpec::merge_mul(std::string name, std::size_t width) {
  LayerSpec s;
  s.kind = LayerKind::kMergeMul;
  s.name = std::move(name);
  s.in_units = s.units = width;
  s.validate();
  return s;
}

LayerSpec LayerSpec::softmax(std::string name) {
  LayerSpec s;
  s.kind = LayerKind::kSoftmax;
  s.name = std::move(name);
  return s;
}

void LayerSpec::validate() const {
  auto fail = [this](const std::string& why) {
    throw ConfigError("layer '" + name + "' (" + layer_kind_name(kind) + "): " + why);
  };
  switch (kind) {
    case LayerKind::kConv2d:
      if (kernel_rows == 0 || kernel_cols == 0) fail("kernel extents must be positive");
      if (in_channels == 0 || out_channels == 0) fail("channel counts must be positive");
      break;
    case LayerKind::kDropout:
      if (!(drop >= 0.0 && drop < 1.0)) fail("drop probability must lie in [0, 1)");
      break;
    case LayerKind::kDense:
    case LayerKind::kLstm:
      if (in_units == 0 || units == 0) fail("unit counts must be positive");
      break;
    case LayerKind::kMergeMul:
      if (units == 0) fail("merge width must be positive");
      break;
    default:
      break;
  }
}

Tensor conv2d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias) {
  require(input.rank() == 3 && kernels.rank() == 4 && bias.rank() == 1,
          "conv2d: expected input [HxWxC], kernels [KhxKwxCinxCout], bias [Cout]; got " +
              shape_string(input.shape()) + ", " + shape_string(kernels.shape()) + ", " +
              shape_string(bias.shape()));
  const std::size_t h = input.extent(0), w = input.extent(1), cin = input.extent(2);
  const std::size_t kh = kernels.extent(0), kw = kernels.extent(1), cout = kernels.extent(3);
  require(kh <= h && kw <= w,
          "conv2d: kernel " + shape_string(kernels.shape()) + " larger than input " +
              shape_string(input.shape()));
  require(kernels.extent(2) == cin && bias.extent(0) == cout,
          "conv2d: channel mismatch between input " + shape_string(input.shape()) +
              " and kernels " + shape_string(kernels.shape()));

  const std::size_t oh = h - kh + 1, ow = w - kw + 1;
  Tensor out({oh, ow, cout});
  const auto& kt = kernels::active();
  const double* in = input.data();
  const double* k = kernels.data();
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double* o = out.data() + (y * ow + x) * cout;
      std::copy(bias.values().begin(), bias.values().end(), o);
      for (std::size_t dy = 0; dy < kh; ++dy) {
        for (std::size_t dx = 0; dx < kw; ++dx) {
          const double* pixel = in + ((y + dy) * w + (x + dx)) * cin;
          const double* taps = k + (dy * kw + dx) * cin * cout;
          for (std::size_t c = 0; c < cin; ++c) kt.axpy(pixel[c], taps + c * cout, o, cout);
        }
      }
    }
  }
  return out;
}

Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& kernels,
                            const Tensor& grad_out) {
  require(input.rank() == 3 && kernels.rank() == 4 && grad_out.rank() == 3,
          "conv2d_backward: rank mismatch");
  const std::size_t h = input.extent(0), w = input.extent(1), cin = input.extent(2);
  const std::size_t kh = kernels.extent(0), kw = kernels.extent(1), cout = kernels.extent(3);
  require(kh <= h && kw <= w && kernels.extent(2) == cin,
          "conv2d_backward: kernels " + shape_string(kernels.shape()) +
              " incompatible with input " + shape_string(input.shape()));
  const std::size_t oh = h - kh + 1, ow = w - kw + 1;
  require(grad_out.shape() == Shape{oh, ow, cout},
          "conv2d_backward: grad_out " + shape_string(grad_out.shape()) + " expected " +
              shape_string({oh, ow, cout}));

  Conv2dGrads g{Tensor(input.shape()), Tensor(kernels.shape()), Tensor({cout})};
  const auto& kt = kernels::active();
  const double* in = input.data();
  const double* k = kernels.data();
  double* gin = g.input.data();
  double* gk = g.kernels.data();
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      const double* go = grad_out.data() + (y * ow + x) * cout;
      kt.add(g.bias.data(), go, g.bias.data(), cout);
      for (std::size_t dy = 0; dy < kh; ++dy) {
        for (std::size_t dx = 0; dx < kw; ++dx) {
          const std::size_t pix = ((y + dy) * w + (x + dx)) * cin;
          const std::size_t tap = (dy * kw + dx) * cin * cout;
          for (std::size_t c = 0; c < cin; ++c) {
            kt.axpy(in[pix + c], go, gk + tap + c * cout, cout);
            gin[pix + c] += kt.dot(k + tap + c * cout, go, cout);
          }
        }
      }
    }
  }
  return g;
}

PoolResult maxpool2x2_forward(const Tensor& input) {
  require(input.rank() == 3, "maxpool: expected [HxWxC], got " + shape_string(input.shape()));
  const std::size_t h = input.extent(0), w = input.extent(1), c = input.extent(2);
  require(h >= 2 && w >= 2,
          "maxpool: input " + shape_string(input.shape()) + " smaller than the 2x2 window");
  const std::size_t oh = h / 2, ow = w / 2;
  PoolResult r{Tensor({oh, ow, c}), std::vector<std::size_t>(oh * ow * c)};
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        std::size_t best = ((2 * y) * w + 2 * x) * c + ch;
        for (std::size_t dy = 0; dy < 2; ++dy) {
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t at = ((2 * y + dy) * w + 2 * x + dx) * c + ch;
            if (input[at] > input[best]) best = at;
          }
        }
        const std::size_t o = (y * ow + x) * c + ch;
        r.output[o] = input[best];
        r.argmax[o] = best;
      }
    }
  }
  return r;
}

Tensor maxpool2x2_backward(const Shape& input_shape, const std::vector<std::size_t>& argmax,
                           const Tensor& grad_out) {
  require(argmax.size() == grad_out.size(), "maxpool_backward: cache does not match grad_out");
  Tensor g(input_shape);
  for (std::size_t i = 0; i < argmax.size(); ++i) {
    require(argmax[i] < g.size(), "maxpool_backward: cache index out of range");
    g[argmax[i]] += grad_out[i];
  }
  return g;
}

Tensor relu_forward(const Tensor& input) {
  Tensor out = input;
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& grad_out) {
  require(input.shape() == grad_out.shape(), "relu_backward: shape mismatch " +
                                                 shape_string(input.shape()) + " vs " +
                                                 shape_string(grad_out.shape()));
  Tensor g(input.shape());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = input[i] > 0.0 ? grad_out[i] : 0.0;
  return g;
}

Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias,
                     Activation activation) {
  require(input.rank() == 1 && weights.rank() == 2 && bias.rank() == 1 &&
              weights.extent(1) == input.extent(0) && bias.extent(0) == weights.extent(0),
          "dense: incompatible shapes input " + shape_string(input.shape()) + ", weights " +
              shape_string(weights.shape()) + ", bias " + shape_string(bias.shape()));
  const std::size_t m = weights.extent(0), n = weights.extent(1);
  const auto& kt = kernels::active();
  Tensor out({m});
  for (std::size_t i = 0; i < m; ++i) {
    const double z = bias[i] + kt.dot(weights.data() + i * n, input.data(), n);
    out[i] = activation == Activation::kRelu && z <= 0.0 ? 0.0 : z;
  }
  return out;
}

DenseGrads dense_backward(const Tensor& input, const Tensor& weights, const Tensor& output,
                          const Tensor& grad_out, Activation activation) {
  require(weights.rank() == 2 && input.rank() == 1 && weights.extent(1) == input.extent(0) &&
              grad_out.shape() == Shape{weights.extent(0)} && output.shape() == grad_out.shape(),
          "dense_backward: incompatible shapes");
  const std::size_t m = weights.extent(0), n = weights.extent(1);
  const auto& kt = kernels::active();
  DenseGrads g{Tensor({n}), Tensor(weights.shape()), Tensor({m})};
  for (std::size_t i = 0; i < m; ++i) {
    const double gz =
        activation == Activation::kRelu && output[i] <= 0.0 ? 0.0 : grad_out[i];
    g.bias[i] = gz;
    if (gz == 0.0) continue;
    kt.axpy(gz, input.data(), g.weights.data() + i * n, n);
    kt.axpy(gz, weights.data() + i * n, g.input.data(), n);
  }
  return g;
}

DropoutResult dropout_apply(const Tensor& input, double p, Rng& rng, bool training) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ConfigError("dropout: probability " + std::to_string(p) + " outside [0, 1)");
  }
  if (!training || p == 0.0) {
    return {input, DropoutMask{Tensor::full(input.shape(), 1.0), p}};
  }
  const double keep_scale = 1.0 / (1.0 - p);
  DropoutResult r{Tensor(input.shape()), DropoutMask{Tensor(input.shape()), p}};
  for (std::size_t i = 0; i < input.size(); ++i) {
    const double m = rng.uniform() < p ? 0.0 : keep_scale;
    r.mask.mask[i] = m;
    r.output[i] = input[i] * m;
  }
  return r;
}

Tensor dropout_backward(const DropoutMask& mask, const Tensor& grad_out) {
  return mul(grad_out, mask.mask);
}

Tensor merge_mul_forward(const Tensor& a, const Tensor& b) { return mul(a, b); }

MergeGrads merge_mul_backward(const Tensor& a, const Tensor& b, const Tensor& grad_out) {
  return {mul(grad_out, b), mul(grad_out, a)};
}

Tensor softmax(const Tensor& logits) {
  require(logits.rank() == 1, "softmax expects rank 1, got " + shape_string(logits.shape()));
  const double top = *std::max_element(logits.values().begin(), logits.values().end());
  Tensor out(logits.shape());
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(logits[k] - top);
    total += out[k];
  }
  for (double& v : out.values()) v /= total;
  return out;
}

Tensor softmax_backward(const Tensor& probs, const Tensor& grad_out) {
  require(probs.shape() == grad_out.shape(), "softmax_backward: shape mismatch");
  double inner = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) inner += probs[k] * grad_out[k];
  Tensor g(probs.shape());
  for (std::size_t k = 0; k < probs.size(); ++k) g[k] = probs[k] * (grad_out[k] - inner);
  return g;
}

}  // namespace hcrn
