#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hcrn/layers.hpp"
#include "hcrn/lstm.hpp"
#include "hcrn/param_store.hpp"
#include "hcrn/rng.hpp"
#include "hcrn/tensor.hpp"

namespace hcrn {

enum class Architecture { kHybrid, kCnnOnly };

const char* architecture_name(Architecture arch);  // "hybrid" / "cnn"
Architecture parse_architecture(std::string_view name);

/// Sizes of every layer. The defaults are the full-size network on 60x80
/// RGB input; tiny() is a scaled-down variant for tests.
struct ArchSpec {
  std::size_t rows = 60;
  std::size_t cols = 80;
  std::size_t channels = 3;
  std::size_t kernel = 3;
  std::size_t conv1 = 32;
  std::size_t conv2 = 64;
  std::size_t lstm_units = 64;
  /// Width of both branch outputs at the merge.
  std::size_t branch_width = 64;
  std::size_t head_width = 128;
  double drop_pool = 0.25;
  double drop_lstm = 0.25;
  double drop_head = 0.5;

  static ArchSpec full() { return {}; }
  /// 12x16 input, conv widths 4 and 6, lstm 8, merge 8, head 16, and
  /// head dropout 0.25 instead of 0.5.
  static ArchSpec tiny();

  /// Spatial extent of the flattened conv output feeding the projection.
  std::size_t flatten_units() const;

  void validate(Architecture arch) const;

  bool operator==(const ArchSpec&) const = default;
};

/// A fully described network: layer lists plus parameters.
///
/// The hybrid head begins with a merge_mul layer joining the CNN branch
/// (input rgb) and the RNN branch (input grayscale rows as a sequence).
struct NetworkGraph {
  Architecture architecture = Architecture::kHybrid;
  ArchSpec arch;
  std::size_t classes = 4;
  std::vector<LayerSpec> cnn;
  std::vector<LayerSpec> rnn;
  std::vector<LayerSpec> head;
  ParamStore params;

  bool has_rnn() const { return !rnn.empty(); }

  /// Changes whenever layer layout or parameter shapes change; used to catch
  /// traces replayed against the wrong graph.
  std::uint64_t structure_hash() const;
};

NetworkGraph build_hybrid(Rng& rng, std::size_t classes, const ArchSpec& arch = ArchSpec::full());
NetworkGraph build_cnn_only(Rng& rng, std::size_t classes, const ArchSpec& arch = ArchSpec::full());
NetworkGraph build_network(Architecture architecture, Rng& rng, std::size_t classes,
                           const ArchSpec& arch);

/// Per-layer forward state kept for backpropagation. Only the fields the
/// layer kind needs are filled.
struct LayerCache {
  Tensor input;
  Tensor output;
  std::vector<std::size_t> argmax;
  DropoutMask mask;
  LstmSequenceCache lstm;
};

/// Runs a linear chain of layers. merge_mul is not allowed here.
Tensor forward_layers(std::span<const LayerSpec> layers, const ParamStore& params,
                      const Tensor& input, bool training, Rng& rng,
                      std::vector<LayerCache>& caches);

/// Reverse pass over a chain run by forward_layers. Parameter gradients are
/// added into `grads`; returns the gradient w.r.t. the chain input.
Tensor backward_layers(std::span<const LayerSpec> layers, std::span<const LayerCache> caches,
                       const ParamStore& params, const Tensor& grad_output, ParamStore& grads);

struct ItemTrace {
  std::vector<LayerCache> cnn;
  std::vector<LayerCache> rnn;
  std::vector<LayerCache> head;
  Tensor cnn_out;
  Tensor rnn_out;
};

struct ForwardTrace {
  std::vector<ItemTrace> items;
  Tensor logits;  // [batch x c]
  Tensor probs;   // [batch x c]
  bool training = false;
  std::uint64_t graph_hash = 0;
};

/// rgb [B x rows x cols x 3], gray [B x rows x cols]. In training mode the
/// dropout masks for item i come from a stream derived from one draw of
/// `rng` and i, so they do not depend on evaluation order. Inference mode
/// leaves `rng` untouched.
ForwardTrace forward(const NetworkGraph& graph, const Tensor& rgb, const Tensor& gray,
                     bool training, Rng& rng);

/// Gradients of the mean cross-entropy w.r.t. every parameter. Item
/// contributions are summed in ascending item order.
ParamStore backward(const NetworkGraph& graph, const ForwardTrace& trace, const Tensor& onehot);

/// Same as backward() but starting from an arbitrary logit gradient.
ParamStore backward_from_logits(const NetworkGraph& graph, const ForwardTrace& trace,
                                const Tensor& grad_logits);

/// Inference-mode argmax per item.
std::vector<std::size_t> predict(const NetworkGraph& graph, const Tensor& rgb,
                                 const Tensor& gray);

/// Rounds every parameter to the nearest float. Checkpoints store floats, so
/// a rounded graph predicts exactly like one restored from disk.
void round_params_to_float(NetworkGraph& graph);

/// One line per layer with output shape and parameter count.
std::string describe(const NetworkGraph& graph);

}  // namespace hcrn
