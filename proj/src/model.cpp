#include "hcrn/model.hpp"

#include <sstream>

#include "hcrn/error.hpp"
#include "hcrn/loss.hpp"

namespace hcrn {
namespace {

constexpr const char* kLstmSuffixes[8] = {".w_forget", ".w_input", ".w_candidate", ".w_output",
                                          ".b_forget", ".b_input", ".b_candidate", ".b_output"};

LstmParams lstm_params(const ParamStore& params, const std::string& layer) {
  const auto get = [&](int i) { return params.at(layer + kLstmSuffixes[i]); };
  return {get(0), get(1), get(2), get(3), get(4), get(5), get(6), get(7)};
}

void add_lstm_grads(ParamStore& grads, const std::string& layer, const LstmParams& g) {
  const Tensor* parts[8] = {&g.w_forget, &g.w_input, &g.w_candidate, &g.w_output,
                            &g.b_forget, &g.b_input, &g.b_candidate, &g.b_output};
  for (int i = 0; i < 8; ++i) add_in_place(grads.at(layer + kLstmSuffixes[i]), *parts[i]);
}

// Parameters are created in layer order, weights before biases, so the
// stream of draws from rng is fixed by the layer list alone.
void init_params(std::span<const LayerSpec> layers, Rng& rng, ParamStore& params) {
  for (const LayerSpec& l : layers) {
    switch (l.kind) {
      case LayerKind::kConv2d: {
        const std::size_t taps = l.kernel_rows * l.kernel_cols;
        params.add(l.name + ".kernel",
                   glorot_init(rng, {l.kernel_rows, l.kernel_cols, l.in_channels, l.out_channels},
                               taps * l.in_channels, taps * l.out_channels));
        params.add(l.name + ".bias", Tensor({l.out_channels}));
        break;
      }
      case LayerKind::kDense:
        params.add(l.name + ".weight",
                   glorot_init(rng, {l.units, l.in_units}, l.in_units, l.units));
        params.add(l.name + ".bias", Tensor({l.units}));
        break;
      case LayerKind::kLstm: {
        const std::size_t cols = l.units + l.in_units;
        for (int g = 0; g < 4; ++g) {
          params.add(l.name + kLstmSuffixes[g], glorot_init(rng, {l.units, cols}, cols, l.units));
        }
        for (int g = 4; g < 8; ++g) params.add(l.name + kLstmSuffixes[g], Tensor({l.units}));
        break;
      }
      default:
        break;
    }
  }
}

std::vector<LayerSpec> cnn_branch(const ArchSpec& a) {
  return {
      LayerSpec::conv2d("cnn.conv1", a.kernel, a.channels, a.conv1),
      LayerSpec::relu("cnn.relu1"),
      LayerSpec::conv2d("cnn.conv2", a.kernel, a.conv1, a.conv2),
      LayerSpec::relu("cnn.relu2"),
      LayerSpec::maxpool("cnn.pool"),
      LayerSpec::dropout("cnn.drop", a.drop_pool),
      LayerSpec::flatten("cnn.flatten"),
      LayerSpec::dense("cnn.proj", a.flatten_units(), a.branch_width, Activation::kRelu),
  };
}

std::vector<LayerSpec> head_tail(const ArchSpec& a, std::size_t classes) {
  return {
      LayerSpec::dense("head.dense", a.branch_width, a.head_width, Activation::kRelu),
      LayerSpec::dropout("head.drop", a.drop_head),
      LayerSpec::dense("head.out", a.head_width, classes, Activation::kNone),
      LayerSpec::softmax("head.softmax"),
  };
}

void check_classes(std::size_t classes) {
  if (classes != 2 && classes != 4) {
    throw ConfigError("unsupported class count " + std::to_string(classes) + " (expected 2 or 4)");
  }
}

Shape infer_output(const LayerSpec& l, const Shape& in) {
  switch (l.kind) {
    case LayerKind::kConv2d:
      return {in[0] - l.kernel_rows + 1, in[1] - l.kernel_cols + 1, l.out_channels};
    case LayerKind::kMaxPool:
      return {in[0] / 2, in[1] / 2, in[2]};
    case LayerKind::kFlatten:
      return {shape_size(in)};
    case LayerKind::kDense:
      return {l.units};
    case LayerKind::kLstm:
      return l.return_sequence ? Shape{in[0], l.units} : Shape{l.units};
    default:
      return in;
  }
}

std::size_t layer_param_count(const LayerSpec& l, const ParamStore& params) {
  std::size_t n = 0;
  for (const auto& e : params.entries()) {
    if (e.name.size() > l.name.size() && e.name.compare(0, l.name.size(), l.name) == 0 &&
        e.name[l.name.size()] == '.') {
      n += e.value.size();
    }
  }
  return n;
}

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

const char* architecture_name(Architecture arch) {
  return arch == Architecture::kHybrid ? "hybrid" : "cnn";
}

Architecture parse_architecture(std::string_view name) {
  if (name == "hybrid") return Architecture::kHybrid;
  if (name == "cnn" || name == "cnn_only") return Architecture::kCnnOnly;
  throw ConfigError("unknown architecture '" + std::string(name) + "' (expected hybrid or cnn)");
}

ArchSpec ArchSpec::tiny() {
  ArchSpec a;
  a.rows = 12;
  a.cols = 16;
  a.conv1 = 4;
  a.conv2 = 6;
  a.lstm_units = 8;
  a.branch_width = 8;
  a.head_width = 16;
  a.drop_head = 0.25;
  return a;
}

std::size_t ArchSpec::flatten_units() const {
  const std::size_t shrink = 2 * (kernel - 1);
  if (rows <= shrink || cols <= shrink) return 0;
  return ((rows - shrink) / 2) * ((cols - shrink) / 2) * conv2;
}

void ArchSpec::validate(Architecture architecture) const {
  if (channels != 3) throw ConfigError("input must have 3 channels");
  if (kernel == 0 || conv1 == 0 || conv2 == 0 || branch_width == 0 || head_width == 0) {
    throw ConfigError("layer widths must be positive");
  }
  const std::size_t shrink = 2 * (kernel - 1);
  if (rows < shrink + 2 || cols < shrink + 2) {
    throw ConfigError("input " + std::to_string(rows) + "x" + std::to_string(cols) +
                      " too small for two " + std::to_string(kernel) + "x" +
                      std::to_string(kernel) + " convolutions and a 2x2 pool");
  }
  for (double p : {drop_pool, drop_lstm, drop_head}) {
    if (!(p >= 0.0 && p < 1.0)) throw ConfigError("dropout probabilities must lie in [0, 1)");
  }
  if (architecture == Architecture::kHybrid && lstm_units != branch_width) {
    throw ConfigError("lstm width " + std::to_string(lstm_units) +
                      " must equal the merge width " + std::to_string(branch_width));
  }
}

std::uint64_t NetworkGraph::structure_hash() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  h = fnv1a(h, architecture_name(architecture));
  h = fnv1a(h, std::to_string(classes));
  for (const auto* list : {&cnn, &rnn, &head}) {
    for (const LayerSpec& l : *list) h = fnv1a(h, l.name);
    h = fnv1a(h, "|");
  }
  for (const auto& e : params.entries()) {
    h = fnv1a(h, e.name);
    h = fnv1a(h, shape_string(e.value.shape()));
  }
  return h;
}

NetworkGraph build_hybrid(Rng& rng, std::size_t classes, const ArchSpec& arch) {
  return build_network(Architecture::kHybrid, rng, classes, arch);
}

NetworkGraph build_cnn_only(Rng& rng, std::size_t classes, const ArchSpec& arch) {
  return build_network(Architecture::kCnnOnly, rng, classes, arch);
}

NetworkGraph build_network(Architecture architecture, Rng& rng, std::size_t classes,
                           const ArchSpec& arch) {
  check_classes(classes);
  arch.validate(architecture);
  NetworkGraph g;
  g.architecture = architecture;
  g.arch = arch;
  g.classes = classes;
  g.cnn = cnn_branch(arch);
  if (architecture == Architecture::kHybrid) {
    g.rnn = {
        LayerSpec::lstm("rnn.lstm1", arch.cols, arch.lstm_units, true),
        LayerSpec::dropout("rnn.drop1", arch.drop_lstm),
        LayerSpec::lstm("rnn.lstm2", arch.lstm_units, arch.lstm_units, false),
        LayerSpec::dropout("rnn.drop2", arch.drop_lstm),
    };
    g.head.push_back(LayerSpec::merge_mul("head.merge", arch.branch_width));
  }
  for (LayerSpec& l : head_tail(arch, classes)) g.head.push_back(std::move(l));

  init_params(g.cnn, rng, g.params);
  init_params(g.rnn, rng, g.params);
  init_params(g.head, rng, g.params);
  return g;
}

Tensor forward_layers(std::span<const LayerSpec> layers, const ParamStore& params,
                      const Tensor& input, bool training, Rng& rng,
                      std::vector<LayerCache>& caches) {
  caches.clear();
  caches.reserve(layers.size());
  Tensor x = input;
  for (const LayerSpec& l : layers) {
    LayerCache c;
    c.input = x;
    switch (l.kind) {
      case LayerKind::kConv2d:
        x = conv2d_forward(x, params.at(l.name + ".kernel"), params.at(l.name + ".bias"));
        break;
      case LayerKind::kMaxPool: {
        PoolResult r = maxpool2x2_forward(x);
        x = std::move(r.output);
        c.argmax = std::move(r.argmax);
        break;
      }
      case LayerKind::kRelu:
        x = relu_forward(x);
        break;
      case LayerKind::kDropout: {
        DropoutResult r = dropout_apply(x, l.drop, rng, training);
        x = std::move(r.output);
        c.mask = std::move(r.mask);
        break;
      }
      case LayerKind::kFlatten:
        x = reshape(x, {x.size()});
        break;
      case LayerKind::kDense:
        x = dense_forward(x, params.at(l.name + ".weight"), params.at(l.name + ".bias"),
                          l.activation);
        break;
      case LayerKind::kLstm: {
        LstmSequenceResult r = lstm_sequence_forward(x, lstm_params(params, l.name),
                                                     l.return_sequence);
        x = std::move(r.output);
        c.lstm = std::move(r.cache);
        break;
      }
      case LayerKind::kSoftmax:
        x = softmax(x);
        break;
      case LayerKind::kMergeMul:
        throw UsageError("merge_mul cannot appear inside a sequential chain");
    }
    c.output = x;
    caches.push_back(std::move(c));
  }
  return x;
}

Tensor backward_layers(std::span<const LayerSpec> layers, std::span<const LayerCache> caches,
                       const ParamStore& params, const Tensor& grad_output, ParamStore& grads) {
  if (caches.size() != layers.size()) {
    throw UsageError("backward: trace holds " + std::to_string(caches.size()) +
                     " layer caches for " + std::to_string(layers.size()) + " layers");
  }
  Tensor g = grad_output;
  for (std::size_t i = layers.size(); i-- > 0;) {
    const LayerSpec& l = layers[i];
    const LayerCache& c = caches[i];
    switch (l.kind) {
      case LayerKind::kConv2d: {
        Conv2dGrads r = conv2d_backward(c.input, params.at(l.name + ".kernel"), g);
        add_in_place(grads.at(l.name + ".kernel"), r.kernels);
        add_in_place(grads.at(l.name + ".bias"), r.bias);
        g = std::move(r.input);
        break;
      }
      case LayerKind::kMaxPool:
        g = maxpool2x2_backward(c.input.shape(), c.argmax, g);
        break;
      case LayerKind::kRelu:
        g = relu_backward(c.input, g);
        break;
      case LayerKind::kDropout:
        g = dropout_backward(c.mask, g);
        break;
      case LayerKind::kFlatten:
        g = reshape(g, c.input.shape());
        break;
      case LayerKind::kDense: {
        DenseGrads r = dense_backward(c.input, params.at(l.name + ".weight"), c.output, g,
                                      l.activation);
        add_in_place(grads.at(l.name + ".weight"), r.weights);
        add_in_place(grads.at(l.name + ".bias"), r.bias);
        g = std::move(r.input);
        break;
      }
      case LayerKind::kLstm: {
        LstmGrads r = lstm_backward(c.lstm, lstm_params(params, l.name), g);
        add_lstm_grads(grads, l.name, r.params);
        g = std::move(r.xs);
        break;
      }
      case LayerKind::kSoftmax:
        g = softmax_backward(c.output, g);
        break;
      case LayerKind::kMergeMul:
        throw UsageError("merge_mul cannot appear inside a sequential chain");
    }
  }
  return g;
}

ForwardTrace forward(const NetworkGraph& graph, const Tensor& rgb, const Tensor& gray,
                     bool training, Rng& rng) {
  const ArchSpec& a = graph.arch;
  if (rgb.rank() != 4 || rgb.extent(1) != a.rows || rgb.extent(2) != a.cols ||
      rgb.extent(3) != a.channels) {
    throw DimensionError("forward: rgb batch " + shape_string(rgb.shape()) + " does not match " +
                         shape_string({a.rows, a.cols, a.channels}) + " input");
  }
  const std::size_t batch = rgb.extent(0);
  if (graph.has_rnn() && gray.shape() != Shape{batch, a.rows, a.cols}) {
    throw DimensionError("forward: gray batch " + shape_string(gray.shape()) +
                         " does not pair with rgb batch " + shape_string(rgb.shape()));
  }

  ForwardTrace trace;
  trace.training = training;
  trace.graph_hash = graph.structure_hash();
  trace.items.resize(batch);
  trace.logits = Tensor({batch, graph.classes});
  trace.probs = Tensor({batch, graph.classes});
  const std::uint64_t base = training ? rng.next_u64() : 0;

  const std::span<const LayerSpec> head(graph.head);
  const bool merged = !head.empty() && head.front().kind == LayerKind::kMergeMul;
  const std::span<const LayerSpec> tail = merged ? head.subspan(1) : head;

  for (std::size_t i = 0; i < batch; ++i) {
    Rng item_rng(Rng::derive(base, i));
    ItemTrace& it = trace.items[i];
    it.cnn_out = forward_layers(graph.cnn, graph.params, slice_leading(rgb, i), training,
                                item_rng, it.cnn);
    Tensor joined = it.cnn_out;
    if (graph.has_rnn()) {
      it.rnn_out = forward_layers(graph.rnn, graph.params, slice_leading(gray, i), training,
                                  item_rng, it.rnn);
      if (merged) joined = merge_mul_forward(it.cnn_out, it.rnn_out);
    }
    std::vector<LayerCache> tail_caches;
    const Tensor probs = forward_layers(tail, graph.params, joined, training, item_rng, tail_caches);
    if (merged) {
      LayerCache mc;
      mc.input = it.cnn_out;
      mc.output = joined;
      it.head.push_back(std::move(mc));
    }
    for (LayerCache& c : tail_caches) it.head.push_back(std::move(c));

    const Tensor& logits = it.head.back().input;
    std::copy(logits.values().begin(), logits.values().end(),
              trace.logits.data() + i * graph.classes);
    std::copy(probs.values().begin(), probs.values().end(), trace.probs.data() + i * graph.classes);
  }
  return trace;
}

ParamStore backward_from_logits(const NetworkGraph& graph, const ForwardTrace& trace,
                                const Tensor& grad_logits) {
  if (trace.graph_hash != graph.structure_hash()) {
    throw UsageError("backward: trace was produced by a different graph");
  }
  const std::size_t batch = trace.items.size();
  if (grad_logits.shape() != Shape{batch, graph.classes}) {
    throw DimensionError("backward: logit gradient " + shape_string(grad_logits.shape()) +
                         " expected " + shape_string({batch, graph.classes}));
  }
  const std::span<const LayerSpec> head(graph.head);
  const bool merged = head.front().kind == LayerKind::kMergeMul;
  const std::size_t first = merged ? 1 : 0;
  // The final softmax is folded into the incoming logit gradient.
  const auto tail = head.subspan(first, head.size() - first - 1);

  ParamStore grads = graph.params.zeros_like();
  for (std::size_t i = 0; i < batch; ++i) {
    const ItemTrace& it = trace.items[i];
    if (it.head.size() != head.size()) throw UsageError("backward: trace/graph layer mismatch");
    Tensor g({graph.classes}, std::vector<double>(grad_logits.data() + i * graph.classes,
                                                  grad_logits.data() + (i + 1) * graph.classes));
    const std::span<const LayerCache> caches(it.head);
    Tensor g_joined =
        backward_layers(tail, caches.subspan(first, tail.size()), graph.params, g, grads);
    Tensor g_cnn = g_joined;
    if (merged) {
      MergeGrads m = merge_mul_backward(it.cnn_out, it.rnn_out, g_joined);
      g_cnn = std::move(m.a);
      backward_layers(graph.rnn, it.rnn, graph.params, m.b, grads);
    }
    backward_layers(graph.cnn, it.cnn, graph.params, g_cnn, grads);
  }
  return grads;
}

ParamStore backward(const NetworkGraph& graph, const ForwardTrace& trace, const Tensor& onehot) {
  if (!trace.training) throw UsageError("backward: trace comes from an inference-mode forward");
  return backward_from_logits(graph, trace, cross_entropy(trace.probs, onehot).grad_logits);
}

std::vector<std::size_t> predict(const NetworkGraph& graph, const Tensor& rgb, const Tensor& gray) {
  Rng unused(0);
  const ForwardTrace trace = forward(graph, rgb, gray, false, unused);
  std::vector<std::size_t> out(trace.items.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = argmax(std::span<const double>(trace.probs.data() + i * graph.classes, graph.classes));
  }
  return out;
}

void round_params_to_float(NetworkGraph& graph) {
  for (auto& e : graph.params.entries()) {
    for (double& v : e.value.values()) v = static_cast<double>(static_cast<float>(v));
  }
}

std::string describe(const NetworkGraph& graph) {
  std::ostringstream out;
  out << "architecture " << architecture_name(graph.architecture) << ", " << graph.classes
      << " classes, input " << graph.arch.rows << "x" << graph.arch.cols << "x"
      << graph.arch.channels << "\n";
  auto emit = [&](const std::vector<LayerSpec>& layers, Shape shape) {
    for (const LayerSpec& l : layers) {
      shape = infer_output(l, shape);
      out << "  " << l.name << "  " << layer_kind_name(l.kind) << "  out "
          << shape_string(shape) << "  params " << layer_param_count(l, graph.params) << "\n";
    }
    return shape;
  };
  Shape joined = emit(graph.cnn, {graph.arch.rows, graph.arch.cols, graph.arch.channels});
  if (graph.has_rnn()) emit(graph.rnn, {graph.arch.rows, graph.arch.cols});
  emit(graph.head, joined);
  for (const auto& e : graph.params.entries()) {
    out << "  param " << e.name << " " << shape_string(e.value.shape()) << " " << e.value.size()
        << "\n";
  }
  out << "total parameters " << graph.params.parameter_count() << "\n";
  return out.str();
}

}  // namespace hcrn
