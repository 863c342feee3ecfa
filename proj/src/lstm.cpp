#include "hcrn/lstm.hpp"

#include <cmath>

#include "hcrn/error.hpp"
#include "hcrn/kernels.hpp"

namespace hcrn {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// act(W * v + b), one output per row of W.
template <typename Fn>
Tensor gate(const Tensor& w, const Tensor& b, const Tensor& v, Fn act) {
  const std::size_t rows = w.extent(0), cols = w.extent(1);
  const auto& kt = kernels::active();
  Tensor out({rows});
  for (std::size_t r = 0; r < rows; ++r) out[r] = act(b[r] + kt.dot(w.data() + r * cols, v.data(), cols));
  return out;
}

// dW += dz (outer) v, db += dz, dv += W^T dz
void gate_backward(const Tensor& w, const Tensor& v, const Tensor& dz, Tensor& dw,
                   Tensor& db, Tensor& dv) {
  const std::size_t rows = w.extent(0), cols = w.extent(1);
  const auto& kt = kernels::active();
  for (std::size_t r = 0; r < rows; ++r) {
    db[r] += dz[r];
    kt.axpy(dz[r], v.data(), dw.data() + r * cols, cols);
    kt.axpy(dz[r], w.data() + r * cols, dv.data(), cols);
  }
}

}  // namespace

LstmParams LstmParams::zeros(std::size_t input, std::size_t hidden) {
  const Shape w{hidden, hidden + input};
  const Shape b{hidden};
  return {Tensor(w), Tensor(w), Tensor(w), Tensor(w), Tensor(b), Tensor(b), Tensor(b), Tensor(b)};
}

void LstmParams::validate() const {
  const Shape& ws = w_forget.shape();
  const Shape& bs = b_forget.shape();
  bool ok = ws.size() == 2 && bs.size() == 1 && ws[0] == bs[0] && ws[1] > bs[0];
  for (const Tensor* t : {&w_input, &w_candidate, &w_output}) ok = ok && t->shape() == ws;
  for (const Tensor* t : {&b_input, &b_candidate, &b_output}) ok = ok && t->shape() == bs;
  if (!ok) {
    throw DimensionError("lstm: inconsistent parameter shapes (W " + shape_string(ws) + ", b " +
                         shape_string(bs) + ")");
  }
}

LstmState LstmState::zeros(std::size_t hidden) { return {Tensor({hidden}), Tensor({hidden})}; }

LstmStepResult lstm_step(const Tensor& x, const LstmState& prev, const LstmParams& params) {
  params.validate();
  const std::size_t hidden = params.hidden();
  const std::size_t input = params.input();
  if (x.shape() != Shape{input} || prev.h.shape() != Shape{hidden} ||
      prev.c.shape() != Shape{hidden}) {
    throw DimensionError("lstm_step: x " + shape_string(x.shape()) + ", h " +
                         shape_string(prev.h.shape()) + ", C " + shape_string(prev.c.shape()) +
                         " do not fit hidden=" + std::to_string(hidden) +
                         " input=" + std::to_string(input));
  }

  LstmStepResult r;
  LstmStepCache& k = r.cache;
  k.concat = Tensor({hidden + input});
  std::copy(prev.h.values().begin(), prev.h.values().end(), k.concat.data());
  std::copy(x.values().begin(), x.values().end(), k.concat.data() + hidden);
  k.c_prev = prev.c;

  auto tanh_fn = [](double z) { return std::tanh(z); };
  k.forget = gate(params.w_forget, params.b_forget, k.concat, sigmoid);
  k.input = gate(params.w_input, params.b_input, k.concat, sigmoid);
  k.candidate = gate(params.w_candidate, params.b_candidate, k.concat, tanh_fn);
  k.output = gate(params.w_output, params.b_output, k.concat, sigmoid);

  k.c = Tensor({hidden});
  k.tanh_c = Tensor({hidden});
  Tensor h({hidden});
  for (std::size_t j = 0; j < hidden; ++j) {
    k.c[j] = k.forget[j] * prev.c[j] + k.input[j] * k.candidate[j];
    k.tanh_c[j] = std::tanh(k.c[j]);
    h[j] = k.output[j] * k.tanh_c[j];
  }
  r.state = LstmState{std::move(h), k.c};
  return r;
}

LstmSequenceResult lstm_sequence_forward(const Tensor& xs, const LstmParams& params,
                                         bool return_sequence) {
  if (xs.rank() != 2) {
    throw DimensionError("lstm_sequence_forward: expected [T x d], got " + shape_string(xs.shape()));
  }
  params.validate();
  const std::size_t steps = xs.extent(0), features = xs.extent(1);
  const std::size_t hidden = params.hidden();

  LstmSequenceResult r;
  r.cache.return_sequence = return_sequence;
  r.cache.input_features = features;
  r.cache.steps.reserve(steps);
  r.output = return_sequence ? Tensor({steps, hidden}) : Tensor({hidden});

  LstmState state = LstmState::zeros(hidden);
  for (std::size_t t = 0; t < steps; ++t) {
    Tensor x({features}, std::vector<double>(xs.data() + t * features,
                                             xs.data() + (t + 1) * features));
    LstmStepResult step = lstm_step(x, state, params);
    state = std::move(step.state);
    if (return_sequence) {
      std::copy(state.h.values().begin(), state.h.values().end(),
                r.output.data() + t * hidden);
    }
    r.cache.steps.push_back(std::move(step.cache));
  }
  if (!return_sequence) r.output = state.h;
  return r;
}

LstmGrads lstm_backward(const LstmSequenceCache& cache, const LstmParams& params,
                        const Tensor& grad_out) {
  if (cache.steps.empty()) throw UsageError("lstm_backward: empty forward cache");
  params.validate();
  const std::size_t steps = cache.steps.size();
  const std::size_t hidden = params.hidden();
  const std::size_t input = params.input();
  if (cache.input_features != input || cache.steps.front().concat.size() != hidden + input) {
    throw UsageError("lstm_backward: cache was produced with different parameters");
  }
  const Shape expect = cache.return_sequence ? Shape{steps, hidden} : Shape{hidden};
  if (grad_out.shape() != expect) {
    throw DimensionError("lstm_backward: grad_out " + shape_string(grad_out.shape()) +
                         " expected " + shape_string(expect));
  }

  LstmGrads g{Tensor({steps, input}), LstmParams::zeros(input, hidden)};
  Tensor dh_next({hidden});
  Tensor dc_next({hidden});
  Tensor dz_f({hidden}), dz_i({hidden}), dz_c({hidden}), dz_o({hidden});

  for (std::size_t t = steps; t-- > 0;) {
    const LstmStepCache& k = cache.steps[t];
    for (std::size_t j = 0; j < hidden; ++j) {
      double dh = dh_next[j];
      if (cache.return_sequence) {
        dh += grad_out[t * hidden + j];
      } else if (t + 1 == steps) {
        dh += grad_out[j];
      }
      const double o = k.output[j], f = k.forget[j], i = k.input[j], cand = k.candidate[j];
      const double tc = k.tanh_c[j];
      const double dc = dh * o * (1.0 - tc * tc) + dc_next[j];
      dz_o[j] = dh * tc * o * (1.0 - o);
      dz_f[j] = dc * k.c_prev[j] * f * (1.0 - f);
      dz_i[j] = dc * cand * i * (1.0 - i);
      dz_c[j] = dc * i * (1.0 - cand * cand);
      dc_next[j] = dc * f;
    }

    Tensor dconcat({hidden + input});
    gate_backward(params.w_forget, k.concat, dz_f, g.params.w_forget, g.params.b_forget, dconcat);
    gate_backward(params.w_input, k.concat, dz_i, g.params.w_input, g.params.b_input, dconcat);
    gate_backward(params.w_candidate, k.concat, dz_c, g.params.w_candidate,
                  g.params.b_candidate, dconcat);
    gate_backward(params.w_output, k.concat, dz_o, g.params.w_output, g.params.b_output, dconcat);

    std::copy(dconcat.data(), dconcat.data() + hidden, dh_next.data());
    std::copy(dconcat.data() + hidden, dconcat.data() + hidden + input, g.xs.data() + t * input);
  }
  return g;
}

}  // namespace hcrn
