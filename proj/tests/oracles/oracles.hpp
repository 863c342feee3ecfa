#pragma once

// Direct-definition reference implementations used only by tests. They are
// written with multi-index access and plain loops and never call the
// library's kernels, so they stay independent of the code they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hcrn/lstm.hpp"
#include "hcrn/tensor.hpp"

namespace hcrn::oracle {

inline Tensor random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  const std::size_t m = a.extent(0), k = a.extent(1), n = b.extent(1);
  Tensor c({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a.at({i, p}) * b.at({p, j});
      c.at({i, j}) = acc;
    }
  }
  return c;
}

inline Tensor conv2d(const Tensor& in, const Tensor& k, const Tensor& bias) {
  const std::size_t h = in.extent(0), w = in.extent(1), cin = in.extent(2);
  const std::size_t kh = k.extent(0), kw = k.extent(1), cout = k.extent(3);
  Tensor out({h - kh + 1, w - kw + 1, cout});
  for (std::size_t y = 0; y + kh <= h; ++y)
    for (std::size_t x = 0; x + kw <= w; ++x)
      for (std::size_t o = 0; o < cout; ++o) {
        double acc = bias.at({o});
        for (std::size_t dy = 0; dy < kh; ++dy)
          for (std::size_t dx = 0; dx < kw; ++dx)
            for (std::size_t c = 0; c < cin; ++c)
              acc += in.at({y + dy, x + dx, c}) * k.at({dy, dx, c, o});
        out.at({y, x, o}) = acc;
      }
  return out;
}

inline Tensor maxpool2x2(const Tensor& in) {
  const std::size_t oh = in.extent(0) / 2, ow = in.extent(1) / 2, c = in.extent(2);
  Tensor out({oh, ow, c});
  for (std::size_t y = 0; y < oh; ++y)
    for (std::size_t x = 0; x < ow; ++x)
      for (std::size_t ch = 0; ch < c; ++ch) {
        double best = -INFINITY;
        for (std::size_t dy = 0; dy < 2; ++dy)
          for (std::size_t dx = 0; dx < 2; ++dx)
            best = std::max(best, in.at({2 * y + dy, 2 * x + dx, ch}));
        out.at({y, x, ch}) = best;
      }
  return out;
}

inline Tensor dense(const Tensor& x, const Tensor& w, const Tensor& b, bool relu) {
  Tensor out({w.extent(0)});
  for (std::size_t i = 0; i < w.extent(0); ++i) {
    double acc = b.at({i});
    for (std::size_t j = 0; j < w.extent(1); ++j) acc += w.at({i, j}) * x.at({j});
    out.at({i}) = relu ? std::max(acc, 0.0) : acc;
  }
  return out;
}

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// One timestep computed scalar by scalar straight from the gate equations.
inline void lstm_step(const std::vector<double>& x, std::vector<double>& h,
                      std::vector<double>& c, const LstmParams& p) {
  const std::size_t hidden = h.size();
  auto pre = [&](const Tensor& w, const Tensor& b, std::size_t j) {
    double z = b.at({j});
    for (std::size_t q = 0; q < hidden; ++q) z += w.at({j, q}) * h[q];
    for (std::size_t q = 0; q < x.size(); ++q) z += w.at({j, hidden + q}) * x[q];
    return z;
  };
  std::vector<double> h_new(hidden), c_new(hidden);
  for (std::size_t j = 0; j < hidden; ++j) {
    const double f = logistic(pre(p.w_forget, p.b_forget, j));
    const double i = logistic(pre(p.w_input, p.b_input, j));
    const double cand = std::tanh(pre(p.w_candidate, p.b_candidate, j));
    const double o = logistic(pre(p.w_output, p.b_output, j));
    c_new[j] = f * c[j] + i * cand;
    h_new[j] = o * std::tanh(c_new[j]);
  }
  h = h_new;
  c = c_new;
}

/// Unrolled sequence: returns every h_t, row by row.
inline std::vector<std::vector<double>> lstm_sequence(const Tensor& xs, const LstmParams& p) {
  std::vector<double> h(p.b_forget.size(), 0.0), c(p.b_forget.size(), 0.0);
  std::vector<std::vector<double>> hs;
  for (std::size_t t = 0; t < xs.extent(0); ++t) {
    std::vector<double> x(xs.extent(1));
    for (std::size_t q = 0; q < x.size(); ++q) x[q] = xs.at({t, q});
    lstm_step(x, h, c, p);
    hs.push_back(h);
  }
  return hs;
}

/// Adadelta written against plain vectors.
struct AdadeltaScalar {
  std::vector<double> eg2, edx2;
  double rho, eps, lr;

  AdadeltaScalar(std::size_t n, double rho_, double eps_, double lr_)
      : eg2(n, 0.0), edx2(n, 0.0), rho(rho_), eps(eps_), lr(lr_) {}

  void step(std::vector<double>& param, const std::vector<double>& grad) {
    for (std::size_t i = 0; i < param.size(); ++i) {
      eg2[i] = rho * eg2[i] + (1.0 - rho) * (grad[i] * grad[i]);
      const double rms_dx = std::sqrt(edx2[i] + eps);
      const double rms_g = std::sqrt(eg2[i] + eps);
      const double update = -(rms_dx / rms_g) * grad[i];
      edx2[i] = rho * edx2[i] + (1.0 - rho) * (update * update);
      param[i] += lr * update;
    }
  }
};

/// Bilinear sample of channel ch at fractional source coordinates with
/// edge clamping.
inline double bilinear_sample(const Tensor& img, double sy, double sx, std::size_t ch) {
  const double maxy = static_cast<double>(img.extent(0) - 1);
  const double maxx = static_cast<double>(img.extent(1) - 1);
  sy = std::clamp(sy, 0.0, maxy);
  sx = std::clamp(sx, 0.0, maxx);
  const auto y0 = static_cast<std::size_t>(std::floor(sy));
  const auto x0 = static_cast<std::size_t>(std::floor(sx));
  const std::size_t y1 = std::min(y0 + 1, img.extent(0) - 1);
  const std::size_t x1 = std::min(x0 + 1, img.extent(1) - 1);
  const double fy = sy - static_cast<double>(y0), fx = sx - static_cast<double>(x0);
  const double top = img.at({y0, x0, ch}) * (1 - fx) + img.at({y0, x1, ch}) * fx;
  const double bot = img.at({y1, x0, ch}) * (1 - fx) + img.at({y1, x1, ch}) * fx;
  return top * (1 - fy) + bot * fy;
}

}  // namespace hcrn::oracle
