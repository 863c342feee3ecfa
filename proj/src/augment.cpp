#include "hcrn/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hcrn/error.hpp"

namespace hcrn {

void AugmentSpec::validate() const {
  if (!(rotation_deg >= 0.0 && rotation_deg <= 180.0)) {
    throw ConfigError("augment rotation must lie in [0, 180] degrees");
  }
  if (!(reflect_probability >= 0.0 && reflect_probability <= 1.0)) {
    throw ConfigError("augment reflect probability must lie in [0, 1]");
  }
  if (!(shift_fraction >= 0.0 && shift_fraction < 1.0)) {
    throw ConfigError("augment shift fraction must lie in [0, 1)");
  }
}

AugmentDraw draw_augment(const AugmentSpec& spec, Rng& rng, std::size_t rows, std::size_t cols) {
  AugmentDraw d;
  d.reflect = rng.bernoulli(spec.reflect_probability);
  const double u = rng.uniform();
  d.angle_deg = spec.rotation_deg * (2.0 * u - 1.0);
  const auto max_r = static_cast<std::int64_t>(std::floor(spec.shift_fraction * static_cast<double>(rows)));
  const auto max_c = static_cast<std::int64_t>(std::floor(spec.shift_fraction * static_cast<double>(cols)));
  d.shift_rows = rng.between(-max_r, max_r);
  d.shift_cols = rng.between(-max_c, max_c);
  return d;
}

namespace {

Tensor reflect_rows(const Tensor& img) {
  const std::size_t rows = img.extent(0), stride = img.extent(1) * img.extent(2);
  Tensor out(img.shape());
  for (std::size_t y = 0; y < rows; ++y) {
    std::copy_n(img.data() + (rows - 1 - y) * stride, stride, out.data() + y * stride);
  }
  return out;
}

Tensor rotate(const Tensor& img, double angle_deg) {
  const std::size_t rows = img.extent(0), cols = img.extent(1), ch = img.extent(2);
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double cs = std::cos(theta), sn = std::sin(theta);
  const double cy = 0.5 * static_cast<double>(rows - 1), cx = 0.5 * static_cast<double>(cols - 1);
  const double ymax = static_cast<double>(rows - 1), xmax = static_cast<double>(cols - 1);
  Tensor out(img.shape());
  const double* src = img.data();
  for (std::size_t y = 0; y < rows; ++y) {
    for (std::size_t x = 0; x < cols; ++x) {
      const double dy = static_cast<double>(y) - cy, dx = static_cast<double>(x) - cx;
      const double sy = std::clamp(cy + cs * dy - sn * dx, 0.0, ymax);
      const double sx = std::clamp(cx + sn * dy + cs * dx, 0.0, xmax);
      const auto y0 = static_cast<std::size_t>(std::floor(sy));
      const auto x0 = static_cast<std::size_t>(std::floor(sx));
      const std::size_t y1 = std::min(y0 + 1, rows - 1), x1 = std::min(x0 + 1, cols - 1);
      const double fy = sy - static_cast<double>(y0), fx = sx - static_cast<double>(x0);
      for (std::size_t c = 0; c < ch; ++c) {
        const double top = src[(y0 * cols + x0) * ch + c] * (1.0 - fx) + src[(y0 * cols + x1) * ch + c] * fx;
        const double bot = src[(y1 * cols + x0) * ch + c] * (1.0 - fx) + src[(y1 * cols + x1) * ch + c] * fx;
        out[(y * cols + x) * ch + c] = top * (1.0 - fy) + bot * fy;
      }
    }
  }
  return out;
}

Tensor shift(const Tensor& img, std::int64_t dr, std::int64_t dc) {
  const auto rows = static_cast<std::int64_t>(img.extent(0));
  const auto cols = static_cast<std::int64_t>(img.extent(1));
  const std::size_t ch = img.extent(2);
  Tensor out(img.shape());
  for (std::int64_t y = 0; y < rows; ++y) {
    const auto sy = static_cast<std::size_t>(std::clamp<std::int64_t>(y - dr, 0, rows - 1));
    for (std::int64_t x = 0; x < cols; ++x) {
      const auto sx = static_cast<std::size_t>(std::clamp<std::int64_t>(x - dc, 0, cols - 1));
      std::copy_n(img.data() + (sy * img.extent(1) + sx) * ch, ch,
                  out.data() + (static_cast<std::size_t>(y) * img.extent(1) + static_cast<std::size_t>(x)) * ch);
    }
  }
  return out;
}

}  // namespace

Tensor apply_augment(const Tensor& image, const AugmentDraw& draw) {
  if (image.rank() != 3) {
    throw DimensionError("augment: expected [HxWxC], got " + shape_string(image.shape()));
  }
  Tensor out = draw.reflect ? reflect_rows(image) : image;
  if (draw.angle_deg != 0.0) out = rotate(out, draw.angle_deg);
  if (draw.shift_rows != 0 || draw.shift_cols != 0) out = shift(out, draw.shift_rows, draw.shift_cols);
  for (double& v : out.values()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

LabeledImage augment(const LabeledImage& image, const AugmentSpec& spec, Rng& rng) {
  spec.validate();
  const AugmentDraw d = draw_augment(spec, rng, image.pixels.extent(0), image.pixels.extent(1));
  return {apply_augment(image.pixels, d), image.label, image.source};
}

}  // namespace hcrn
