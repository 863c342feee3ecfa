#pragma once

#include <cstdint>

#include "hcrn/dataset.hpp"
#include "hcrn/rng.hpp"
#include "hcrn/tensor.hpp"

namespace hcrn {

/// Random reflection, rotation and shift. There is deliberately no scale
/// parameter.
struct AugmentSpec {
  double rotation_deg = 20.0;        // angle drawn from [-r, r]
  double reflect_probability = 0.5;  // flip about the horizontal axis
  double shift_fraction = 0.1;       // of each extent, rounded to whole pixels
  std::uint64_t seed = 0;

  void validate() const;  // ConfigError

  /// Spec that leaves every image untouched.
  static AugmentSpec identity() { return {0.0, 0.0, 0.0, 0}; }

  bool operator==(const AugmentSpec&) const = default;
};

/// The concrete transform chosen for one image.
struct AugmentDraw {
  bool reflect = false;
  double angle_deg = 0.0;
  std::int64_t shift_rows = 0;
  std::int64_t shift_cols = 0;
};

/// Always consumes four values from `rng`, whatever the spec.
AugmentDraw draw_augment(const AugmentSpec& spec, Rng& rng, std::size_t rows, std::size_t cols);

/// Reflect, then rotate about the centre (bilinear), then shift. Vacated
/// pixels copy the nearest edge. Output is clamped to [0, 1].
Tensor apply_augment(const Tensor& image, const AugmentDraw& draw);

LabeledImage augment(const LabeledImage& image, const AugmentSpec& spec, Rng& rng);

}  // namespace hcrn
