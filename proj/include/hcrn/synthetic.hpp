#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "hcrn/dataset.hpp"

namespace hcrn {

struct SyntheticSpec {
  std::size_t count = 32;
  std::size_t rows = 12;
  std::size_t cols = 16;
  std::uint64_t seed = 0;
  /// Pixel noise amplitude added on top of the class pattern.
  double noise = 0.15;
};

/// Images whose class is the top-to-bottom order of three horizontal
/// stripes placed at a random height, so reading the rows as a sequence is
/// informative. Labels cycle through the
/// four cell types in a seeded order; every class gets count/4 items (plus
/// one for the first count%4 classes).
std::vector<LabeledImage> make_synthetic(const SyntheticSpec& spec);

/// Writes images as root/SPLIT/CLASS/NNNNN.ppm.
void write_dataset(const std::filesystem::path& root, Split split,
                   const std::vector<LabeledImage>& images);

}  // namespace hcrn
