#include "hcrn/synthetic.hpp"

#include <algorithm>
#include <cstdio>

#include "hcrn/error.hpp"
#include "hcrn/image.hpp"
#include "hcrn/rng.hpp"

namespace hcrn {
namespace {

// Three stripes drawn top to bottom in a class-specific order at a random
// vertical offset. Every class uses the same three levels, so only their
// order tells the classes apart.
constexpr double kStripeLevels[3] = {0.95, 0.6, 0.05};
constexpr std::size_t kStripeOrder[4][3] = {{0, 1, 2}, {2, 1, 0}, {1, 0, 2}, {2, 0, 1}};
constexpr double kBackground = 0.3;

}  // namespace

std::vector<LabeledImage> make_synthetic(const SyntheticSpec& spec) {
  if (spec.rows < 6 || spec.cols < 1) throw ConfigError("synthetic images need at least 6 rows");
  Rng rng(spec.seed);
  std::vector<std::size_t> labels(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) labels[i] = i % 4;
  for (std::size_t i = spec.count; i > 1; --i) std::swap(labels[i - 1], labels[rng.below(i)]);

  std::vector<LabeledImage> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    const std::size_t k = labels[i];
    const double tint[3] = {rng.uniform(0.8, 1.0), rng.uniform(0.8, 1.0), rng.uniform(0.8, 1.0)};
    const std::size_t thick = spec.rows / 6;
    const std::size_t offset = rng.below(spec.rows - 3 * thick + 1);
    Tensor px({spec.rows, spec.cols, 3});
    for (std::size_t y = 0; y < spec.rows; ++y) {
      double level = kBackground;
      if (y >= offset && y < offset + 3 * thick) level = kStripeLevels[kStripeOrder[k][(y - offset) / thick]];
      for (std::size_t x = 0; x < spec.cols; ++x) {
        for (std::size_t c = 0; c < 3; ++c) {
          const double v = level * tint[c] + spec.noise * (2.0 * rng.uniform() - 1.0);
          px[(y * spec.cols + x) * 3 + c] = std::clamp(v, 0.0, 1.0);
        }
      }
    }
    char name[32];
    std::snprintf(name, sizeof name, "synthetic/%05zu", i);
    out.push_back({std::move(px), kCellTypes[k], name});
  }
  return out;
}

void write_dataset(const std::filesystem::path& root, Split split,
                   const std::vector<LabeledImage>& images) {
  std::size_t i = 0;
  for (const auto& img : images) {
    const auto dir = root / split_directory(split) / cell_type_name(img.label);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
    char name[32];
    std::snprintf(name, sizeof name, "%05zu.ppm", i++);
    write_ppm(dir / name, to_raw(img.pixels));
  }
}

}  // namespace hcrn
