#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hcrn/augment.hpp"
#include "hcrn/dataset.hpp"
#include "hcrn/tensor.hpp"

namespace hcrn {

struct Batch {
  Tensor rgb;     // [B x H x W x 3]
  Tensor gray;    // [B x H x W], to_grayscale of each rgb item
  Tensor onehot;  // [B x c]
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }
};

struct BatchOptions {
  std::size_t batch_size = 32;
  bool shuffle = true;
  std::uint64_t shuffle_seed = 0;
  std::optional<AugmentSpec> augment;
};

/// Stacks the given dataset items. With `augment`, item i is transformed
/// with a stream derived from (augment seed, epoch, i).
Batch make_batch(std::span<const LabeledImage> dataset, std::span<const std::size_t> indices,
                 const LabelCodec& codec, const std::optional<AugmentSpec>& augment,
                 std::uint64_t epoch);

/// Seeded permutation of [0, n) for one epoch; identity when shuffle is off.
std::vector<std::size_t> epoch_order(std::size_t n, const BatchOptions& options, std::uint64_t epoch);

/// Walks one epoch in batches. The last batch may be short.
class BatchIterator {
 public:
  BatchIterator(std::span<const LabeledImage> dataset, const LabelCodec& codec,
                BatchOptions options, std::uint64_t epoch);

  bool next(Batch& out);
  std::size_t batch_count() const;
  const std::vector<std::size_t>& order() const { return order_; }

 private:
  std::span<const LabeledImage> dataset_;
  const LabelCodec& codec_;
  BatchOptions options_;
  std::uint64_t epoch_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

/// All batches of one epoch.
std::vector<Batch> batches(std::span<const LabeledImage> dataset, const LabelCodec& codec,
                           const BatchOptions& options, std::uint64_t epoch);

}  // namespace hcrn
