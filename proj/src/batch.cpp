#include "hcrn/batch.hpp"

#include <algorithm>
#include <numeric>

#include "hcrn/error.hpp"
#include "hcrn/image.hpp"
#include "hcrn/rng.hpp"

namespace hcrn {

Batch make_batch(std::span<const LabeledImage> dataset, std::span<const std::size_t> indices,
                 const LabelCodec& codec, const std::optional<AugmentSpec>& augment,
                 std::uint64_t epoch) {
  if (indices.empty()) throw UsageError("make_batch: no indices");
  if (augment) augment->validate();
  const Shape& first = dataset[indices[0]].pixels.shape();
  if (first.size() != 3 || first[2] != 3) {
    throw DimensionError("batch item must be [HxWx3], got " + shape_string(first));
  }
  const std::size_t rows = first[0], cols = first[1], n = indices.size();
  Batch b{Tensor({n, rows, cols, 3}), Tensor({n, rows, cols}), Tensor({n, codec.classes()}),
          {indices.begin(), indices.end()}};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = indices[k];
    if (i >= dataset.size()) throw UsageError("make_batch: index out of range");
    const LabeledImage& item = dataset[i];
    if (item.pixels.shape() != first) {
      throw DimensionError("batch items differ in shape: " + shape_string(item.pixels.shape()) +
                           " vs " + shape_string(first) + " ('" + item.source.string() + "')");
    }
    Tensor pixels = item.pixels;
    if (augment) {
      Rng rng(Rng::derive(augment->seed, epoch, i));
      pixels = apply_augment(pixels, draw_augment(*augment, rng, rows, cols));
    }
    assign_leading(b.rgb, k, pixels);
    assign_leading(b.gray, k, to_grayscale(pixels));
    assign_leading(b.onehot, k, codec.one_hot(item.label));
  }
  return b;
}

std::vector<std::size_t> epoch_order(std::size_t n, const BatchOptions& options, std::uint64_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (!options.shuffle) return order;
  Rng rng(Rng::derive(options.shuffle_seed, epoch));
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  return order;
}

BatchIterator::BatchIterator(std::span<const LabeledImage> dataset, const LabelCodec& codec,
                             BatchOptions options, std::uint64_t epoch)
    : dataset_(dataset), codec_(codec), options_(std::move(options)), epoch_(epoch) {
  if (dataset_.empty()) throw DatasetError("cannot batch an empty dataset");
  if (options_.batch_size == 0) throw ConfigError("batch size must be at least 1");
  order_ = epoch_order(dataset_.size(), options_, epoch_);
}

bool BatchIterator::next(Batch& out) {
  if (cursor_ >= order_.size()) return false;
  const std::size_t end = std::min(cursor_ + options_.batch_size, order_.size());
  out = make_batch(dataset_, std::span(order_).subspan(cursor_, end - cursor_), codec_,
                   options_.augment, epoch_);
  cursor_ = end;
  return true;
}

std::size_t BatchIterator::batch_count() const {
  return (order_.size() + options_.batch_size - 1) / options_.batch_size;
}

std::vector<Batch> batches(std::span<const LabeledImage> dataset, const LabelCodec& codec,
                           const BatchOptions& options, std::uint64_t epoch) {
  BatchIterator it(dataset, codec, options, epoch);
  std::vector<Batch> out;
  Batch b;
  while (it.next(b)) out.push_back(std::move(b));
  return out;
}

}  // namespace hcrn
