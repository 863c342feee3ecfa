#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hcrn/adadelta.hpp"
#include "hcrn/batch.hpp"
#include "hcrn/config.hpp"
#include "hcrn/model.hpp"
#include "hcrn/report.hpp"

namespace hcrn {

struct Evaluation {
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  double mean_loss = 0.0;
};

/// Inference-mode pass over `data` in its stored order, no augmentation.
/// ConfigError when the graph's class count differs from the codec's.
Evaluation evaluate(const NetworkGraph& graph, std::span<const LabeledImage> data,
                    const LabelCodec& codec, std::size_t batch_size = 32);

/// Called after every epoch with that epoch's rows. Returning false stops
/// training early.
using EpochObserver = std::function<bool(const NetworkGraph&, std::span<const EpochMetrics>)>;

struct TrainResult {
  NetworkGraph graph;
  std::vector<EpochMetrics> metrics;
};

/// Trainer over in-memory data. Writes nothing to disk.
class Trainer {
 public:
  Trainer(TrainConfig config, std::span<const LabeledImage> train,
          std::span<const LabeledImage> test = {});

  /// One pass over the training split; returns the epoch rows (train, then
  /// test when a test split is present and enabled).
  std::vector<EpochMetrics> run_epoch();

  std::size_t epochs_done() const { return epoch_; }
  const NetworkGraph& graph() const { return graph_; }
  const LabelCodec& codec() const { return codec_; }
  const TrainConfig& config() const { return config_; }

 private:
  TrainConfig config_;
  std::span<const LabeledImage> train_;
  std::span<const LabeledImage> test_;
  LabelCodec codec_;
  NetworkGraph graph_;
  std::vector<AdadeltaState> optimizer_;
  std::size_t epoch_ = 0;
};

TrainResult train_in_memory(const TrainConfig& config, std::span<const LabeledImage> train,
                            std::span<const LabeledImage> test = {},
                            const EpochObserver& observer = {});

/// Full run from disk: loads config.data, trains, and writes metrics.csv,
/// model.ckpt (plus model_epochNNN.ckpt when enabled), the confusion CSV for
/// the final evaluation and summary.txt into config.out.
TrainResult train(const TrainConfig& config);

}  // namespace hcrn
