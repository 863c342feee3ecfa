#include "hcrn/trainer.hpp"

#include <cstdio>

#include "hcrn/checkpoint.hpp"
#include "hcrn/error.hpp"
#include "hcrn/loss.hpp"

namespace hcrn {
namespace {

std::size_t count_correct(const Tensor& probs, const Tensor& onehot) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < probs.extent(0); ++i) {
    n += argmax(slice_leading(probs, i)) == argmax(slice_leading(onehot, i));
  }
  return n;
}

}  // namespace

Evaluation evaluate(const NetworkGraph& graph, std::span<const LabeledImage> data,
                    const LabelCodec& codec, std::size_t batch_size) {
  if (graph.classes != codec.classes()) {
    throw ConfigError("network has " + std::to_string(graph.classes) + " classes but task " +
                      task_name(codec.task()) + " needs " + std::to_string(codec.classes()));
  }
  Evaluation ev{0.0, ConfusionMatrix(codec.classes()), 0.0};
  if (data.empty()) return ev;
  Rng unused(0);
  double loss_sum = 0.0;
  for (const Batch& b : batches(data, codec, {batch_size, false, 0, std::nullopt}, 0)) {
    const ForwardTrace trace = forward(graph, b.rgb, b.gray, false, unused);
    loss_sum += cross_entropy(trace.probs, b.onehot).loss * static_cast<double>(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      ev.confusion.add(argmax(slice_leading(b.onehot, i)), argmax(slice_leading(trace.probs, i)));
    }
  }
  ev.accuracy = ev.confusion.accuracy();
  ev.mean_loss = loss_sum / static_cast<double>(data.size());
  return ev;
}

Trainer::Trainer(TrainConfig config, std::span<const LabeledImage> train,
                 std::span<const LabeledImage> test)
    : config_(std::move(config)), train_(train), test_(test), codec_(config_.task) {
  config_.validate();
  if (train_.empty()) throw DatasetError("training split is empty");
  Rng init(config_.init_seed());
  graph_ = build_network(config_.architecture, init, codec_.classes(), config_.arch);
  for (const auto& e : graph_.params.entries()) {
    optimizer_.push_back(AdadeltaState::fresh(e.value.shape(), config_.optimizer));
  }
}

std::vector<EpochMetrics> Trainer::run_epoch() {
  const std::size_t epoch = epoch_++;
  BatchOptions opts{config_.batch_size, true, config_.shuffle_seed(), std::nullopt};
  if (config_.augment) {
    AugmentSpec spec = config_.augment_spec;
    spec.seed = config_.augment_seed();
    opts.augment = spec;
  }
  BatchIterator it(train_, codec_, opts, epoch);
  double loss_sum = 0.0;
  std::size_t correct = 0, seen = 0, batch_index = 0;
  Batch b;
  while (it.next(b)) {
    Rng dropout(Rng::derive(config_.dropout_seed(), epoch, batch_index++));
    const ForwardTrace trace = forward(graph_, b.rgb, b.gray, true, dropout);
    const LossReport loss = cross_entropy(trace.probs, b.onehot);
    const ParamStore grads = backward_from_logits(graph_, trace, loss.grad_logits);
    auto& params = graph_.params.entries();
    const auto& g = grads.entries();
    for (std::size_t k = 0; k < params.size(); ++k) adadelta_step(params[k].value, g[k].value, optimizer_[k]);
    loss_sum += loss.loss * static_cast<double>(b.size());
    correct += count_correct(trace.probs, b.onehot);
    seen += b.size();
  }
  std::vector<EpochMetrics> rows;
  rows.push_back({epoch + 1, Split::kTrain, loss_sum / static_cast<double>(seen),
                  static_cast<double>(correct) / static_cast<double>(seen)});
  if (config_.evaluate_test && !test_.empty()) {
    const Evaluation ev = evaluate(graph_, test_, codec_, config_.batch_size);
    rows.push_back({epoch + 1, Split::kTest, ev.mean_loss, ev.accuracy});
  }
  return rows;
}

TrainResult train_in_memory(const TrainConfig& config, std::span<const LabeledImage> train,
                            std::span<const LabeledImage> test, const EpochObserver& observer) {
  Trainer trainer(config, train, test);
  TrainResult result;
  for (std::size_t e = 0; e < config.epochs; ++e) {
    const auto rows = trainer.run_epoch();
    result.metrics.insert(result.metrics.end(), rows.begin(), rows.end());
    if (observer && !observer(trainer.graph(), rows)) break;
  }
  result.graph = trainer.graph();
  return result;
}

TrainResult train(const TrainConfig& config) {
  config.validate();
  if (config.data.empty()) throw ConfigError("no dataset root given");
  if (config.out.empty()) throw ConfigError("no output directory given");
  const LoadOptions load{std::pair{config.arch.rows, config.arch.cols}};
  const auto train_set = load_dataset(config.data, Split::kTrain, load);
  std::vector<LabeledImage> test_set;
  if (config.evaluate_test && split_exists(config.data, Split::kTest)) {
    test_set = load_dataset(config.data, Split::kTest, load);
  }

  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec || !std::filesystem::is_directory(config.out)) {
    throw IoError("cannot create output directory '" + config.out.string() + "'");
  }
  MetricsWriter writer(config.out / "metrics.csv");
  EpochObserver observer = [&](const NetworkGraph& graph, std::span<const EpochMetrics> rows) {
    for (const auto& r : rows) writer.append(r);
    if (config.checkpoint_every_epoch) {
      char name[32];
      std::snprintf(name, sizeof name, "model_epoch%03zu.ckpt", rows.front().epoch);
      save_checkpoint(config.out / name, graph, config);
    }
    return true;
  };
  TrainResult result = train_in_memory(config, train_set, test_set, observer);
  save_checkpoint(config.out / "model.ckpt", result.graph, config);

  const LabelCodec codec(config.task);
  const auto& final_split = test_set.empty() ? train_set : test_set;
  const Evaluation ev = evaluate(result.graph, final_split, codec, config.batch_size);
  write_text(config.out / confusion_filename(config.architecture, config.task),
             confusion_csv(ev.confusion, codec.class_names()));
  write_summary(config.out);
  return result;
}

}  // namespace hcrn
