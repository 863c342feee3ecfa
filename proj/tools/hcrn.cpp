#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hcrn/checkpoint.hpp"
#include "hcrn/config.hpp"
#include "hcrn/error.hpp"
#include "hcrn/kernels.hpp"
#include "hcrn/synthetic.hpp"
#include "hcrn/trainer.hpp"

namespace {

using namespace hcrn;

struct TrainFlags {
  std::string config_file;
  std::vector<std::pair<CLI::Option*, std::string>> settings;
  std::vector<std::string> extra;
};

int run_train(const TrainFlags& flags) {
  TrainConfig config;
  if (!flags.config_file.empty()) config = load_config(flags.config_file);
  for (const auto& [option, key] : flags.settings) {
    if (option->count() > 0) apply_setting(config, key, option->as<std::string>());
  }
  for (const std::string& kv : flags.extra) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  const TrainResult result = train(config);
  std::printf("trained %s %s for %zu epochs\n", architecture_name(config.architecture),
              task_name(config.task), config.epochs);
  if (!result.metrics.empty()) {
    const EpochMetrics& last = result.metrics.back();
    std::printf("final %s loss %.6f accuracy %.4f\n", split_name(last.split), last.loss, last.accuracy);
  }
  std::printf("wrote %s\n", (config.out / "model.ckpt").string().c_str());
  return 0;
}

int run_eval(const std::string& ckpt, const std::string& data, const std::string& split) {
  const Checkpoint ck = load_checkpoint(ckpt);
  const NetworkGraph graph = restore_graph(ck);
  const LabelCodec codec(ck.config.task);
  const auto images = load_dataset(data, parse_split(split),
                                   {std::pair{ck.config.arch.rows, ck.config.arch.cols}});
  const Evaluation ev = evaluate(graph, images, codec, ck.config.batch_size);
  std::printf("samples %zu\naccuracy %.6f\nloss %.6f\n", ev.confusion.total(), ev.accuracy, ev.mean_loss);
  std::fputs(confusion_csv(ev.confusion, codec.class_names()).c_str(), stdout);
  return 0;
}

int run_inspect(const std::string& ckpt) {
  const Checkpoint ck = load_checkpoint(ckpt);
  const NetworkGraph graph = restore_graph(ck);
  std::printf("task %s\n", task_name(ck.config.task));
  std::fputs(describe(graph).c_str(), stdout);
  return 0;
}

int run_synth(const std::string& out, std::size_t train_n, std::size_t test_n, std::size_t rows,
              std::size_t cols, std::uint64_t seed, double noise) {
  write_dataset(out, Split::kTrain, make_synthetic({train_n, rows, cols, seed, noise}));
  if (test_n > 0) write_dataset(out, Split::kTest, make_synthetic({test_n, rows, cols, seed + 1, noise}));
  std::printf("wrote %zu train and %zu test images under %s\n", train_n, test_n, out.c_str());
  return 0;
}

int fail(const char* code, const std::string& message, int status) {
  std::string line = message;
  for (char& ch : line) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  std::fprintf(stderr, "error[%s]: %s\n", code, line.c_str());
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blood cell classifier: CNN and CNN+LSTM hybrid trained with Adadelta"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hcrn 1.0");

  TrainFlags tf;
  auto* train_cmd = app.add_subcommand("train", "Train a network and write metrics and a checkpoint");
  train_cmd->add_option("--config", tf.config_file, "key=value config file; flags override it");
  auto setting = [&](const std::string& flag, const std::string& key, const std::string& help) {
    tf.settings.emplace_back(train_cmd->add_option(flag, help), key);
  };
  setting("--arch", "arch", "hybrid or cnn");
  setting("--task", "task", "4way or 2way");
  setting("--data", "data", "dataset root holding TRAIN/ and optionally TEST/");
  setting("--out", "out", "output directory");
  setting("--epochs", "epochs", "training epochs (default 70)");
  setting("--batch", "batch", "batch size (default 32)");
  setting("--lr", "lr", "Adadelta learning rate multiplier (default 1.0)");
  setting("--seed", "seed", "run seed (default 0)");
  setting("--preset", "preset", "architecture sizes: full or tiny");
  setting("--augment", "augment", "true or false");
  setting("--ckpt-every-epoch", "ckpt_every_epoch", "true or false");
  train_cmd->add_option("--set", tf.extra, "any config key as key=value (repeatable)");

  std::string ckpt, data, split = "test";
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset split");
  eval_cmd->add_option("--ckpt", ckpt, "checkpoint file")->required();
  eval_cmd->add_option("--data", data, "dataset root")->required();
  eval_cmd->add_option("--split", split, "train or test");

  std::string inspect_ckpt;
  auto* inspect_cmd = app.add_subcommand("inspect", "Print layers, shapes and parameter counts");
  inspect_cmd->add_option("--ckpt", inspect_ckpt, "checkpoint file")->required();

  std::string synth_out;
  std::size_t synth_train = 400, synth_test = 100, synth_rows = 60, synth_cols = 80;
  std::uint64_t synth_seed = 0;
  double synth_noise = 0.3;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic striped-cell dataset");
  synth_cmd->add_option("--out", synth_out, "dataset root to create")->required();
  synth_cmd->add_option("--train", synth_train, "training images");
  synth_cmd->add_option("--test", synth_test, "test images");
  synth_cmd->add_option("--rows", synth_rows, "image rows");
  synth_cmd->add_option("--cols", synth_cols, "image columns");
  synth_cmd->add_option("--seed", synth_seed, "generator seed");
  synth_cmd->add_option("--noise", synth_noise, "pixel noise amplitude");

  std::string summary_dir;
  auto* summary_cmd = app.add_subcommand("summary", "Rebuild summary.txt from the confusion CSVs in a directory");
  summary_cmd->add_option("--dir", summary_dir, "directory holding confusion_<arch>_<task>.csv files")->required();

  std::string kernels;
  app.add_option("--kernels", kernels, "kernel backend: scalar, avx2, neon (default: best available)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("E_USAGE", e.what(), 2);
  }

  try {
    if (!kernels.empty()) {
      const auto backend = kernels::parse_backend(kernels);
      if (!backend || !kernels::select(*backend)) {
        throw ConfigError("kernel backend '" + kernels + "' is not available here");
      }
    }
    if (*train_cmd) return run_train(tf);
    if (*eval_cmd) return run_eval(ckpt, data, split);
    if (*inspect_cmd) return run_inspect(inspect_ckpt);
    if (*summary_cmd) {
      std::fputs(write_summary(summary_dir).c_str(), stdout);
      return 0;
    }
    if (*synth_cmd) {
      return run_synth(synth_out, synth_train, synth_test, synth_rows, synth_cols, synth_seed, synth_noise);
    }
  } catch (const Error& e) {
    return fail(error_code_name(e.code()), e.what(), exit_status(e.code()));
  } catch (const std::exception& e) {
    return fail("E_INTERNAL", e.what(), 1);
  }
  return 0;
}
