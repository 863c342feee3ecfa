#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "hcrn/adadelta.hpp"
#include "hcrn/augment.hpp"
#include "hcrn/dataset.hpp"
#include "hcrn/model.hpp"

namespace hcrn {

/// Everything that determines a training run apart from the dataset.
struct TrainConfig {
  Architecture architecture = Architecture::kHybrid;
  Task task = Task::kFourWay;
  std::size_t epochs = 70;
  std::size_t batch_size = 32;
  AdadeltaOptions optimizer;  // lr 1.0, rho 0.95, eps 1e-6
  std::uint64_t seed = 0;
  std::filesystem::path data;
  std::filesystem::path out;
  ArchSpec arch;
  bool augment = true;
  AugmentSpec augment_spec;  // its seed field is ignored; see augment_seed()
  bool checkpoint_every_epoch = false;
  bool evaluate_test = true;

  void validate() const;  // ConfigError

  /// Independent streams derived from `seed`.
  std::uint64_t init_seed() const;
  std::uint64_t shuffle_seed() const;
  std::uint64_t augment_seed() const;
  std::uint64_t dropout_seed() const;

  bool operator==(const TrainConfig&) const = default;
};

/// Sets one key from its text form. Unknown keys and malformed values raise
/// ConfigError. "preset" replaces every architecture size at once.
void apply_setting(TrainConfig& config, std::string_view key, std::string_view value);

/// Flat key=value lines; '#' starts a comment.
TrainConfig parse_config(std::string_view text, TrainConfig base = {});
TrainConfig load_config(const std::filesystem::path& path, TrainConfig base = {});

/// Canonical text listing every key in a fixed order. Round-trips through
/// parse_config exactly.
std::string config_to_text(const TrainConfig& config);

}  // namespace hcrn
