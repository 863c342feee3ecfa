#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hcrn/config.hpp"
#include "hcrn/model.hpp"
#include "hcrn/param_store.hpp"

namespace hcrn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Byte layout, all integers little-endian u32:
///   "HCRN" | version | config length | config text | record count |
///   records: name length | name | rank | extents... | f32 values |
///   CRC-32 of every preceding byte.
/// The stored config omits the data and output paths.
struct Checkpoint {
  TrainConfig config;
  ParamStore params;
};

std::vector<std::uint8_t> encode_checkpoint(const TrainConfig& config, const ParamStore& params);

/// Verifies magic, version and checksum before reading any record. Any
/// defect raises IntegrityError naming the field.
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const NetworkGraph& graph,
                     const TrainConfig& config);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Rebuilds the network described by the config and fills it with the
/// stored parameters. Names and shapes must match exactly.
NetworkGraph restore_graph(const Checkpoint& checkpoint);

}  // namespace hcrn
