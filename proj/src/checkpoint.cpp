#include "hcrn/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "hcrn/error.hpp"

namespace hcrn {
namespace {

constexpr std::uint8_t kMagic[4] = {'H', 'C', 'R', 'N'};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void raw(std::string_view s) { bytes.insert(bytes.end(), s.begin(), s.end()); }
  void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

  std::vector<std::uint8_t> bytes;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  std::uint32_t u32(const char* field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::string raw(std::size_t n, const char* field) {
    need(n, field);
    std::string s(bytes_.begin() + pos_, bytes_.begin() + pos_ + n);
    pos_ += n;
    return s;
  }
  double f32(const char* field) { return std::bit_cast<float>(u32(field)); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* field) const {
    if (remaining() < n) throw IntegrityError(std::string("checkpoint truncated in ") + field);
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
};

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

TrainConfig portable(TrainConfig config) {
  config.data.clear();
  config.out.clear();
  return config;
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const TrainConfig& config, const ParamStore& params) {
  Writer w;
  w.raw(std::string_view(reinterpret_cast<const char*>(kMagic), 4));
  w.u32(kCheckpointVersion);
  const std::string text = config_to_text(portable(config));
  w.u32(static_cast<std::uint32_t>(text.size()));
  w.raw(text);
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, value] : params.entries()) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.raw(name);
    w.u32(static_cast<std::uint32_t>(value.rank()));
    for (std::size_t d : value.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (double v : value.values()) w.f32(v);
  }
  w.u32(crc32_of(w.bytes));
  return std::move(w.bytes);
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(kMagic, kMagic + 4, bytes.begin())) {
    throw IntegrityError("checkpoint magic mismatch");
  }
  Reader head(bytes, 4);
  const std::uint32_t version = head.u32("version");
  if (version != kCheckpointVersion) {
    throw IntegrityError("checkpoint version " + std::to_string(version) + " unsupported");
  }
  if (bytes.size() < 16) throw IntegrityError("checkpoint truncated in checksum");
  const auto body = bytes.first(bytes.size() - 4);
  if (Reader(bytes, body.size()).u32("checksum") != crc32_of(body)) {
    throw IntegrityError("checkpoint checksum mismatch");
  }

  Reader r(body, 8);
  Checkpoint ck;
  const std::uint32_t text_len = r.u32("config length");
  try {
    ck.config = parse_config(r.raw(text_len, "config text"));
  } catch (const ConfigError& e) {
    throw IntegrityError(std::string("checkpoint config unreadable: ") + e.what());
  }
  const std::uint32_t count = r.u32("record count");
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = r.u32("record name length");
    std::string name = r.raw(name_len, "record name");
    const std::uint32_t rank = r.u32("record rank");
    if (rank == 0 || rank > 8) throw IntegrityError("checkpoint record '" + name + "' has bad rank");
    Shape shape;
    std::size_t n = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      shape.push_back(r.u32("record extent"));
      n *= shape.back();
    }
    if (n > r.remaining() / 4) throw IntegrityError("checkpoint truncated in record '" + name + "' data");
    std::vector<double> values(n);
    for (double& v : values) v = r.f32("record data");
    try {
      ck.params.add(std::move(name), Tensor(std::move(shape), std::move(values)));
    } catch (const Error& e) {
      throw IntegrityError(std::string("checkpoint records: ") + e.what());
    }
  }
  if (r.remaining() != 0) throw IntegrityError("checkpoint has trailing bytes after records");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const NetworkGraph& graph,
                     const TrainConfig& config) {
  const auto bytes = encode_checkpoint(config, graph.params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw IoError("cannot read checkpoint '" + path.string() + "': not a regular file");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                        std::istreambuf_iterator<char>()};
  try {
    return decode_checkpoint(bytes);
  } catch (const IntegrityError& e) {
    throw IntegrityError("'" + path.string() + "': " + e.what());
  }
}

NetworkGraph restore_graph(const Checkpoint& ck) {
  Rng rng(0);
  NetworkGraph graph = build_network(ck.config.architecture, rng, task_classes(ck.config.task),
                                     ck.config.arch);
  auto& have = graph.params.entries();
  const auto& stored = ck.params.entries();
  if (have.size() != stored.size()) {
    throw IntegrityError("checkpoint holds " + std::to_string(stored.size()) + " tensors, network needs " +
                         std::to_string(have.size()));
  }
  for (std::size_t i = 0; i < have.size(); ++i) {
    if (have[i].name != stored[i].name || have[i].value.shape() != stored[i].value.shape()) {
      throw IntegrityError("checkpoint record '" + stored[i].name + "' " +
                           shape_string(stored[i].value.shape()) + " does not match '" + have[i].name +
                           "' " + shape_string(have[i].value.shape()));
    }
    have[i].value = stored[i].value;
  }
  return graph;
}

}  // namespace hcrn
