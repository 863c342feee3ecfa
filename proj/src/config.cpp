#include "hcrn/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hcrn/error.hpp"

namespace hcrn {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* want) {
  throw ConfigError("bad value '" + std::string(value) + "' for " + std::string(key) + " (expected " +
                    want + ")");
}

template <typename T>
T parse_uint(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value, "a nonnegative integer");
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value, "a number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, "true or false");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch must be at least 1");
  if (!(optimizer.lr > 0.0)) throw ConfigError("lr must be positive");
  if (!(optimizer.rho > 0.0 && optimizer.rho < 1.0)) throw ConfigError("rho must lie in (0, 1)");
  if (!(optimizer.eps > 0.0)) throw ConfigError("eps must be positive");
  arch.validate(architecture);
  augment_spec.validate();
}

std::uint64_t TrainConfig::init_seed() const { return Rng::derive(seed, 1); }
std::uint64_t TrainConfig::shuffle_seed() const { return Rng::derive(seed, 2); }
std::uint64_t TrainConfig::augment_seed() const { return Rng::derive(seed, 3); }
std::uint64_t TrainConfig::dropout_seed() const { return Rng::derive(seed, 4); }

void apply_setting(TrainConfig& c, std::string_view key, std::string_view value) {
  if (key == "arch") {
    c.architecture = parse_architecture(value);
  } else if (key == "task") {
    c.task = parse_task(value);
  } else if (key == "epochs") {
    c.epochs = parse_uint<std::size_t>(key, value);
  } else if (key == "batch") {
    c.batch_size = parse_uint<std::size_t>(key, value);
  } else if (key == "lr") {
    c.optimizer.lr = parse_double(key, value);
  } else if (key == "rho") {
    c.optimizer.rho = parse_double(key, value);
  } else if (key == "eps") {
    c.optimizer.eps = parse_double(key, value);
  } else if (key == "seed") {
    c.seed = parse_uint<std::uint64_t>(key, value);
  } else if (key == "data") {
    c.data = std::string(value);
  } else if (key == "out") {
    c.out = std::string(value);
  } else if (key == "preset") {
    if (value == "full") {
      c.arch = ArchSpec::full();
    } else if (value == "tiny") {
      c.arch = ArchSpec::tiny();
    } else {
      bad_value(key, value, "full or tiny");
    }
  } else if (key == "rows") {
    c.arch.rows = parse_uint<std::size_t>(key, value);
  } else if (key == "cols") {
    c.arch.cols = parse_uint<std::size_t>(key, value);
  } else if (key == "conv1") {
    c.arch.conv1 = parse_uint<std::size_t>(key, value);
  } else if (key == "conv2") {
    c.arch.conv2 = parse_uint<std::size_t>(key, value);
  } else if (key == "lstm_units") {
    c.arch.lstm_units = parse_uint<std::size_t>(key, value);
  } else if (key == "branch_width") {
    c.arch.branch_width = parse_uint<std::size_t>(key, value);
  } else if (key == "head_width") {
    c.arch.head_width = parse_uint<std::size_t>(key, value);
  } else if (key == "drop_pool") {
    c.arch.drop_pool = parse_double(key, value);
  } else if (key == "drop_lstm") {
    c.arch.drop_lstm = parse_double(key, value);
  } else if (key == "drop_head") {
    c.arch.drop_head = parse_double(key, value);
  } else if (key == "augment") {
    c.augment = parse_bool(key, value);
  } else if (key == "rotation_deg") {
    c.augment_spec.rotation_deg = parse_double(key, value);
  } else if (key == "reflect_probability") {
    c.augment_spec.reflect_probability = parse_double(key, value);
  } else if (key == "shift_fraction") {
    c.augment_spec.shift_fraction = parse_double(key, value);
  } else if (key == "ckpt_every_epoch") {
    c.checkpoint_every_epoch = parse_bool(key, value);
  } else if (key == "evaluate_test") {
    c.evaluate_test = parse_bool(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

TrainConfig parse_config(std::string_view text, TrainConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    try {
      apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

TrainConfig load_config(const std::filesystem::path& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string config_to_text(const TrainConfig& c) {
  std::ostringstream o;
  o << "arch=" << architecture_name(c.architecture) << '\n'
    << "task=" << task_name(c.task) << '\n'
    << "epochs=" << c.epochs << '\n'
    << "batch=" << c.batch_size << '\n'
    << "lr=" << fmt(c.optimizer.lr) << '\n'
    << "rho=" << fmt(c.optimizer.rho) << '\n'
    << "eps=" << fmt(c.optimizer.eps) << '\n'
    << "seed=" << c.seed << '\n'
    << "data=" << c.data.string() << '\n'
    << "out=" << c.out.string() << '\n'
    << "rows=" << c.arch.rows << '\n'
    << "cols=" << c.arch.cols << '\n'
    << "conv1=" << c.arch.conv1 << '\n'
    << "conv2=" << c.arch.conv2 << '\n'
    << "lstm_units=" << c.arch.lstm_units << '\n'
    << "branch_width=" << c.arch.branch_width << '\n'
    << "head_width=" << c.arch.head_width << '\n'
    << "drop_pool=" << fmt(c.arch.drop_pool) << '\n'
    << "drop_lstm=" << fmt(c.arch.drop_lstm) << '\n'
    << "drop_head=" << fmt(c.arch.drop_head) << '\n'
    << "augment=" << (c.augment ? "true" : "false") << '\n'
    << "rotation_deg=" << fmt(c.augment_spec.rotation_deg) << '\n'
    << "reflect_probability=" << fmt(c.augment_spec.reflect_probability) << '\n'
    << "shift_fraction=" << fmt(c.augment_spec.shift_fraction) << '\n'
    << "ckpt_every_epoch=" << (c.checkpoint_every_epoch ? "true" : "false") << '\n'
    << "evaluate_test=" << (c.evaluate_test ? "true" : "false") << '\n';
  return o.str();
}

}  // namespace hcrn
