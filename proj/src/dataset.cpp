#include "hcrn/dataset.hpp"

#include <algorithm>

#include "hcrn/error.hpp"
#include "hcrn/image.hpp"

namespace hcrn {

const char* cell_type_name(CellType type) {
  switch (type) {
    case CellType::kEosinophil: return "EOSINOPHIL";
    case CellType::kLymphocyte: return "LYMPHOCYTE";
    case CellType::kMonocyte: return "MONOCYTE";
    case CellType::kNeutrophil: return "NEUTROPHIL";
  }
  return "?";
}

CellType parse_cell_type(std::string_view name) {
  for (CellType t : kCellTypes) {
    if (name == cell_type_name(t)) return t;
  }
  throw LabelError("unknown cell type '" + std::string(name) + "'");
}

const char* task_name(Task task) { return task == Task::kFourWay ? "4way" : "2way"; }

Task parse_task(std::string_view name) {
  if (name == "4way") return Task::kFourWay;
  if (name == "2way") return Task::kTwoWay;
  throw ConfigError("unknown task '" + std::string(name) + "' (expected 4way or 2way)");
}

std::size_t task_classes(Task task) { return task == Task::kFourWay ? 4 : 2; }

std::size_t ClassMap::index(CellType type) const {
  const auto it = std::find(order.begin(), order.end(), type);
  if (it == order.end()) throw LabelError(std::string("label ") + cell_type_name(type) + " not in class map");
  return static_cast<std::size_t>(it - order.begin());
}

void ClassMap::validate() const {
  for (CellType t : kCellTypes) {
    if (std::count(order.begin(), order.end(), t) != 1) {
      throw ConfigError(std::string("class map must list ") + cell_type_name(t) + " exactly once");
    }
  }
}

Tensor one_hot(CellType label, const ClassMap& map) {
  Tensor t({4});
  t[map.index(label)] = 1.0;
  return t;
}

void Grouping::validate() const {
  if (group0.empty() || group1.empty()) throw ConfigError("two-way grouping has an empty group");
  for (CellType t : kCellTypes) {
    const auto n = std::count(group0.begin(), group0.end(), t) +
                   std::count(group1.begin(), group1.end(), t);
    if (n != 1) {
      throw ConfigError(std::string("two-way grouping must place ") + cell_type_name(t) +
                        " in exactly one group");
    }
  }
}

std::size_t relabel_two_way(CellType label, const Grouping& grouping) {
  grouping.validate();
  return std::find(grouping.group0.begin(), grouping.group0.end(), label) != grouping.group0.end()
             ? 0
             : 1;
}

LabelCodec::LabelCodec(Task task, ClassMap map, Grouping grouping)
    : task_(task), map_(map), grouping_(std::move(grouping)) {
  map_.validate();
  grouping_.validate();
}

std::size_t LabelCodec::encode(CellType label) const {
  return task_ == Task::kFourWay ? map_.index(label) : relabel_two_way(label, grouping_);
}

Tensor LabelCodec::one_hot(CellType label) const {
  Tensor t({classes()});
  t[encode(label)] = 1.0;
  return t;
}

std::vector<std::string> LabelCodec::class_names() const {
  if (task_ == Task::kTwoWay) return {"MONONUCLEAR", "POLYMORPHONUCLEAR"};
  std::vector<std::string> names;
  for (CellType t : map_.order) names.emplace_back(cell_type_name(t));
  return names;
}

const char* split_name(Split split) { return split == Split::kTrain ? "train" : "test"; }

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  throw ConfigError("unknown split '" + std::string(name) + "' (expected train or test)");
}

const char* split_directory(Split split) { return split == Split::kTrain ? "TRAIN" : "TEST"; }

bool split_exists(const std::filesystem::path& root, Split split) {
  std::error_code ec;
  return std::filesystem::is_directory(root / split_directory(split), ec);
}

namespace {

bool hidden(const std::filesystem::path& p) {
  const std::string name = p.filename().string();
  return !name.empty() && name.front() == '.';
}

std::vector<std::filesystem::path> sorted_entries(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (!hidden(entry.path())) out.push_back(entry.path());
  }
  if (ec) throw DatasetError("cannot list '" + dir.string() + "': " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<LabeledImage> load_dataset(const std::filesystem::path& root, Split split,
                                       const LoadOptions& options) {
  const auto dir = root / split_directory(split);
  if (!split_exists(root, split)) throw DatasetError("missing split directory '" + dir.string() + "'");

  std::vector<LabeledImage> images;
  for (const auto& class_dir : sorted_entries(dir)) {
    if (!std::filesystem::is_directory(class_dir)) continue;
    CellType label;
    try {
      label = parse_cell_type(class_dir.filename().string());
    } catch (const LabelError& e) {
      throw LabelError(std::string(e.what()) + " at '" + class_dir.string() + "'");
    }
    for (const auto& file : sorted_entries(class_dir)) {
      if (!std::filesystem::is_regular_file(file)) continue;
      Tensor pixels = to_tensor(read_image(file));
      if (options.resize) pixels = resize_bilinear(pixels, options.resize->first, options.resize->second);
      images.push_back({std::move(pixels), label, file});
    }
  }
  if (images.empty()) throw DatasetError("split '" + dir.string() + "' contains no images");
  return images;
}

}  // namespace hcrn
