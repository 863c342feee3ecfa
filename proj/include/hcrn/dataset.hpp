#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hcrn/tensor.hpp"

namespace hcrn {

enum class CellType { kEosinophil, kLymphocyte, kMonocyte, kNeutrophil };

inline constexpr std::array<CellType, 4> kCellTypes = {
    CellType::kEosinophil, CellType::kLymphocyte, CellType::kMonocyte, CellType::kNeutrophil};

/// Upper-case directory name, e.g. "NEUTROPHIL".
const char* cell_type_name(CellType type);
/// Throws LabelError for anything outside the four names.
CellType parse_cell_type(std::string_view name);

struct LabeledImage {
  Tensor pixels;  // [H x W x 3], values in [0, 1]
  CellType label = CellType::kEosinophil;
  std::filesystem::path source;
};

enum class Task { kFourWay, kTwoWay };

const char* task_name(Task task);  // "4way" / "2way"
Task parse_task(std::string_view name);
std::size_t task_classes(Task task);

/// Position of each cell type in the 4-way one-hot vector.
struct ClassMap {
  std::array<CellType, 4> order = {CellType::kMonocyte, CellType::kLymphocyte,
                                   CellType::kNeutrophil, CellType::kEosinophil};

  std::size_t index(CellType type) const;
  void validate() const;
};

Tensor one_hot(CellType label, const ClassMap& map = {});

/// Two-way split of the four cell types. Group 0 defaults to the
/// mononuclear cells.
struct Grouping {
  std::vector<CellType> group0 = {CellType::kLymphocyte, CellType::kMonocyte};
  std::vector<CellType> group1 = {CellType::kEosinophil, CellType::kNeutrophil};

  /// ConfigError unless the groups are nonempty and partition the four types.
  void validate() const;
};

std::size_t relabel_two_way(CellType label, const Grouping& grouping = {});

/// Maps cell types to class indices for a task.
class LabelCodec {
 public:
  explicit LabelCodec(Task task, ClassMap map = {}, Grouping grouping = {});

  Task task() const { return task_; }
  std::size_t classes() const { return task_classes(task_); }
  std::size_t encode(CellType label) const;
  Tensor one_hot(CellType label) const;
  std::vector<std::string> class_names() const;

 private:
  Task task_;
  ClassMap map_;
  Grouping grouping_;
};

enum class Split { kTrain, kTest };

const char* split_name(Split split);  // "train" / "test"
Split parse_split(std::string_view name);
/// On-disk directory, "TRAIN" / "TEST".
const char* split_directory(Split split);

struct LoadOptions {
  /// When set, every image is resized to rows x cols on load.
  std::optional<std::pair<std::size_t, std::size_t>> resize =
      std::pair<std::size_t, std::size_t>{60, 80};
};

/// Reads root/SPLIT/CLASS/* in lexicographic path order. Hidden files are
/// skipped.
std::vector<LabeledImage> load_dataset(const std::filesystem::path& root, Split split,
                                       const LoadOptions& options = {});

bool split_exists(const std::filesystem::path& root, Split split);

}  // namespace hcrn
