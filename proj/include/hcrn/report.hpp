#pragma once

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "hcrn/dataset.hpp"
#include "hcrn/model.hpp"

namespace hcrn {

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes = 0);

  void add(std::size_t truth, std::size_t predicted);
  std::size_t classes() const { return classes_; }
  std::size_t at(std::size_t truth, std::size_t predicted) const;
  std::size_t& at(std::size_t truth, std::size_t predicted);
  std::size_t total() const;
  std::size_t trace() const;
  std::size_t row_sum(std::size_t truth) const;
  /// trace / total, 0 for an empty matrix.
  double accuracy() const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t classes_;
  std::vector<std::size_t> counts_;
};

struct EpochMetrics {
  std::size_t epoch = 0;  // 1-based
  Split split = Split::kTrain;
  double loss = 0.0;
  double accuracy = 0.0;

  bool operator==(const EpochMetrics&) const = default;
};

inline constexpr const char* kMetricsHeader = "epoch,split,loss,accuracy";

std::string metrics_row(const EpochMetrics& m);
std::string metrics_csv(const std::vector<EpochMetrics>& metrics);
std::vector<EpochMetrics> parse_metrics_csv(const std::string& text);

/// Appends rows to metrics.csv as they arrive, flushing each one.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::filesystem::path& path);
  ~MetricsWriter();
  MetricsWriter(const MetricsWriter&) = delete;
  MetricsWriter& operator=(const MetricsWriter&) = delete;

  void append(const EpochMetrics& m);

 private:
  std::filesystem::path path_;
  std::FILE* file_;
};

/// Header row "true\predicted,<names>", then one row per true class.
std::string confusion_csv(const ConfusionMatrix& matrix, const std::vector<std::string>& names);
ConfusionMatrix parse_confusion_csv(const std::string& text, std::vector<std::string>* names = nullptr);

std::string confusion_filename(Architecture arch, Task task);  // confusion_<arch>_<task>.csv

struct RunResult {
  Architecture architecture;
  Task task;
  ConfusionMatrix confusion;
};

/// Accuracy table, one row per architecture and one column per task.
std::string render_summary(const std::vector<RunResult>& runs);

/// Rebuilds the runs from every confusion_*.csv in `dir`.
std::vector<RunResult> collect_runs(const std::filesystem::path& dir);

/// Writes summary.txt from the confusion files present in `dir`.
std::string write_summary(const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace hcrn
