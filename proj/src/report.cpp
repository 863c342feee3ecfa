#include "hcrn/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "hcrn/error.hpp"

namespace hcrn {

ConfusionMatrix::ConfusionMatrix(std::size_t classes)
    : classes_(classes), counts_(classes * classes, 0) {}

std::size_t ConfusionMatrix::at(std::size_t t, std::size_t p) const {
  if (t >= classes_ || p >= classes_) throw UsageError("confusion index out of range");
  return counts_[t * classes_ + p];
}

std::size_t& ConfusionMatrix::at(std::size_t t, std::size_t p) {
  if (t >= classes_ || p >= classes_) throw UsageError("confusion index out of range");
  return counts_[t * classes_ + p];
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted) { ++at(truth, predicted); }

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (std::size_t c : counts_) n += c;
  return n;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < classes_; ++k) n += counts_[k * classes_ + k];
  return n;
}

std::size_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::size_t n = 0;
  for (std::size_t p = 0; p < classes_; ++p) n += at(truth, p);
  return n;
}

double ConfusionMatrix::accuracy() const {
  const std::size_t n = total();
  return n == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(n);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

template <typename T>
T number(const std::string& s, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DatasetError(std::string("bad ") + what + " '" + s + "'");
  }
  return v;
}

}  // namespace

std::string metrics_row(const EpochMetrics& m) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu,%s,%.17g,%.17g", m.epoch, split_name(m.split), m.loss, m.accuracy);
  return buf;
}

std::string metrics_csv(const std::vector<EpochMetrics>& metrics) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const auto& m : metrics) out += metrics_row(m) + "\n";
  return out;
}

std::vector<EpochMetrics> parse_metrics_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != kMetricsHeader) throw DatasetError("metrics CSV header missing");
  std::vector<EpochMetrics> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv(lines[i]);
    if (cells.size() != 4) throw DatasetError("metrics CSV row " + std::to_string(i) + " malformed");
    out.push_back({number<std::size_t>(cells[0], "epoch"), parse_split(cells[1]),
                   number<double>(cells[2], "loss"), number<double>(cells[3], "accuracy")});
  }
  return out;
}

MetricsWriter::MetricsWriter(const std::filesystem::path& path)
    : path_(path), file_(std::fopen(path.string().c_str(), "wb")) {
  if (!file_) throw IoError("cannot write '" + path.string() + "'");
  if (std::fprintf(file_, "%s\n", kMetricsHeader) < 0 || std::fflush(file_) != 0) {
    std::fclose(file_);
    throw IoError("write failed on '" + path.string() + "'");
  }
}

MetricsWriter::~MetricsWriter() { std::fclose(file_); }

void MetricsWriter::append(const EpochMetrics& m) {
  if (std::fprintf(file_, "%s\n", metrics_row(m).c_str()) < 0 || std::fflush(file_) != 0) {
    throw IoError("write failed on '" + path_.string() + "'");
  }
}

std::string confusion_csv(const ConfusionMatrix& matrix, const std::vector<std::string>& names) {
  if (names.size() != matrix.classes()) throw UsageError("confusion_csv: class name count mismatch");
  std::string out = "true\\predicted";
  for (const auto& n : names) out += "," + n;
  out += "\n";
  for (std::size_t t = 0; t < matrix.classes(); ++t) {
    out += names[t];
    for (std::size_t p = 0; p < matrix.classes(); ++p) out += "," + std::to_string(matrix.at(t, p));
    out += "\n";
  }
  return out;
}

ConfusionMatrix parse_confusion_csv(const std::string& text, std::vector<std::string>* names) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw DatasetError("empty confusion CSV");
  const auto header = split_csv(lines[0]);
  if (header.size() < 2) throw DatasetError("confusion CSV header malformed");
  const std::size_t c = header.size() - 1;
  if (lines.size() != c + 1) throw DatasetError("confusion CSV must have one row per class");
  ConfusionMatrix m(c);
  for (std::size_t t = 0; t < c; ++t) {
    const auto cells = split_csv(lines[t + 1]);
    if (cells.size() != c + 1 || cells[0] != header[t + 1]) {
      throw DatasetError("confusion CSV row " + std::to_string(t + 1) + " malformed");
    }
    for (std::size_t p = 0; p < c; ++p) m.at(t, p) = number<std::size_t>(cells[p + 1], "count");
  }
  if (names) names->assign(header.begin() + 1, header.end());
  return m;
}

std::string confusion_filename(Architecture arch, Task task) {
  return std::string("confusion_") + architecture_name(arch) + "_" + task_name(task) + ".csv";
}

std::string render_summary(const std::vector<RunResult>& runs) {
  std::map<std::pair<int, int>, double> acc;
  for (const auto& r : runs) {
    acc[{static_cast<int>(r.architecture), static_cast<int>(r.task)}] = r.confusion.accuracy();
  }
  auto cell = [&](Architecture a, Task t) -> std::string {
    const auto it = acc.find({static_cast<int>(a), static_cast<int>(t)});
    if (it == acc.end()) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * it->second);
    return buf;
  };
  char line[160];
  std::string out = "Comparison of accuracies\n\n";
  std::snprintf(line, sizeof line, "%-12s | %-22s | %s\n", "Architecture", "2 Way Classification",
                "4 Way Classification");
  out += line;
  out += std::string(12, '-') + "-+-" + std::string(22, '-') + "-+-" + std::string(20, '-') + "\n";
  const std::pair<Architecture, const char*> rows[] = {{Architecture::kCnnOnly, "CNN only"},
                                                       {Architecture::kHybrid, "CNN + RNN"}};
  for (const auto& [arch, label] : rows) {
    std::snprintf(line, sizeof line, "%-12s | %-22s | %s\n", label,
                  cell(arch, Task::kTwoWay).c_str(), cell(arch, Task::kFourWay).c_str());
    out += line;
  }
  return out;
}

std::vector<RunResult> collect_runs(const std::filesystem::path& dir) {
  std::vector<RunResult> runs;
  for (Architecture a : {Architecture::kCnnOnly, Architecture::kHybrid}) {
    for (Task t : {Task::kTwoWay, Task::kFourWay}) {
      const auto path = dir / confusion_filename(a, t);
      if (std::filesystem::exists(path)) runs.push_back({a, t, parse_confusion_csv(read_text(path))});
    }
  }
  return runs;
}

std::string write_summary(const std::filesystem::path& dir) {
  const std::string text = render_summary(collect_runs(dir));
  write_text(dir / "summary.txt", text);
  return text;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out.flush()) throw IoError("write failed on '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hcrn
