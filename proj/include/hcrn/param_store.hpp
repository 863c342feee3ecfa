#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hcrn/tensor.hpp"

namespace hcrn {

/// Named parameter tensors kept in insertion order. The order is part of the
/// checkpoint format, so it never depends on hashing or the platform.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Tensor value;

    bool operator==(const Entry&) const = default;
  };

  /// Throws ConfigError on a duplicate name.
  void add(std::string name, Tensor value);

  bool contains(std::string_view name) const;
  const Tensor* find(std::string_view name) const;
  /// Throws UsageError when the name is unknown.
  Tensor& at(std::string_view name);
  const Tensor& at(std::string_view name) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  /// Total scalar count over all tensors.
  std::size_t parameter_count() const;

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }

  /// Same names and shapes, all zeros.
  ParamStore zeros_like() const;

  /// this += other; names and shapes must match exactly.
  void accumulate(const ParamStore& other);

  bool operator==(const ParamStore& other) const { return entries_ == other.entries_; }

 private:
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace hcrn
