#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "hcrn/rng.hpp"

namespace hcrn {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major tensor of doubles.
///
/// Shape conventions used across the library:
///   image          [rows x cols x channels]
///   grayscale      [rows x cols]
///   batch of rgb   [batch x rows x cols x channels]
///   conv kernels   [kh x kw x cin x cout]
///   dense weights  [out x in]
///   sequence       [timesteps x features]
///
/// Invariants: rank >= 1, every extent >= 1, size() == product(shape).
class Tensor {
 public:
  /// A single zero scalar of shape [1].
  Tensor();
  /// Zero-filled tensor.
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor full(Shape shape, double value);
  static Tensor vector(std::initializer_list<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::initializer_list<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return values_.size(); }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Bounds-checked multi-index access.
  double& at(std::initializer_list<std::size_t> index);
  double at(std::initializer_list<std::size_t> index) const;

  void fill(double value);

  bool operator==(const Tensor& other) const = default;

 private:
  std::size_t offset(std::initializer_list<std::size_t> index) const;

  Shape shape_;
  std::vector<double> values_;
};

enum class EwiseOp { kAdd, kSub, kMul };

/// c = a * b for rank-2 a [m x k] and b [k x n].
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor ewise(const Tensor& a, const Tensor& b, EwiseOp op);
inline Tensor add(const Tensor& a, const Tensor& b) { return ewise(a, b, EwiseOp::kAdd); }
inline Tensor sub(const Tensor& a, const Tensor& b) { return ewise(a, b, EwiseOp::kSub); }
inline Tensor mul(const Tensor& a, const Tensor& b) { return ewise(a, b, EwiseOp::kMul); }

/// a += b, in place.
void add_in_place(Tensor& a, const Tensor& b);

Tensor scale(const Tensor& a, double factor);

Tensor reshape(const Tensor& a, Shape new_shape);

/// Glorot-uniform samples in +-sqrt(6 / (fan_in + fan_out)).
Tensor glorot_init(Rng& rng, Shape shape, std::size_t fan_in,
                   std::size_t fan_out);

/// Index of the first maximal element of a rank-1 tensor.
std::size_t argmax(const Tensor& a);
std::size_t argmax(std::span<const double> values);

double sum(const Tensor& a);

/// Copies item `index` out of a tensor whose leading axis is the batch axis.
Tensor slice_leading(const Tensor& batch, std::size_t index);

/// Writes `item` into position `index` of a batch tensor.
void assign_leading(Tensor& batch, std::size_t index, const Tensor& item);

}  // namespace hcrn
