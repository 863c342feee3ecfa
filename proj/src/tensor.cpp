#include "hcrn/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "hcrn/error.hpp"
#include "hcrn/kernels.hpp"

namespace hcrn {
namespace {

void validate_shape(const Shape& shape) {
  if (shape.empty()) throw DimensionError("tensor rank must be at least 1");
  for (std::size_t e : shape) {
    if (e == 0) throw DimensionError("zero extent in shape " + shape_string(shape));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(what) + ": shape mismatch " +
                         shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

}  // namespace

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

Tensor::Tensor() : shape_{1}, values_(1, 0.0) {}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  validate_shape(shape_);
  values_.assign(shape_size(shape_), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  validate_shape(shape_);
  if (values_.size() != shape_size(shape_)) {
    throw DimensionError("shape " + shape_string(shape_) + " needs " +
                         std::to_string(shape_size(shape_)) + " values, got " +
                         std::to_string(values_.size()));
  }
}

Tensor Tensor::full(Shape shape, double value) {
  Tensor t(std::move(shape));
  t.fill(value);
  return t;
}

Tensor Tensor::vector(std::initializer_list<double> values) {
  return Tensor({values.size()}, std::vector<double>(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::initializer_list<double> values) {
  return Tensor({rows, cols}, std::vector<double>(values));
}

std::size_t Tensor::offset(std::initializer_list<std::size_t> index) const {
  if (index.size() != shape_.size()) {
    throw DimensionError("index rank " + std::to_string(index.size()) +
                         " does not match tensor " + shape_string(shape_));
  }
  std::size_t flat = 0;
  std::size_t axis = 0;
  for (std::size_t i : index) {
    if (i >= shape_[axis]) {
      throw DimensionError("index out of range for tensor " + shape_string(shape_));
    }
    flat = flat * shape_[axis] + i;
    ++axis;
  }
  return flat;
}

double& Tensor::at(std::initializer_list<std::size_t> index) { return values_[offset(index)]; }

double Tensor::at(std::initializer_list<std::size_t> index) const {
  return values_[offset(index)];
}

void Tensor::fill(double value) { std::fill(values_.begin(), values_.end(), value); }

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.extent(1) != b.extent(0)) {
    throw DimensionError("matmul: incompatible shapes " + shape_string(a.shape()) +
                         " and " + shape_string(b.shape()));
  }
  const std::size_t m = a.extent(0), k = a.extent(1), n = b.extent(1);
  Tensor c({m, n});
  const auto& kt = kernels::active();
  for (std::size_t i = 0; i < m; ++i) {
    double* row = c.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) kt.axpy(a[i * k + p], b.data() + p * n, row, n);
  }
  return c;
}

Tensor ewise(const Tensor& a, const Tensor& b, EwiseOp op) {
  require_same_shape(a, b, "ewise");
  Tensor out(a.shape());
  const auto& kt = kernels::active();
  switch (op) {
    case EwiseOp::kAdd: kt.add(a.data(), b.data(), out.data(), a.size()); break;
    case EwiseOp::kSub: kt.sub(a.data(), b.data(), out.data(), a.size()); break;
    case EwiseOp::kMul: kt.mul(a.data(), b.data(), out.data(), a.size()); break;
  }
  return out;
}

void add_in_place(Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add_in_place");
  kernels::active().add(a.data(), b.data(), a.data(), a.size());
}

Tensor scale(const Tensor& a, double factor) {
  Tensor out = a;
  kernels::active().scale(factor, out.data(), out.size());
  return out;
}

Tensor reshape(const Tensor& a, Shape new_shape) {
  if (shape_size(new_shape) != a.size() || new_shape.empty()) {
    throw DimensionError("reshape: cannot view " + shape_string(a.shape()) + " as " +
                         shape_string(new_shape));
  }
  return Tensor(std::move(new_shape), std::vector<double>(a.values().begin(), a.values().end()));
}

Tensor glorot_init(Rng& rng, Shape shape, std::size_t fan_in, std::size_t fan_out) {
  if (fan_in == 0 || fan_out == 0) throw ConfigError("glorot_init: fans must be positive");
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.uniform(-bound, bound);
  return t;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw DimensionError("argmax of empty tensor");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::size_t argmax(const Tensor& a) {
  if (a.rank() != 1) throw DimensionError("argmax expects rank 1, got " + shape_string(a.shape()));
  return argmax(a.values());
}

double sum(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.values()) acc += v;
  return acc;
}

Tensor slice_leading(const Tensor& batch, std::size_t index) {
  if (batch.rank() < 2 || index >= batch.extent(0)) {
    throw DimensionError("slice_leading: index " + std::to_string(index) +
                         " out of range for " + shape_string(batch.shape()));
  }
  Shape item(batch.shape().begin() + 1, batch.shape().end());
  const std::size_t n = shape_size(item);
  const double* begin = batch.data() + index * n;
  return Tensor(std::move(item), std::vector<double>(begin, begin + n));
}

void assign_leading(Tensor& batch, std::size_t index, const Tensor& item) {
  Shape expect(batch.shape().begin() + 1, batch.shape().end());
  if (batch.rank() < 2 || index >= batch.extent(0) || item.shape() != expect) {
    throw DimensionError("assign_leading: cannot place " + shape_string(item.shape()) +
                         " into " + shape_string(batch.shape()));
  }
  std::copy(item.values().begin(), item.values().end(), batch.data() + index * item.size());
}

}  // namespace hcrn
