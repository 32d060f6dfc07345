#include "rtfnet/cvnn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "rtfnet/errors.hpp"

namespace rtfnet::cvnn {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

template <typename T>
ComplexTensor<T>::ComplexTensor(Shape shape)
    : shape_(std::move(shape)), values_(shape_size(shape_)) {}

template <typename T>
ComplexTensor<T>::ComplexTensor(Shape shape, std::vector<value_type> values)
    : shape_(std::move(shape)), values_(values.begin(), values.end()) {
  if (values_.size() != shape_size(shape_)) {
    throw ArgumentError("ComplexTensor: " + std::to_string(values_.size()) +
                        " values do not fill shape " + shape_string(shape_));
  }
}

template <typename T>
std::span<typename ComplexTensor<T>::value_type> ComplexTensor<T>::grad() {
  if (grad_.size() != values_.size()) grad_.assign(values_.size(), value_type{});
  return grad_;
}

template <typename T>
void ComplexTensor<T>::zero_grad() {
  grad_.assign(values_.size(), value_type{});
}

template <typename T>
void ComplexTensor<T>::fill(value_type v) {
  std::fill(values_.begin(), values_.end(), v);
}

template <typename T>
void ComplexTensor<T>::reshape(Shape shape) {
  if (shape_size(shape) != values_.size()) {
    throw ArgumentError("ComplexTensor::reshape: " + shape_string(shape_) + " -> " +
                        shape_string(shape));
  }
  shape_ = std::move(shape);
}

template <typename T>
bool ComplexTensor<T>::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](const value_type& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

template <typename T>
void ComplexTensor<T>::expect_shape(const Shape& expected, const char* what) const {
  if (shape_ != expected) {
    throw ArgumentError(std::string(what) + ": expected shape " + shape_string(expected) +
                        ", got " + shape_string(shape_));
  }
}

template class ComplexTensor<float>;
template class ComplexTensor<double>;

}  // namespace rtfnet::cvnn
