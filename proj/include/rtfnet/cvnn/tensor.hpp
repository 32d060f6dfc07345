#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rtfnet::cvnn {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense complex array with an optional gradient slot of the same shape.
///
/// Gradients follow the packed real convention used throughout the engine:
/// grad = dL/dRe(z) + j dL/dIm(z), which equals 2 dL/d(conj z) for a real
/// loss L. Treating each complex entry as two independent reals, this is
/// exactly the gradient ordinary real backprop would produce.
///
/// Activations are rank-4 NHWC tensors (batch, grid w, grid h, channel).
template <typename T>
class ComplexTensor {
 public:
  using value_type = std::complex<T>;

  ComplexTensor() = default;
  explicit ComplexTensor(Shape shape);
  ComplexTensor(Shape shape, std::vector<value_type> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  std::span<value_type> values() { return values_; }
  std::span<const value_type> values() const { return values_; }
  value_type* data() { return values_.data(); }
  const value_type* data() const { return values_.data(); }

  value_type& operator[](std::size_t i) { return values_[i]; }
  const value_type& operator[](std::size_t i) const { return values_[i]; }

  std::size_t offset(std::size_t n, std::size_t h, std::size_t w, std::size_t c) const {
    return ((n * shape_[1] + h) * shape_[2] + w) * shape_[3] + c;
  }
  value_type& at(std::size_t n, std::size_t h, std::size_t w, std::size_t c) {
    return values_[offset(n, h, w, c)];
  }
  const value_type& at(std::size_t n, std::size_t h, std::size_t w, std::size_t c) const {
    return values_[offset(n, h, w, c)];
  }

  bool has_grad() const { return !grad_.empty(); }
  // Allocates a zero gradient on first access.
  std::span<value_type> grad();
  std::span<const value_type> grad() const { return grad_; }
  void zero_grad();
  void drop_grad() { grad_.clear(); }

  void fill(value_type v);
  void reshape(Shape shape);
  bool all_finite() const;

  // Throws ArgumentError naming `what` when the shapes differ.
  void expect_shape(const Shape& expected, const char* what) const;

 private:
  // Aligned storage keeps Eigen's vectorized loops from peeling a
  // different number of leading scalars depending on the heap address,
  // which would change summation order between otherwise identical runs.
  using Storage = std::vector<value_type, Eigen::aligned_allocator<value_type>>;

  Shape shape_;
  Storage values_;
  Storage grad_;
};

/// Non-owning handle to a named tensor inside a model.
template <typename T>
struct NamedTensor {
  std::string name;
  ComplexTensor<T>* tensor;
};

enum class Phase { kTraining, kInference };

extern template class ComplexTensor<float>;
extern template class ComplexTensor<double>;

}  // namespace rtfnet::cvnn
