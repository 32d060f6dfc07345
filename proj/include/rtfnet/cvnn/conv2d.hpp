#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rtfnet/cvnn/tensor.hpp"
#include "rtfnet/rng.hpp"

namespace rtfnet::cvnn {

struct Conv2dOptions {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel_h = 3;
  std::size_t kernel_w = 3;
  std::size_t stride_h = 1;
  std::size_t stride_w = 1;
  bool bias = true;
};

// "Same" padding: output extent is ceil(in / stride); when the total padding
// is odd the extra cell goes after the data.
std::size_t same_output_extent(std::size_t in, std::size_t stride);
std::size_t same_pad_before(std::size_t in, std::size_t kernel, std::size_t stride);

/// Complex 2-D convolution (cross-correlation) over NHWC tensors:
///   out = (Wr*xr - Wi*xi) + j (Wr*xi + Wi*xr) + b
/// Weights are laid out [kh, kw, in, out]. Batch items are lowered to patch
/// matrices in chunks and multiplied against the weights; patches are
/// rebuilt in the backward pass instead of being cached.
template <typename T>
class ComplexConv2d {
 public:
  explicit ComplexConv2d(const Conv2dOptions& options);

  // Rayleigh magnitudes with He fan-in scaling, uniform phases; zero bias.
  void initialize(Rng& rng);

  ComplexTensor<T> forward(const ComplexTensor<T>& x);
  // Accumulates weight/bias gradients, returns the input gradient.
  ComplexTensor<T> backward(const ComplexTensor<T>& grad_out);

  ComplexTensor<T>& weight() { return weight_; }
  ComplexTensor<T>& bias() { return bias_; }
  const Conv2dOptions& options() const { return options_; }
  Shape output_shape(const Shape& input) const;

  void collect_parameters(const std::string& prefix, std::vector<NamedTensor<T>>& out);

 private:
  Conv2dOptions options_;
  ComplexTensor<T> weight_;
  ComplexTensor<T> bias_;
  ComplexTensor<T> input_;
  bool has_context_ = false;
};

extern template class ComplexConv2d<float>;
extern template class ComplexConv2d<double>;

}  // namespace rtfnet::cvnn
