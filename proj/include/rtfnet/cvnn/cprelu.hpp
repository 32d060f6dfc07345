#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rtfnet/cvnn/tensor.hpp"

namespace rtfnet::cvnn {

/// Split parametric ReLU, PReLU(Re x; a_re) + j PReLU(Im x; a_im).
/// Slopes are per channel and packed into one complex parameter a_re + j a_im.
template <typename T>
class CPReLU {
 public:
  explicit CPReLU(std::size_t channels, T init_slope = T(0.25));

  ComplexTensor<T> forward(const ComplexTensor<T>& x);
  ComplexTensor<T> backward(const ComplexTensor<T>& grad_out);

  ComplexTensor<T>& alpha() { return alpha_; }
  void collect_parameters(const std::string& prefix, std::vector<NamedTensor<T>>& out);

 private:
  ComplexTensor<T> alpha_;
  ComplexTensor<T> input_;
  bool has_context_ = false;
};

extern template class CPReLU<float>;
extern template class CPReLU<double>;

}  // namespace rtfnet::cvnn
