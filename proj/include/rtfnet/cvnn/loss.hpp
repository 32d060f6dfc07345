#pragma once

#include "rtfnet/cvnn/tensor.hpp"

namespace rtfnet::cvnn {

template <typename T>
struct LossResult {
  double value = 0.0;
  ComplexTensor<T> grad;  // w.r.t. the estimate, packed convention
};

// Sum of complex moduli |estimate - target| over every entry. The gradient
// is (estimate - target) / |estimate - target|, zero where the residual is 0.
template <typename T>
LossResult<T> l1_complex_loss(const ComplexTensor<T>& estimate, const ComplexTensor<T>& target);

}  // namespace rtfnet::cvnn
