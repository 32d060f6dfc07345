#include "rtfnet/cvnn/loss.hpp"

#include <cmath>

#include "rtfnet/errors.hpp"

namespace rtfnet::cvnn {

template <typename T>
LossResult<T> l1_complex_loss(const ComplexTensor<T>& estimate, const ComplexTensor<T>& target) {
  estimate.expect_shape(target.shape(), "l1_complex_loss");
  LossResult<T> result;
  result.grad = ComplexTensor<T>(estimate.shape());
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const std::complex<T> r = estimate[i] - target[i];
    const T magnitude = std::abs(r);
    result.value += magnitude;
    if (magnitude > T(0)) result.grad[i] = r / magnitude;
  }
  if (!std::isfinite(result.value)) throw NumericalError("l1_complex_loss: non-finite loss");
  return result;
}

template LossResult<float> l1_complex_loss(const ComplexTensor<float>&, const ComplexTensor<float>&);
template LossResult<double> l1_complex_loss(const ComplexTensor<double>&, const ComplexTensor<double>&);

}  // namespace rtfnet::cvnn
