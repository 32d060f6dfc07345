#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "rtfnet/cvnn/tensor.hpp"

namespace rtfnet::cvnn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam over the real and imaginary parts of each parameter independently,
/// with bias-corrected moments. Moments are stored as complex tensors whose
/// real/imag parts hold the moments of the real/imag components.
template <typename T>
class Adam {
 public:
  explicit Adam(AdamConfig config) : config_(config) {}

  // Applies one update to every tensor using its gradient slot. Throws
  // NumericalError naming the parameter if any gradient is non-finite.
  void step(std::span<const NamedTensor<T>> params);

  std::uint64_t steps() const { return steps_; }
  const AdamConfig& config() const { return config_; }

  // Checkpoint access: first/second moments keyed by parameter name.
  std::map<std::string, ComplexTensor<T>>& first_moments() { return m_; }
  std::map<std::string, ComplexTensor<T>>& second_moments() { return v_; }
  void set_steps(std::uint64_t steps) { steps_ = steps; }

 private:
  AdamConfig config_;
  std::uint64_t steps_ = 0;
  std::map<std::string, ComplexTensor<T>> m_;
  std::map<std::string, ComplexTensor<T>> v_;
};

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace rtfnet::cvnn
