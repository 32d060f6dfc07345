#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "rtfnet/cvnn/tensor.hpp"

namespace rtfnet::cvnn {

// Symmetric 2x2 matrix [[rr, ri], [ri, ii]].
struct Sym2 {
  double rr = 0.0;
  double ri = 0.0;
  double ii = 0.0;
};

// Inverse principal square root of an SPD 2x2 matrix (closed form).
Sym2 inverse_sqrt(const Sym2& v);

/// Complex batch normalization. Per channel the (Re, Im) pairs are centred,
/// whitened with the inverse square root of their 2x2 covariance (+ eps I),
/// then mapped through a learnable 2x2 matrix Gamma and shifted by beta.
///
/// Gamma is stored as two complex per-channel parameters: gamma_r holds the
/// first row (G00 + j G01) and gamma_i the second row (G10 + j G11), so
///   Re y = G00 zr + G01 zi + Re beta,  Im y = G10 zr + G11 zi + Im beta.
/// Running mean and covariance are updated with `momentum` in training and
/// used as-is for inference.
template <typename T>
class ComplexBatchNorm {
 public:
  explicit ComplexBatchNorm(std::size_t channels, double epsilon = 1e-5, double momentum = 0.9);

  ComplexTensor<T> forward(const ComplexTensor<T>& x, Phase phase);
  ComplexTensor<T> backward(const ComplexTensor<T>& grad_out);

  ComplexTensor<T>& gamma_r() { return gamma_r_; }
  ComplexTensor<T>& gamma_i() { return gamma_i_; }
  ComplexTensor<T>& beta() { return beta_; }
  std::size_t channels() const { return channels_; }

  void collect_parameters(const std::string& prefix, std::vector<NamedTensor<T>>& out);
  // running_mean (complex), running_var (Vrr + j Vii), running_cov (Vri + j 0)
  void collect_buffers(const std::string& prefix, std::vector<NamedTensor<T>>& out);

 private:
  struct ChannelContext {
    std::array<double, 2> mean{};
    Sym2 whiten;           // W = (V + eps I)^(-1/2)
    std::array<double, 2> eig{};   // eigenvalues of V + eps I
    std::array<double, 4> basis{};  // eigenvectors, column-major
  };

  std::size_t channels_;
  double epsilon_;
  double momentum_;
  ComplexTensor<T> gamma_r_;
  ComplexTensor<T> gamma_i_;
  ComplexTensor<T> beta_;
  ComplexTensor<T> running_mean_;
  ComplexTensor<T> running_var_;
  ComplexTensor<T> running_cov_;

  ComplexTensor<T> input_;
  Phase phase_ = Phase::kInference;
  std::vector<ChannelContext> context_;
  bool has_context_ = false;
};

extern template class ComplexBatchNorm<float>;
extern template class ComplexBatchNorm<double>;

}  // namespace rtfnet::cvnn
