#include "rtfnet/cvnn/cprelu.hpp"

#include "rtfnet/errors.hpp"

namespace rtfnet::cvnn {

template <typename T>
CPReLU<T>::CPReLU(std::size_t channels, T init_slope) : alpha_({channels}) {
  alpha_.fill({init_slope, init_slope});
}

template <typename T>
ComplexTensor<T> CPReLU<T>::forward(const ComplexTensor<T>& x) {
  const std::size_t channels = alpha_.size();
  if (x.rank() == 0 || x.shape().back() != channels) {
    throw ArgumentError("CPReLU: input " + shape_string(x.shape()) + " does not end in " +
                        std::to_string(channels) + " channels");
  }
  ComplexTensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto a = alpha_[i % channels];
    const auto v = x[i];
    y[i] = {v.real() >= T(0) ? v.real() : a.real() * v.real(),
            v.imag() >= T(0) ? v.imag() : a.imag() * v.imag()};
  }
  input_ = x;
  has_context_ = true;
  return y;
}

template <typename T>
ComplexTensor<T> CPReLU<T>::backward(const ComplexTensor<T>& grad_out) {
  if (!has_context_) throw ArgumentError("CPReLU::backward: no forward context");
  grad_out.expect_shape(input_.shape(), "CPReLU::backward");
  const std::size_t channels = alpha_.size();
  auto dalpha = alpha_.grad();
  ComplexTensor<T> dx(input_.shape());
  for (std::size_t i = 0; i < input_.size(); ++i) {
    const std::size_t c = i % channels;
    const auto a = alpha_[c];
    const auto v = input_[i];
    const auto g = grad_out[i];
    T gr = g.real();
    T gi = g.imag();
    T da_r = 0;
    T da_i = 0;
    if (v.real() < T(0)) {
      da_r = v.real() * gr;
      gr *= a.real();
    }
    if (v.imag() < T(0)) {
      da_i = v.imag() * gi;
      gi *= a.imag();
    }
    dalpha[c] += std::complex<T>(da_r, da_i);
    dx[i] = {gr, gi};
  }
  return dx;
}

template <typename T>
void CPReLU<T>::collect_parameters(const std::string& prefix, std::vector<NamedTensor<T>>& out) {
  out.push_back({prefix + "alpha", &alpha_});
}

template class CPReLU<float>;
template class CPReLU<double>;

}  // namespace rtfnet::cvnn
