#include "rtfnet/cvnn/adam.hpp"

#include <Eigen/Core>
#include <cmath>

#include "rtfnet/errors.hpp"

namespace rtfnet::cvnn {

template <typename T>
void Adam<T>::step(std::span<const NamedTensor<T>> params) {
  for (const auto& p : params) {
    if (!p.tensor->has_grad()) continue;
    const auto g = p.tensor->grad();
    const Eigen::Map<const Eigen::Array<T, Eigen::Dynamic, 1>> flat(reinterpret_cast<const T*>(g.data()),
                                                                    static_cast<Eigen::Index>(2 * g.size()));
    if (!flat.isFinite().all()) throw NumericalError("Adam: non-finite gradient in " + p.name);
  }
  ++steps_;
  const T b1 = static_cast<T>(config_.beta1);
  const T b2 = static_cast<T>(config_.beta2);
  const T c1 = static_cast<T>(1.0 - std::pow(config_.beta1, static_cast<double>(steps_)));
  const T c2 = static_cast<T>(1.0 - std::pow(config_.beta2, static_cast<double>(steps_)));
  const T lr = static_cast<T>(config_.lr);
  const T eps = static_cast<T>(config_.eps);
  using Array = Eigen::Array<T, Eigen::Dynamic, 1>;
  // Complex storage viewed as interleaved reals: re and im get independent moments.
  auto real_view = [](std::complex<T>* data, std::size_t n) {
    return Eigen::Map<Array>(reinterpret_cast<T*>(data), static_cast<Eigen::Index>(2 * n));
  };
  for (const auto& p : params) {
    if (!p.tensor->has_grad()) continue;
    auto& m_t = m_.try_emplace(p.name, p.tensor->shape()).first->second;
    auto& v_t = v_.try_emplace(p.name, p.tensor->shape()).first->second;
    const std::size_t n = p.tensor->size();
    auto x = real_view(p.tensor->data(), n);
    auto g = real_view(p.tensor->grad().data(), n);
    auto m = real_view(m_t.data(), n);
    auto v = real_view(v_t.data(), n);
    m = b1 * m + (T(1) - b1) * g;
    v = b2 * v + (T(1) - b2) * g * g;
    x -= lr * (m / c1) / ((v / c2).sqrt() + eps);
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace rtfnet::cvnn
