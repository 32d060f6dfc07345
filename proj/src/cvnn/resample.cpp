#include "rtfnet/cvnn/resample.hpp"

#include <algorithm>

#include "rtfnet/errors.hpp"

namespace rtfnet::cvnn {

namespace {

void expect_rank4(const Shape& s, const char* what) {
  if (s.size() != 4) throw ArgumentError(std::string(what) + ": expected NHWC tensor, got " + shape_string(s));
}

}  // namespace

template <typename T>
ComplexTensor<T> upsample2x(const ComplexTensor<T>& x) {
  expect_rank4(x.shape(), "upsample2x");
  const auto& s = x.shape();
  ComplexTensor<T> y({s[0], 2 * s[1], 2 * s[2], s[3]});
  for (std::size_t n = 0; n < s[0]; ++n)
    for (std::size_t h = 0; h < 2 * s[1]; ++h)
      for (std::size_t w = 0; w < 2 * s[2]; ++w) {
        const auto* src = &x.at(n, h / 2, w / 2, 0);
        std::copy(src, src + s[3], &y.at(n, h, w, 0));
      }
  return y;
}

template <typename T>
ComplexTensor<T> upsample2x_backward(const ComplexTensor<T>& grad_out) {
  expect_rank4(grad_out.shape(), "upsample2x_backward");
  const auto& s = grad_out.shape();
  if (s[1] % 2 || s[2] % 2) throw ArgumentError("upsample2x_backward: odd spatial extent");
  ComplexTensor<T> dx({s[0], s[1] / 2, s[2] / 2, s[3]});
  for (std::size_t n = 0; n < s[0]; ++n)
    for (std::size_t h = 0; h < s[1]; ++h)
      for (std::size_t w = 0; w < s[2]; ++w) {
        const auto* src = &grad_out.at(n, h, w, 0);
        auto* dst = &dx.at(n, h / 2, w / 2, 0);
        for (std::size_t c = 0; c < s[3]; ++c) dst[c] += src[c];
      }
  return dx;
}

template <typename T>
ComplexTensor<T> downsample2x_pick(const ComplexTensor<T>& x) {
  expect_rank4(x.shape(), "downsample2x_pick");
  const auto& s = x.shape();
  ComplexTensor<T> y({s[0], (s[1] + 1) / 2, (s[2] + 1) / 2, s[3]});
  for (std::size_t n = 0; n < s[0]; ++n)
    for (std::size_t h = 0; h < y.dim(1); ++h)
      for (std::size_t w = 0; w < y.dim(2); ++w) {
        const auto* src = &x.at(n, 2 * h, 2 * w, 0);
        std::copy(src, src + s[3], &y.at(n, h, w, 0));
      }
  return y;
}

template <typename T>
ComplexTensor<T> concat_channels(const ComplexTensor<T>& a, const ComplexTensor<T>& b) {
  expect_rank4(a.shape(), "concat_channels");
  expect_rank4(b.shape(), "concat_channels");
  if (!std::equal(a.shape().begin(), a.shape().begin() + 3, b.shape().begin())) {
    throw ArgumentError("concat_channels: " + shape_string(a.shape()) + " vs " +
                        shape_string(b.shape()));
  }
  const std::size_t ca = a.dim(3), cb = b.dim(3);
  const std::size_t pixels = a.size() / ca;
  ComplexTensor<T> y({a.dim(0), a.dim(1), a.dim(2), ca + cb});
  for (std::size_t p = 0; p < pixels; ++p) {
    std::copy(a.data() + p * ca, a.data() + (p + 1) * ca, y.data() + p * (ca + cb));
    std::copy(b.data() + p * cb, b.data() + (p + 1) * cb, y.data() + p * (ca + cb) + ca);
  }
  return y;
}

template <typename T>
void split_channels(const ComplexTensor<T>& joined, std::size_t first_channels,
                    ComplexTensor<T>& first, ComplexTensor<T>& second) {
  expect_rank4(joined.shape(), "split_channels");
  const std::size_t c = joined.dim(3);
  if (first_channels > c) throw ArgumentError("split_channels: split beyond channel count");
  const std::size_t cb = c - first_channels;
  const std::size_t pixels = joined.size() / c;
  first = ComplexTensor<T>({joined.dim(0), joined.dim(1), joined.dim(2), first_channels});
  second = ComplexTensor<T>({joined.dim(0), joined.dim(1), joined.dim(2), cb});
  for (std::size_t p = 0; p < pixels; ++p) {
    const auto* src = joined.data() + p * c;
    std::copy(src, src + first_channels, first.data() + p * first_channels);
    std::copy(src + first_channels, src + c, second.data() + p * cb);
  }
}

template <typename T>
ComplexTensor<T> leading_channels(const ComplexTensor<T>& x, std::size_t channels) {
  ComplexTensor<T> head, tail;
  split_channels(x, channels, head, tail);
  return head;
}

template <typename T>
ComplexTensor<T> pad_channels(const ComplexTensor<T>& x, std::size_t channels) {
  expect_rank4(x.shape(), "pad_channels");
  if (channels < x.dim(3)) throw ArgumentError("pad_channels: target narrower than input");
  return concat_channels(x, ComplexTensor<T>({x.dim(0), x.dim(1), x.dim(2), channels - x.dim(3)}));
}

#define RTFNET_INSTANTIATE(T)                                                              \
  template ComplexTensor<T> upsample2x(const ComplexTensor<T>&);                           \
  template ComplexTensor<T> upsample2x_backward(const ComplexTensor<T>&);                  \
  template ComplexTensor<T> downsample2x_pick(const ComplexTensor<T>&);                    \
  template ComplexTensor<T> concat_channels(const ComplexTensor<T>&, const ComplexTensor<T>&); \
  template void split_channels(const ComplexTensor<T>&, std::size_t, ComplexTensor<T>&,     \
                               ComplexTensor<T>&);                                         \
  template ComplexTensor<T> leading_channels(const ComplexTensor<T>&, std::size_t);         \
  template ComplexTensor<T> pad_channels(const ComplexTensor<T>&, std::size_t);

RTFNET_INSTANTIATE(float)
RTFNET_INSTANTIATE(double)
#undef RTFNET_INSTANTIATE

}  // namespace rtfnet::cvnn
