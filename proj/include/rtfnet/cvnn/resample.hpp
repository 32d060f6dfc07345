#pragma once

#include <cstddef>

#include "rtfnet/cvnn/tensor.hpp"

namespace rtfnet::cvnn {

// Nearest-neighbour 2x upsampling of the two spatial axes.
template <typename T>
ComplexTensor<T> upsample2x(const ComplexTensor<T>& x);
// Adjoint: each input cell receives the sum of its four replicas.
template <typename T>
ComplexTensor<T> upsample2x_backward(const ComplexTensor<T>& grad_out);

// Top-left sample of every 2x2 block.
template <typename T>
ComplexTensor<T> downsample2x_pick(const ComplexTensor<T>& x);

// Channel concatenation [a b] and its split adjoint.
template <typename T>
ComplexTensor<T> concat_channels(const ComplexTensor<T>& a, const ComplexTensor<T>& b);
template <typename T>
void split_channels(const ComplexTensor<T>& joined, std::size_t first_channels,
                    ComplexTensor<T>& first, ComplexTensor<T>& second);

// First `channels` channels of an NHWC tensor, and the zero-padded adjoint.
template <typename T>
ComplexTensor<T> leading_channels(const ComplexTensor<T>& x, std::size_t channels);
template <typename T>
ComplexTensor<T> pad_channels(const ComplexTensor<T>& x, std::size_t channels);

}  // namespace rtfnet::cvnn
