#include <gtest/gtest.h>

#include "isomorphism.hpp"
#include "rtfnet/rng.hpp"

using namespace rtfnet;
using namespace rtfnet::cvnn;

namespace {

std::vector<iso::Cx> random_values(std::size_t n, Rng& rng) {
  std::vector<iso::Cx> v(n);
  for (auto& z : v) z = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return v;
}

}  // namespace

class Isomorphism : public ::testing::TestWithParam<std::tuple<std::size_t, std::size_t>> {};

TEST_P(Isomorphism, ComplexConvEqualsBlockRealConv) {
  const auto [kernel, stride] = GetParam();
  Rng rng(100 + kernel * 10 + stride);
  Conv2dOptions o;
  o.in_channels = 3;
  o.out_channels = 2;
  o.kernel_h = o.kernel_w = kernel;
  o.stride_h = o.stride_w = stride;
  ComplexConv2d<double> conv(o);
  conv.initialize(rng);
  for (auto& b : conv.bias().values()) b = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  const std::size_t n = 2, h = 5, w = 6;
  const auto x = random_values(n * h * w * 3, rng);
  const std::size_t oh = (h + stride - 1) / stride, ow = (w + stride - 1) / stride;
  const auto up = random_values(n * oh * ow * 2, rng);
  const auto c = iso::compare(conv, x, n, h, w, up);
  EXPECT_LT(c.output, 1e-10);
  EXPECT_LT(c.input_grad, 1e-10);
  EXPECT_LT(c.weight_grad, 1e-10);
  EXPECT_LT(c.bias_grad, 1e-10);
}

INSTANTIATE_TEST_SUITE_P(KernelsAndStrides, Isomorphism,
                         ::testing::Combine(::testing::Values(1, 3), ::testing::Values(1, 2)));
