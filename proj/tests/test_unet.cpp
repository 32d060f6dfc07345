#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <string>

#include "gradcheck.hpp"
#include "rtfnet/cvnn/unet.hpp"
#include "rtfnet/errors.hpp"

using namespace rtfnet;
using namespace rtfnet::cvnn;

namespace {

// Independent count from tests/oracles/param_count.py.
constexpr std::size_t kStandardParamsK40 = 31489856;
constexpr std::size_t kStandardParamsK8 = 31071808;

}  // namespace

TEST(UNet, StandardShapeTrace) {
  UNet<float> net(UNetSpec::standard(40));
  Rng rng(1);
  net.initialize(rng);
  ComplexTensor<float> x({1, 32, 32, 80});
  for (auto& v : x.values()) v = {static_cast<float>(rng.uniform(-1, 1)), static_cast<float>(rng.uniform(-1, 1))};
  const auto y = net.forward(x, Phase::kInference);
  EXPECT_EQ(y.shape(), (Shape{1, 32, 32, 40}));
  const std::vector<Shape> expected = {{1, 16, 16, 128}, {1, 8, 8, 256},   {1, 4, 4, 512},
                                       {1, 2, 2, 1024},  {1, 4, 4, 512},   {1, 8, 8, 256},
                                       {1, 16, 16, 128}, {1, 32, 32, 80},  {1, 32, 32, 80}};
  EXPECT_EQ(net.stage_output_shapes(), expected);
  EXPECT_TRUE(y.all_finite());
}

TEST(UNet, FrozenParameterCount) {
  UNet<float> net40(UNetSpec::standard(40));
  EXPECT_EQ(net40.real_parameter_count(), kStandardParamsK40);
  UNet<float> net8(UNetSpec::standard(8));
  EXPECT_EQ(net8.real_parameter_count(), kStandardParamsK8);
}

TEST(UNet, InferenceIsBitIdentical) {
  UNet<float> net(UNetSpec::with_widths(4, {8, 16, 32}));
  Rng rng(2);
  net.initialize(rng);
  ComplexTensor<float> x({2, 16, 8, 8});
  for (auto& v : x.values()) v = {static_cast<float>(rng.uniform(-1, 1)), static_cast<float>(rng.uniform(-1, 1))};
  const auto a = net.forward(x, Phase::kInference);
  const auto b = net.forward(x, Phase::kInference);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(a[0])), 0);
}

TEST(UNet, RejectsIndivisibleGrid) {
  UNet<float> net(UNetSpec::with_widths(2, {4, 4, 4}));
  ComplexTensor<float> x({1, 12, 8, 4});
  try {
    net.forward(x, Phase::kInference);
    FAIL() << "expected ArgumentError";
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("divisible by 8"), std::string::npos);
  }
}

TEST(UNet, RejectsWrongChannelCount) {
  UNet<float> net(UNetSpec::with_widths(2, {4, 4}));
  ComplexTensor<float> x({1, 8, 8, 3});
  EXPECT_THROW(net.forward(x, Phase::kInference), ArgumentError);
}

TEST(UNet, BackwardWithoutForwardThrows) {
  UNet<double> net(UNetSpec::with_widths(2, {4, 4}));
  ComplexTensor<double> g({1, 8, 8, 2});
  EXPECT_THROW(net.backward(g), ArgumentError);
}

TEST(UNet, TinyNetworkGradientsMatchFiniteDifferences) {
  // Two encoder stages, two upsampling decoder stages and the 1x1 head.
  UNet<double> net(UNetSpec::with_widths(2, {4, 6}));
  Rng rng(3);
  net.initialize(rng);
  for (auto& p : net.parameters()) {
    if (p.name.find("bias") != std::string::npos || p.name.find("bn.beta") != std::string::npos) {
      gradcheck::fill_random(*p.tensor, rng, 0.1);
    }
  }
  ComplexTensor<double> x({2, 8, 8, 4});
  gradcheck::fill_random(x, rng);
  auto y = net.forward(x, Phase::kTraining);
  const auto r = gradcheck::random_like(y, rng);
  net.zero_grad();
  auto dx = net.backward(gradcheck::loss_grad(y, r));

  std::vector<gradcheck::Probe> probes = {{"input", &x, {dx.values().begin(), dx.values().end()}}};
  for (auto& p : net.parameters()) probes.push_back({p.name, p.tensor, gradcheck::grad_of(*p.tensor)});
  const auto res =
      gradcheck::check(probes, [&] { return net.forward(x, Phase::kTraining); }, r, rng, 300, 1e-5);
  EXPECT_GE(res.checked, 100u);
  EXPECT_LT(res.worst, 1e-4) << res.where;
}
