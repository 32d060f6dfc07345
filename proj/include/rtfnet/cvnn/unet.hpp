#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rtfnet/cvnn/batchnorm.hpp"
#include "rtfnet/cvnn/conv2d.hpp"
#include "rtfnet/cvnn/cprelu.hpp"
#include "rtfnet/cvnn/tensor.hpp"
#include "rtfnet/rng.hpp"

namespace rtfnet::cvnn {

/// One convolutional stage of the U-Net.
struct LayerSpec {
  std::size_t filters = 1;
  std::size_t kernel = 3;
  std::size_t stride = 1;
  bool upsample_before = false;
  // Encoder stage whose *input* is concatenated after the upsampled input.
  std::optional<std::size_t> skip_from;
  // CPReLU followed by complex batch norm after the convolution.
  bool activation_and_norm = false;
};

/// Encoder of `depth` stride-2 stages, decoder of `depth` upsampling stages
/// with skip connections in mirror order, then a 1x1 head. The network
/// output is the first `out_channels` channels of the head.
struct UNetSpec {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::vector<LayerSpec> encoder;
  std::vector<LayerSpec> decoder;

  // 128/256/512/1024 encoder, 512/256/128/2K/2K decoder, input 2K, output K.
  static UNetSpec standard(std::size_t k);
  // Same topology with a chosen encoder width list; decoder mirrors it.
  static UNetSpec with_widths(std::size_t k, const std::vector<std::size_t>& encoder_filters,
                              bool activation_and_norm = true);

  std::size_t depth() const { return encoder.size(); }
  // Spatial extents must be divisible by this.
  std::size_t spatial_multiple() const { return std::size_t{1} << depth(); }
  void validate() const;
};

/// Complex-valued U-Net with hand-written reverse pass. Parameters are owned
/// by the network; forward caches what backward needs.
template <typename T>
class UNet {
 public:
  explicit UNet(UNetSpec spec);
  UNet(const UNet&) = delete;
  UNet& operator=(const UNet&) = delete;

  void initialize(Rng& rng);

  // input [N, W, H, in_channels] -> [N, W, H, out_channels]
  ComplexTensor<T> forward(const ComplexTensor<T>& input, Phase phase);
  // Accumulates parameter gradients; returns the input gradient.
  ComplexTensor<T> backward(const ComplexTensor<T>& grad_output);

  const UNetSpec& spec() const { return spec_; }
  // Output shape of every encoder then decoder stage in the last forward.
  const std::vector<Shape>& stage_output_shapes() const { return stage_shapes_; }
  std::vector<NamedTensor<T>> parameters();
  std::vector<NamedTensor<T>> buffers();
  void zero_grad();
  // Real scalar count: every complex entry counts as two.
  std::size_t real_parameter_count();

 private:
  struct Stage {
    LayerSpec spec;
    std::unique_ptr<ComplexConv2d<T>> conv;
    std::unique_ptr<CPReLU<T>> act;
    std::unique_ptr<ComplexBatchNorm<T>> norm;
    std::size_t upsampled_channels = 0;  // channels before the skip concat
  };

  ComplexTensor<T> run_stage(Stage& stage, const ComplexTensor<T>& x, Phase phase);
  ComplexTensor<T> back_stage(Stage& stage, const ComplexTensor<T>& grad);

  UNetSpec spec_;
  std::vector<Stage> encoder_;
  std::vector<Stage> decoder_;
  std::size_t head_channels_ = 0;
  std::vector<Shape> stage_shapes_;
  bool has_context_ = false;
};

extern template class UNet<float>;
extern template class UNet<double>;

}  // namespace rtfnet::cvnn
