#include "rtfnet/cvnn/unet.hpp"

#include "rtfnet/cvnn/resample.hpp"
#include "rtfnet/errors.hpp"

namespace rtfnet::cvnn {

UNetSpec UNetSpec::standard(std::size_t k) { return with_widths(k, {128, 256, 512, 1024}); }

UNetSpec UNetSpec::with_widths(std::size_t k, const std::vector<std::size_t>& widths,
                               bool activation_and_norm) {
  UNetSpec spec;
  spec.in_channels = 2 * k;
  spec.out_channels = k;
  const std::size_t depth = widths.size();
  for (std::size_t i = 0; i < depth; ++i) {
    LayerSpec layer;
    layer.filters = widths[i];
    layer.stride = 2;
    layer.activation_and_norm = activation_and_norm && i > 0;
    spec.encoder.push_back(layer);
  }
  for (std::size_t j = 0; j < depth; ++j) {
    LayerSpec layer;
    const bool last = j + 1 == depth;
    layer.filters = last ? 2 * k : widths[depth - 2 - j];
    layer.upsample_before = true;
    layer.skip_from = depth - 1 - j;
    layer.activation_and_norm = activation_and_norm && !last;
    spec.decoder.push_back(layer);
  }
  LayerSpec head;
  head.filters = 2 * k;
  head.kernel = 1;
  spec.decoder.push_back(head);
  return spec;
}

void UNetSpec::validate() const {
  if (in_channels == 0 || out_channels == 0) throw ArgumentError("UNetSpec: channel counts must be positive");
  if (encoder.empty() || decoder.empty()) throw ArgumentError("UNetSpec: empty encoder or decoder");
  for (const auto* list : {&encoder, &decoder}) {
    for (const auto& l : *list) {
      if (l.filters == 0 || l.kernel == 0 || l.stride == 0) {
        throw ArgumentError("UNetSpec: filters, kernel and stride must be positive");
      }
      if (l.skip_from && *l.skip_from >= encoder.size()) {
        throw ArgumentError("UNetSpec: skip source out of range");
      }
    }
  }
  if (decoder.back().filters < out_channels) {
    throw ArgumentError("UNetSpec: head narrower than the requested output");
  }
}

template <typename T>
UNet<T>::UNet(UNetSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  // Channel bookkeeping mirrors the forward pass.
  std::vector<std::size_t> encoder_inputs;
  std::size_t channels = spec_.in_channels;
  auto make_stage = [](const LayerSpec& l, std::size_t in) {
    Stage s;
    s.spec = l;
    Conv2dOptions o;
    o.in_channels = in;
    o.out_channels = l.filters;
    o.kernel_h = o.kernel_w = l.kernel;
    o.stride_h = o.stride_w = l.stride;
    s.conv = std::make_unique<ComplexConv2d<T>>(o);
    if (l.activation_and_norm) {
      s.act = std::make_unique<CPReLU<T>>(l.filters);
      s.norm = std::make_unique<ComplexBatchNorm<T>>(l.filters);
    }
    return s;
  };
  for (const auto& l : spec_.encoder) {
    encoder_inputs.push_back(channels);
    encoder_.push_back(make_stage(l, channels));
    channels = l.filters;
  }
  for (const auto& l : spec_.decoder) {
    std::size_t in = channels;
    const std::size_t before = channels;
    if (l.skip_from) in += encoder_inputs[*l.skip_from];
    decoder_.push_back(make_stage(l, in));
    decoder_.back().upsampled_channels = before;
    channels = l.filters;
  }
  head_channels_ = channels;
}

template <typename T>
void UNet<T>::initialize(Rng& rng) {
  for (auto* list : {&encoder_, &decoder_})
    for (auto& s : *list) s.conv->initialize(rng);
}

template <typename T>
ComplexTensor<T> UNet<T>::run_stage(Stage& stage, const ComplexTensor<T>& x, Phase phase) {
  ComplexTensor<T> y = stage.conv->forward(x);
  if (stage.act) {
    y = stage.act->forward(y);
    y = stage.norm->forward(y, phase);
  }
  return y;
}

template <typename T>
ComplexTensor<T> UNet<T>::back_stage(Stage& stage, const ComplexTensor<T>& grad) {
  ComplexTensor<T> g = grad;
  if (stage.act) {
    g = stage.norm->backward(g);
    g = stage.act->backward(g);
  }
  return stage.conv->backward(g);
}

template <typename T>
ComplexTensor<T> UNet<T>::forward(const ComplexTensor<T>& input, Phase phase) {
  if (input.rank() != 4 || input.dim(3) != spec_.in_channels) {
    throw ArgumentError("UNet: input " + shape_string(input.shape()) + " must be NHWC with " +
                        std::to_string(spec_.in_channels) + " channels");
  }
  const std::size_t m = spec_.spatial_multiple();
  if (input.dim(1) % m || input.dim(2) % m) {
    throw ArgumentError("UNet: spatial extents " + std::to_string(input.dim(1)) + "x" +
                        std::to_string(input.dim(2)) + " not divisible by " + std::to_string(m));
  }
  // Encoder inputs are kept for the skip connections.
  std::vector<ComplexTensor<T>> encoder_inputs;
  encoder_inputs.reserve(encoder_.size());
  ComplexTensor<T> x = input;
  stage_shapes_.clear();
  for (auto& stage : encoder_) {
    encoder_inputs.push_back(x);
    x = run_stage(stage, x, phase);
    stage_shapes_.push_back(x.shape());
  }
  for (auto& stage : decoder_) {
    if (stage.spec.upsample_before) x = upsample2x(x);
    if (stage.spec.skip_from) x = concat_channels(x, encoder_inputs[*stage.spec.skip_from]);
    x = run_stage(stage, x, phase);
    stage_shapes_.push_back(x.shape());
  }
  has_context_ = true;
  return leading_channels(x, spec_.out_channels);
}

template <typename T>
ComplexTensor<T> UNet<T>::backward(const ComplexTensor<T>& grad_output) {
  if (!has_context_) throw ArgumentError("UNet::backward: no forward context");
  ComplexTensor<T> g = pad_channels(grad_output, head_channels_);
  // Gradients arriving at encoder inputs through skip connections.
  std::vector<ComplexTensor<T>> skip_grads(encoder_.size());
  for (std::size_t j = decoder_.size(); j-- > 0;) {
    auto& stage = decoder_[j];
    g = back_stage(stage, g);
    if (stage.spec.skip_from) {
      ComplexTensor<T> main, skip;
      split_channels(g, stage.upsampled_channels, main, skip);
      skip_grads[*stage.spec.skip_from] = std::move(skip);
      g = std::move(main);
    }
    if (stage.spec.upsample_before) g = upsample2x_backward(g);
  }
  for (std::size_t i = encoder_.size(); i-- > 0;) {
    g = back_stage(encoder_[i], g);
    if (!skip_grads[i].empty()) {
      for (std::size_t e = 0; e < g.size(); ++e) g[e] += skip_grads[i][e];
    }
  }
  return g;
}

template <typename T>
std::vector<NamedTensor<T>> UNet<T>::parameters() {
  std::vector<NamedTensor<T>> out;
  auto add = [&](std::vector<Stage>& stages, const std::string& tag) {
    for (std::size_t i = 0; i < stages.size(); ++i) {
      const std::string p = tag + std::to_string(i) + ".";
      stages[i].conv->collect_parameters(p + "conv.", out);
      if (stages[i].act) {
        stages[i].act->collect_parameters(p + "act.", out);
        stages[i].norm->collect_parameters(p + "bn.", out);
      }
    }
  };
  add(encoder_, "enc");
  add(decoder_, "dec");
  return out;
}

template <typename T>
std::vector<NamedTensor<T>> UNet<T>::buffers() {
  std::vector<NamedTensor<T>> out;
  auto add = [&](std::vector<Stage>& stages, const std::string& tag) {
    for (std::size_t i = 0; i < stages.size(); ++i) {
      if (stages[i].norm) stages[i].norm->collect_buffers(tag + std::to_string(i) + ".bn.", out);
    }
  };
  add(encoder_, "enc");
  add(decoder_, "dec");
  return out;
}

template <typename T>
void UNet<T>::zero_grad() {
  for (auto& p : parameters()) p.tensor->zero_grad();
}

template <typename T>
std::size_t UNet<T>::real_parameter_count() {
  std::size_t n = 0;
  for (auto& p : parameters()) n += 2 * p.tensor->size();
  return n;
}

template class UNet<float>;
template class UNet<double>;

}  // namespace rtfnet::cvnn
