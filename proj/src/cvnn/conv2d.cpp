#include "rtfnet/cvnn/conv2d.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "rtfnet/errors.hpp"

namespace rtfnet::cvnn {

namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Geometry {
  std::size_t in_h, in_w, out_h, out_w, pad_h, pad_w;
};

// Lower one batch item into a (out_h*out_w) x (kh*kw*cin) patch matrix.
template <typename T>
void im2col(const std::complex<T>* x, const Geometry& g, const Conv2dOptions& o,
            std::complex<T>* cols, std::size_t ld) {
  const std::size_t cin = o.in_channels;
  std::fill(cols, cols + g.out_h * g.out_w * ld, std::complex<T>{});
  for (std::size_t oh = 0; oh < g.out_h; ++oh) {
    for (std::size_t ow = 0; ow < g.out_w; ++ow) {
      std::complex<T>* row = cols + (oh * g.out_w + ow) * ld;
      for (std::size_t kh = 0; kh < o.kernel_h; ++kh) {
        const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * o.stride_h + kh) -
                                  static_cast<std::ptrdiff_t>(g.pad_h);
        if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(g.in_h)) continue;
        for (std::size_t kw = 0; kw < o.kernel_w; ++kw) {
          const std::ptrdiff_t iw = static_cast<std::ptrdiff_t>(ow * o.stride_w + kw) -
                                    static_cast<std::ptrdiff_t>(g.pad_w);
          if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(g.in_w)) continue;
          const std::complex<T>* src = x + (static_cast<std::size_t>(ih) * g.in_w + iw) * cin;
          std::copy(src, src + cin, row + (kh * o.kernel_w + kw) * cin);
        }
      }
    }
  }
}

// Scatter-add adjoint of im2col.
template <typename T>
void col2im(const std::complex<T>* cols, std::size_t ld, const Geometry& g, const Conv2dOptions& o,
            std::complex<T>* dx) {
  const std::size_t cin = o.in_channels;
  for (std::size_t oh = 0; oh < g.out_h; ++oh) {
    for (std::size_t ow = 0; ow < g.out_w; ++ow) {
      const std::complex<T>* row = cols + (oh * g.out_w + ow) * ld;
      for (std::size_t kh = 0; kh < o.kernel_h; ++kh) {
        const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * o.stride_h + kh) -
                                  static_cast<std::ptrdiff_t>(g.pad_h);
        if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(g.in_h)) continue;
        for (std::size_t kw = 0; kw < o.kernel_w; ++kw) {
          const std::ptrdiff_t iw = static_cast<std::ptrdiff_t>(ow * o.stride_w + kw) -
                                    static_cast<std::ptrdiff_t>(g.pad_w);
          if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(g.in_w)) continue;
          std::complex<T>* dst = dx + (static_cast<std::size_t>(ih) * g.in_w + iw) * cin;
          const std::complex<T>* src = row + (kh * o.kernel_w + kw) * cin;
          for (std::size_t c = 0; c < cin; ++c) dst[c] += src[c];
        }
      }
    }
  }
}

Geometry geometry(const Shape& in, const Conv2dOptions& o) {
  Geometry g;
  g.in_h = in[1];
  g.in_w = in[2];
  g.out_h = same_output_extent(g.in_h, o.stride_h);
  g.out_w = same_output_extent(g.in_w, o.stride_w);
  g.pad_h = same_pad_before(g.in_h, o.kernel_h, o.stride_h);
  g.pad_w = same_pad_before(g.in_w, o.kernel_w, o.stride_w);
  return g;
}

bool is_pointwise(const Conv2dOptions& o) {
  return o.kernel_h == 1 && o.kernel_w == 1 && o.stride_h == 1 && o.stride_w == 1;
}

// Batch items lowered together so each GEMM reads the weights once; capped
// at about 8M complex entries of patch matrix.
std::size_t chunk_items(std::size_t batch, std::size_t rows, std::size_t patch) {
  constexpr std::size_t kCap = std::size_t{1} << 23;
  return std::clamp<std::size_t>(kCap / std::max<std::size_t>(1, rows * patch), 1, batch);
}

}  // namespace

std::size_t same_output_extent(std::size_t in, std::size_t stride) {
  return (in + stride - 1) / stride;
}

std::size_t same_pad_before(std::size_t in, std::size_t kernel, std::size_t stride) {
  const std::size_t out = same_output_extent(in, stride);
  const std::size_t needed = (out - 1) * stride + kernel;
  const std::size_t total = needed > in ? needed - in : 0;
  return total / 2;
}

template <typename T>
ComplexConv2d<T>::ComplexConv2d(const Conv2dOptions& options)
    : options_(options),
      weight_({options.kernel_h, options.kernel_w, options.in_channels, options.out_channels}),
      bias_({options.bias ? options.out_channels : 0}) {
  if (options.in_channels == 0 || options.out_channels == 0 || options.kernel_h == 0 ||
      options.kernel_w == 0 || options.stride_h == 0 || options.stride_w == 0) {
    throw ArgumentError("ComplexConv2d: channels, kernel and stride must be positive");
  }
}

template <typename T>
void ComplexConv2d<T>::initialize(Rng& rng) {
  const double fan_in =
      static_cast<double>(options_.kernel_h * options_.kernel_w * options_.in_channels);
  const double sigma = 1.0 / std::sqrt(fan_in);
  for (auto& w : weight_.values()) {
    const double magnitude = sigma * std::sqrt(-2.0 * std::log(1.0 - rng.uniform()));
    const double phase = rng.uniform(-std::numbers::pi, std::numbers::pi);
    w = std::complex<T>(static_cast<T>(magnitude * std::cos(phase)),
                        static_cast<T>(magnitude * std::sin(phase)));
  }
  bias_.fill({});
}

template <typename T>
Shape ComplexConv2d<T>::output_shape(const Shape& in) const {
  if (in.size() != 4 || in[3] != options_.in_channels) {
    throw ArgumentError("ComplexConv2d: input " + shape_string(in) + " does not have " +
                        std::to_string(options_.in_channels) + " channels");
  }
  return {in[0], same_output_extent(in[1], options_.stride_h),
          same_output_extent(in[2], options_.stride_w), options_.out_channels};
}

template <typename T>
ComplexTensor<T> ComplexConv2d<T>::forward(const ComplexTensor<T>& x) {
  const Shape out_shape = output_shape(x.shape());
  const Geometry g = geometry(x.shape(), options_);
  const std::size_t batch = x.dim(0);
  const std::size_t patch = options_.kernel_h * options_.kernel_w * options_.in_channels;
  const std::size_t rows = g.out_h * g.out_w;
  const std::size_t cout = options_.out_channels;
  const std::size_t in_size = g.in_h * g.in_w * options_.in_channels;

  ComplexTensor<T> y(out_shape);
  Eigen::Map<const RowMatrix<T>> weights(weight_.data(), patch, cout);
  const std::size_t chunk = chunk_items(batch, rows, patch);
  RowMatrix<T> cols;
  for (std::size_t n0 = 0; n0 < batch; n0 += chunk) {
    const std::size_t items = std::min(chunk, batch - n0);
    const std::size_t r = items * rows;
    Eigen::Map<RowMatrix<T>> yc(y.data() + n0 * rows * cout, r, cout);
    if (is_pointwise(options_)) {
      yc.noalias() = Eigen::Map<const RowMatrix<T>>(x.data() + n0 * in_size, r, patch) * weights;
    } else {
      cols.resize(r, patch);
      for (std::size_t i = 0; i < items; ++i) {
        im2col(x.data() + (n0 + i) * in_size, g, options_, cols.data() + i * rows * patch, patch);
      }
      yc.noalias() = cols * weights;
    }
    if (options_.bias) {
      Eigen::Map<const Eigen::Matrix<std::complex<T>, 1, Eigen::Dynamic>> b(bias_.data(), cout);
      yc.rowwise() += b;
    }
  }
  input_ = x;
  has_context_ = true;
  return y;
}

template <typename T>
ComplexTensor<T> ComplexConv2d<T>::backward(const ComplexTensor<T>& grad_out) {
  if (!has_context_) throw ArgumentError("ComplexConv2d::backward: no forward context");
  grad_out.expect_shape(output_shape(input_.shape()), "ComplexConv2d::backward");
  const Geometry g = geometry(input_.shape(), options_);
  const std::size_t batch = input_.dim(0);
  const std::size_t patch = options_.kernel_h * options_.kernel_w * options_.in_channels;
  const std::size_t rows = g.out_h * g.out_w;
  const std::size_t cout = options_.out_channels;
  const std::size_t in_size = g.in_h * g.in_w * options_.in_channels;

  ComplexTensor<T> dx(input_.shape());
  Eigen::Map<const RowMatrix<T>> weights(weight_.data(), patch, cout);
  Eigen::Map<RowMatrix<T>> dweights(weight_.grad().data(), patch, cout);
  std::complex<T>* dbias = options_.bias ? bias_.grad().data() : nullptr;

  const std::size_t chunk = chunk_items(batch, rows, patch);
  RowMatrix<T> cols;
  RowMatrix<T> dcols;
  for (std::size_t n0 = 0; n0 < batch; n0 += chunk) {
    const std::size_t items = std::min(chunk, batch - n0);
    const std::size_t r = items * rows;
    Eigen::Map<const RowMatrix<T>> dyc(grad_out.data() + n0 * rows * cout, r, cout);
    // g_x = conj(W) g_y, g_W = conj(x) g_y in the packed-gradient convention.
    if (is_pointwise(options_)) {
      Eigen::Map<const RowMatrix<T>> xmat(input_.data() + n0 * in_size, r, patch);
      dweights.noalias() += xmat.adjoint() * dyc;
      Eigen::Map<RowMatrix<T>>(dx.data() + n0 * in_size, r, patch).noalias() = dyc * weights.adjoint();
    } else {
      cols.resize(r, patch);
      for (std::size_t i = 0; i < items; ++i) {
        im2col(input_.data() + (n0 + i) * in_size, g, options_, cols.data() + i * rows * patch, patch);
      }
      dweights.noalias() += cols.adjoint() * dyc;
      dcols.resize(r, patch);
      dcols.noalias() = dyc * weights.adjoint();
      for (std::size_t i = 0; i < items; ++i) {
        col2im(dcols.data() + i * rows * patch, patch, g, options_, dx.data() + (n0 + i) * in_size);
      }
    }
    if (dbias) {
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t c = 0; c < cout; ++c) dbias[c] += dyc(i, c);
      }
    }
  }
  return dx;
}

template <typename T>
void ComplexConv2d<T>::collect_parameters(const std::string& prefix,
                                          std::vector<NamedTensor<T>>& out) {
  out.push_back({prefix + "weight", &weight_});
  if (options_.bias) out.push_back({prefix + "bias", &bias_});
}

template class ComplexConv2d<float>;
template class ComplexConv2d<double>;

}  // namespace rtfnet::cvnn
