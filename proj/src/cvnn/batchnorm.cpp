#include "rtfnet/cvnn/batchnorm.hpp"

#include <cmath>
#include <numbers>

#include "rtfnet/errors.hpp"

namespace rtfnet::cvnn {

Sym2 inverse_sqrt(const Sym2& v) {
  const double det = v.rr * v.ii - v.ri * v.ri;
  if (!(det > 0.0) || !(v.rr > 0.0)) throw NumericalError("inverse_sqrt: matrix is not positive definite");
  const double s = std::sqrt(det);
  const double t = std::sqrt(v.rr + v.ii + 2.0 * s);
  const double inv = 1.0 / (s * t);
  return {(v.ii + s) * inv, -v.ri * inv, (v.rr + s) * inv};
}

namespace {

// Eigenpairs of a symmetric 2x2 matrix via the Jacobi rotation angle.
void eigen_sym2(const Sym2& v, std::array<double, 2>& eig, std::array<double, 4>& basis) {
  const double theta = 0.5 * std::atan2(2.0 * v.ri, v.rr - v.ii);
  const double c = std::cos(theta), s = std::sin(theta);
  eig[0] = v.rr * c * c + 2.0 * v.ri * s * c + v.ii * s * s;
  eig[1] = v.rr * s * s - 2.0 * v.ri * s * c + v.ii * c * c;
  basis = {c, s, -s, c};  // columns (c, s) and (-s, c)
}

}  // namespace

template <typename T>
ComplexBatchNorm<T>::ComplexBatchNorm(std::size_t channels, double epsilon, double momentum)
    : channels_(channels),
      epsilon_(epsilon),
      momentum_(momentum),
      gamma_r_({channels}),
      gamma_i_({channels}),
      beta_({channels}),
      running_mean_({channels}),
      running_var_({channels}),
      running_cov_({channels}) {
  const T g = static_cast<T>(1.0 / std::numbers::sqrt2);
  gamma_r_.fill({g, T(0)});
  gamma_i_.fill({T(0), g});
  running_var_.fill({T(1), T(1)});
}

template <typename T>
ComplexTensor<T> ComplexBatchNorm<T>::forward(const ComplexTensor<T>& x, Phase phase) {
  if (x.rank() == 0 || x.shape().back() != channels_) {
    throw ArgumentError("ComplexBatchNorm: input " + shape_string(x.shape()) +
                        " does not end in " + std::to_string(channels_) + " channels");
  }
  const std::size_t count = x.size() / channels_;
  context_.assign(channels_, ChannelContext{});

  if (phase == Phase::kTraining) {
    if (count < 2) throw ArgumentError("ComplexBatchNorm: need at least 2 samples per channel");
    std::vector<double> sr(channels_), si(channels_);
    for (std::size_t i = 0; i < x.size(); ++i) {
      sr[i % channels_] += x[i].real();
      si[i % channels_] += x[i].imag();
    }
    std::vector<Sym2> cov(channels_);
    for (std::size_t c = 0; c < channels_; ++c) {
      context_[c].mean = {sr[c] / count, si[c] / count};
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      const std::size_t c = i % channels_;
      const double dr = x[i].real() - context_[c].mean[0];
      const double di = x[i].imag() - context_[c].mean[1];
      cov[c].rr += dr * dr;
      cov[c].ri += dr * di;
      cov[c].ii += di * di;
    }
    for (std::size_t c = 0; c < channels_; ++c) {
      Sym2 v{cov[c].rr / count, cov[c].ri / count, cov[c].ii / count};
      if (!std::isfinite(v.rr) || !std::isfinite(v.ri) || !std::isfinite(v.ii)) {
        throw NumericalError("ComplexBatchNorm: non-finite statistics in channel " + std::to_string(c));
      }
      const double m = momentum_;
      const auto& mu = context_[c].mean;
      running_mean_[c] = {static_cast<T>(m * running_mean_[c].real() + (1 - m) * mu[0]),
                          static_cast<T>(m * running_mean_[c].imag() + (1 - m) * mu[1])};
      running_var_[c] = {static_cast<T>(m * running_var_[c].real() + (1 - m) * v.rr),
                         static_cast<T>(m * running_var_[c].imag() + (1 - m) * v.ii)};
      running_cov_[c] = {static_cast<T>(m * running_cov_[c].real() + (1 - m) * v.ri), T(0)};
      v.rr += epsilon_;
      v.ii += epsilon_;
      context_[c].whiten = inverse_sqrt(v);
      eigen_sym2(v, context_[c].eig, context_[c].basis);
    }
  } else {
    for (std::size_t c = 0; c < channels_; ++c) {
      context_[c].mean = {running_mean_[c].real(), running_mean_[c].imag()};
      const Sym2 v{running_var_[c].real() + epsilon_, running_cov_[c].real(),
                   running_var_[c].imag() + epsilon_};
      context_[c].whiten = inverse_sqrt(v);
    }
  }

  ComplexTensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t c = i % channels_;
    const auto& ctx = context_[c];
    const double dr = x[i].real() - ctx.mean[0];
    const double di = x[i].imag() - ctx.mean[1];
    const double zr = ctx.whiten.rr * dr + ctx.whiten.ri * di;
    const double zi = ctx.whiten.ri * dr + ctx.whiten.ii * di;
    const auto gr = gamma_r_[c], gi = gamma_i_[c], b = beta_[c];
    y[i] = {static_cast<T>(gr.real() * zr + gr.imag() * zi + b.real()),
            static_cast<T>(gi.real() * zr + gi.imag() * zi + b.imag())};
  }
  input_ = x;
  phase_ = phase;
  has_context_ = true;
  return y;
}

template <typename T>
ComplexTensor<T> ComplexBatchNorm<T>::backward(const ComplexTensor<T>& grad_out) {
  if (!has_context_) throw ArgumentError("ComplexBatchNorm::backward: no forward context");
  grad_out.expect_shape(input_.shape(), "ComplexBatchNorm::backward");
  const std::size_t count = input_.size() / channels_;
  auto dgr = gamma_r_.grad();
  auto dgi = gamma_i_.grad();
  auto dbeta = beta_.grad();

  // Pass 1: parameter gradients, g_z and the whitening-matrix gradient.
  std::vector<double> gw(4 * channels_, 0.0);  // dL/dW row-major per channel
  std::vector<double> gz(2 * input_.size());
  std::vector<double> acc(6 * channels_, 0.0);
  for (std::size_t i = 0; i < input_.size(); ++i) {
    const std::size_t c = i % channels_;
    const auto& ctx = context_[c];
    const double dr = input_[i].real() - ctx.mean[0];
    const double di = input_[i].imag() - ctx.mean[1];
    const double zr = ctx.whiten.rr * dr + ctx.whiten.ri * di;
    const double zi = ctx.whiten.ri * dr + ctx.whiten.ii * di;
    const double yr = grad_out[i].real(), yi = grad_out[i].imag();
    double* a = &acc[6 * c];
    a[0] += yr * zr;
    a[1] += yr * zi;
    a[2] += yi * zr;
    a[3] += yi * zi;
    a[4] += yr;
    a[5] += yi;
    const auto g0 = gamma_r_[c], g1 = gamma_i_[c];
    const double gzr = g0.real() * yr + g1.real() * yi;
    const double gzi = g0.imag() * yr + g1.imag() * yi;
    gz[2 * i] = gzr;
    gz[2 * i + 1] = gzi;
    double* w = &gw[4 * c];
    w[0] += gzr * dr;
    w[1] += gzr * di;
    w[2] += gzi * dr;
    w[3] += gzi * di;
  }
  for (std::size_t c = 0; c < channels_; ++c) {
    const double* a = &acc[6 * c];
    dgr[c] += std::complex<T>(static_cast<T>(a[0]), static_cast<T>(a[1]));
    dgi[c] += std::complex<T>(static_cast<T>(a[2]), static_cast<T>(a[3]));
    dbeta[c] += std::complex<T>(static_cast<T>(a[4]), static_cast<T>(a[5]));
  }

  ComplexTensor<T> dx(input_.shape());
  if (phase_ == Phase::kInference) {
    for (std::size_t i = 0; i < input_.size(); ++i) {
      const auto& wh = context_[i % channels_].whiten;
      dx[i] = {static_cast<T>(wh.rr * gz[2 * i] + wh.ri * gz[2 * i + 1]),
               static_cast<T>(wh.ri * gz[2 * i] + wh.ii * gz[2 * i + 1])};
    }
    return dx;
  }

  // dL/dV via the divided-difference (Daleckii-Krein) formula for V^(-1/2),
  // then symmetrized for the dependence of V on the centred samples.
  std::vector<Sym2> gv_sym(channels_);
  for (std::size_t c = 0; c < channels_; ++c) {
    const auto& ctx = context_[c];
    const auto& q = ctx.basis;  // q[0],q[1] first column; q[2],q[3] second
    const double* w = &gw[4 * c];
    // B = Q^T G Q
    double qg[4];
    qg[0] = q[0] * w[0] + q[1] * w[2];
    qg[1] = q[0] * w[1] + q[1] * w[3];
    qg[2] = q[2] * w[0] + q[3] * w[2];
    qg[3] = q[2] * w[1] + q[3] * w[3];
    double b[4];
    b[0] = qg[0] * q[0] + qg[1] * q[1];
    b[1] = qg[0] * q[2] + qg[1] * q[3];
    b[2] = qg[2] * q[0] + qg[3] * q[1];
    b[3] = qg[2] * q[2] + qg[3] * q[3];
    const double l0 = ctx.eig[0], l1 = ctx.eig[1];
    const double s0 = std::sqrt(l0), s1 = std::sqrt(l1);
    const double f00 = -0.5 / (l0 * s0);
    const double f11 = -0.5 / (l1 * s1);
    const double f01 = -1.0 / (s0 * s1 * (s0 + s1));
    b[0] *= f00;
    b[1] *= f01;
    b[2] *= f01;
    b[3] *= f11;
    // G_V = Q B Q^T
    double qb[4];
    qb[0] = q[0] * b[0] + q[2] * b[2];
    qb[1] = q[0] * b[1] + q[2] * b[3];
    qb[2] = q[1] * b[0] + q[3] * b[2];
    qb[3] = q[1] * b[1] + q[3] * b[3];
    const double v00 = qb[0] * q[0] + qb[1] * q[2];
    const double v01 = qb[0] * q[1] + qb[1] * q[3];
    const double v10 = qb[2] * q[0] + qb[3] * q[2];
    const double v11 = qb[2] * q[1] + qb[3] * q[3];
    gv_sym[c] = {2.0 * v00 / count, (v01 + v10) / count, 2.0 * v11 / count};
  }

  std::vector<double> gc(2 * input_.size());
  std::vector<double> gc_mean(2 * channels_, 0.0);
  for (std::size_t i = 0; i < input_.size(); ++i) {
    const std::size_t c = i % channels_;
    const auto& ctx = context_[c];
    const double dr = input_[i].real() - ctx.mean[0];
    const double di = input_[i].imag() - ctx.mean[1];
    const auto& wh = ctx.whiten;
    const auto& sv = gv_sym[c];
    const double r = wh.rr * gz[2 * i] + wh.ri * gz[2 * i + 1] + sv.rr * dr + sv.ri * di;
    const double m = wh.ri * gz[2 * i] + wh.ii * gz[2 * i + 1] + sv.ri * dr + sv.ii * di;
    gc[2 * i] = r;
    gc[2 * i + 1] = m;
    gc_mean[2 * c] += r;
    gc_mean[2 * c + 1] += m;
  }
  for (std::size_t i = 0; i < input_.size(); ++i) {
    const std::size_t c = i % channels_;
    dx[i] = {static_cast<T>(gc[2 * i] - gc_mean[2 * c] / count),
             static_cast<T>(gc[2 * i + 1] - gc_mean[2 * c + 1] / count)};
  }
  return dx;
}

template <typename T>
void ComplexBatchNorm<T>::collect_parameters(const std::string& prefix,
                                             std::vector<NamedTensor<T>>& out) {
  out.push_back({prefix + "gamma_r", &gamma_r_});
  out.push_back({prefix + "gamma_i", &gamma_i_});
  out.push_back({prefix + "beta", &beta_});
}

template <typename T>
void ComplexBatchNorm<T>::collect_buffers(const std::string& prefix,
                                          std::vector<NamedTensor<T>>& out) {
  out.push_back({prefix + "running_mean", &running_mean_});
  out.push_back({prefix + "running_var", &running_var_});
  out.push_back({prefix + "running_cov", &running_cov_});
}

template class ComplexBatchNorm<float>;
template class ComplexBatchNorm<double>;

}  // namespace rtfnet::cvnn
