#include "rtfnet/kernel_baseline.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "rtfnet/errors.hpp"

namespace rtfnet {

void KernelProblem::validate() const {
  if (positions.empty()) throw ArgumentError("kernel problem needs at least one position");
  if (observations.size() != positions.size()) {
    throw ArgumentError("kernel problem: " + std::to_string(observations.size()) +
                        " observations for " + std::to_string(positions.size()) + " positions");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ArgumentError("kernel lambda must be positive, got " + std::to_string(lambda));
  }
  if (!(wavenumber >= 0.0) || !std::isfinite(wavenumber)) {
    throw ArgumentError("wavenumber must be non-negative");
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (positions[i] == positions[j]) {
        throw ArgumentError("kernel positions " + std::to_string(j) + " and " +
                            std::to_string(i) + " coincide");
      }
    }
  }
}

double helmholtz_kernel(const Vec3& r1, const Vec3& r2, double k) {
  const double dx = r1[0] - r2[0];
  const double dy = r1[1] - r2[1];
  const double dz = r1[2] - r2[2];
  const double x = k * std::sqrt(dx * dx + dy * dy + dz * dz);
  if (x == 0.0) return 1.0;
  // Taylor branch avoids 0/0 rounding for tiny arguments.
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

std::vector<double> gram_matrix(std::span<const Vec3> positions, double k) {
  const std::size_t m = positions.size();
  std::vector<double> g(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    g[i * m + i] = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      const double v = helmholtz_kernel(positions[i], positions[j], k);
      g[i * m + j] = v;
      g[j * m + i] = v;
    }
  }
  return g;
}

KernelFit fit(const KernelProblem& problem) {
  problem.validate();
  const std::size_t m = problem.positions.size();
  const auto g = gram_matrix(problem.positions, problem.wavenumber);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      gram(g.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  if (!gram.allFinite()) throw NumericalError("kernel Gram matrix has non-finite entries");

  Eigen::MatrixXd rhs(m, 2);
  for (std::size_t i = 0; i < m; ++i) {
    rhs(static_cast<Eigen::Index>(i), 0) = problem.observations[i].real();
    rhs(static_cast<Eigen::Index>(i), 1) = problem.observations[i].imag();
  }
  const double y_norm = rhs.norm();

  double last_rcond = 0.0;
  for (double scale : {1.0, 10.0, 100.0}) {
    const double lambda = problem.lambda * scale;
    Eigen::MatrixXd a = gram;
    a.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) continue;
    last_rcond = llt.rcond();
    Eigen::MatrixXd sol = llt.solve(rhs);
    if (!sol.allFinite()) continue;
    const double residual = (a * sol - rhs).norm();
    if (residual > 1e-8 * y_norm) continue;
    KernelFit out;
    out.lambda_used = lambda;
    out.alpha.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      out.alpha[i] = {sol(static_cast<Eigen::Index>(i), 0), sol(static_cast<Eigen::Index>(i), 1)};
    }
    return out;
  }
  Eigen::MatrixXd a = gram;
  a.diagonal().array() += 100.0 * problem.lambda;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const double rcond = ev.size() ? std::abs(ev.minCoeff()) / std::abs(ev.maxCoeff()) : last_rcond;
  std::ostringstream msg;
  msg << "kernel system factorization failed for m=" << m << " at lambda up to "
      << 100.0 * problem.lambda << " (reciprocal condition ~" << rcond << ")";
  throw NumericalError(msg.str());
}

std::vector<std::complex<double>> interpolate(const KernelProblem& problem,
                                              std::span<const std::complex<double>> alpha,
                                              std::span<const Vec3> queries) {
  if (alpha.size() != problem.positions.size()) {
    throw ArgumentError("interpolate: alpha has " + std::to_string(alpha.size()) +
                        " entries for " + std::to_string(problem.positions.size()) + " positions");
  }
  std::vector<std::complex<double>> out(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      acc += alpha[i] * helmholtz_kernel(queries[q], problem.positions[i], problem.wavenumber);
    }
    out[q] = acc;
  }
  return out;
}

FieldGrid reconstruct_field(const SampleRecord& record, double lambda, std::size_t threads) {
  const FieldGrid& field = record.field;
  const MicMask& mask = record.mask;
  if (mask.count() == 0) throw ArgumentError("reconstruct_field: mask has no observed points");
  if (mask.width != field.width || mask.height != field.height) {
    throw ArgumentError("reconstruct_field: mask and field grids differ");
  }
  const RoomSpec& room = record.room;

  std::vector<Vec3> queries;
  queries.reserve(field.width * field.height);
  for (std::size_t w = 0; w < field.width; ++w) {
    for (std::size_t h = 0; h < field.height; ++h) queries.push_back(grid_point(room, w, h));
  }
  std::vector<Vec3> positions;
  positions.reserve(mask.count());
  for (const auto& [w, h] : mask.observed) positions.push_back(grid_point(room, w, h));

  FieldGrid out(field.width, field.height, field.freqs);
  out.room_id = field.room_id;
  parallel_for(field.num_freqs(), threads, [&](std::size_t k) {
    KernelProblem problem;
    problem.positions = positions;
    problem.lambda = lambda;
    problem.wavenumber = 2.0 * M_PI * field.freqs[k] / room.speed_of_sound;
    problem.observations.reserve(positions.size());
    for (const auto& [w, h] : mask.observed) problem.observations.push_back(field.at(w, h, k));
    const KernelFit f = fit(problem);
    const auto values = interpolate(problem, f.alpha, queries);
    for (std::size_t q = 0; q < queries.size(); ++q) out.data[q * field.num_freqs() + k] = values[q];
  });
  return out;
}

}  // namespace rtfnet
