#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "rtfnet/dataset.hpp"
#include "rtfnet/field_grid.hpp"
#include "rtfnet/modal_sim.hpp"

namespace rtfnet {

inline constexpr double kDefaultKernelLambda = 0.01;

/// Single-frequency kernel ridge regression problem.
struct KernelProblem {
  std::vector<Vec3> positions;
  std::vector<std::complex<double>> observations;
  double wavenumber = 0.0;
  double lambda = kDefaultKernelLambda;

  void validate() const;
};

struct KernelFit {
  std::vector<std::complex<double>> alpha;
  // Diagonal loading actually used; differs from lambda after jitter escalation.
  double lambda_used = 0.0;
};

// sin(k d) / (k d), with value 1 at k d = 0.
double helmholtz_kernel(const Vec3& r1, const Vec3& r2, double k);

std::vector<double> gram_matrix(std::span<const Vec3> positions, double k);

// alpha = (K + lambda I)^-1 y by Cholesky. On failure retries with 10x and
// 100x lambda, then throws NumericalError with a reciprocal condition
// estimate.
KernelFit fit(const KernelProblem& problem);

std::vector<std::complex<double>> interpolate(const KernelProblem& problem,
                                              std::span<const std::complex<double>> alpha,
                                              std::span<const Vec3> queries);

// Per-frequency fit over the observed grid points, evaluated on the full grid.
FieldGrid reconstruct_field(const SampleRecord& record, double lambda = kDefaultKernelLambda,
                            std::size_t threads = 1);

}  // namespace rtfnet
