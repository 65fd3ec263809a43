#pragma once

#include <cstdint>
#include <vector>

#include "fsign/hilbert.hpp"

namespace fsign {

struct EigenSystem {
  std::vector<double> values;   // non-increasing
  std::vector<Curve> functions; // L2-orthonormal under the grid weights
  double op_trace = 0.0;
};

/// Top-k eigenpairs of a self-adjoint kernel operator. Solves the weighted
/// problem B = W^{1/2} K W^{1/2}, back-transforms by W^{-1/2}, so the
/// functions are orthonormal in the grid inner product. Each function is
/// normalized so its first coordinate of nontrivial magnitude is positive.
/// Throws NotSelfAdjoint when symmetry_defect(A) > 1e-8.
EigenSystem eigendecompose(const HSOperator& A, std::size_t k);

/// est when inner(est, reference) > 0, -est when negative. Throws
/// AmbiguousAlignment when |inner| <= 1e-12.
Curve align_sign(const Curve& est, const Curve& reference);

/// sum_{j in indices} phi_j (x) phi_j. Indices are 1-based.
HSOperator eigenprojection(const EigenSystem& system,
                           const std::vector<std::size_t>& indices);

/// Resolvent-style operator sum_{l<=k, l!=i} (lambda_i-lambda_l)^{-1}
/// phi_l (x) phi_l. Indices 1-based. Throws DegenerateEigenvalue when any
/// gap |lambda_i - lambda_l| is below 1e-10 * max(1, |lambda_i|).
HSOperator resolvent_delta(const EigenSystem& system, std::size_t i,
                           std::size_t k);

/// Monte Carlo estimate of lambda_l E[xi_l^2 / sum_j lambda_j xi_j^2] for
/// standard Gaussian xi. All components share each draw, so the estimates
/// sum to 1 up to rounding.
std::vector<double> shrinkage_factor_mc(const std::vector<double>& eigenvalues,
                                        std::size_t reps, std::uint64_t seed);

}  // namespace fsign
