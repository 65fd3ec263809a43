#pragma once

#include <vector>

#include "fsign/hilbert.hpp"
#include "fsign/location.hpp"

namespace fsign {

struct SignCovResult {
  HSOperator op;
  Curve center;
  std::size_t n_zero_residuals = 0;
};

/// Numerical-zero threshold for residuals: 1e-12 times the median residual
/// norm, so the cutoff follows the data scale.
double residual_eps0(const std::vector<double>& residual_norms);

/// (1/n) sum_i s_i (x) s_i with s_i = sign(X_i - center). Zero residuals
/// (norm <= residual_eps0) contribute nothing but stay in the 1/n
/// normalization, so trace = (n - n_zero_residuals)/n.
SignCovResult sign_cov(const std::vector<Curve>& sample, const Curve& center);

/// (1/n) sum_i <X_i-c, u>/||X_i-c||^4 (X_i-c)(x)(X_i-c).
/// Throws DegenerateObservation when any residual vanishes.
HSOperator empirical_F(const std::vector<Curve>& sample, const Curve& center,
                       const Curve& u);

/// With e = (1/n) sum_i (X_i-c)/||X_i-c||^2: (1/2)(u(x)e + e(x)u).
HSOperator empirical_S(const std::vector<Curve>& sample, const Curve& center,
                       const Curve& u);

/// 2 empirical_F - 2 empirical_S.
HSOperator empirical_G(const std::vector<Curve>& sample, const Curve& center,
                       const Curve& u);

/// Location plug-in effect: empirical_G evaluated at the median with a
/// caller-supplied displacement.
HSOperator shift_correction(const std::vector<Curve>& sample,
                            const MedianResult& median_result,
                            const Curve& displacement);

/// Ordinary covariance operator (1/n) sum_i (X_i-c)(x)(X_i-c).
HSOperator classical_cov(const std::vector<Curve>& sample, const Curve& center);

Curve sample_mean(const std::vector<Curve>& sample);

}  // namespace fsign
