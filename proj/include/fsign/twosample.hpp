#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fsign/hilbert.hpp"
#include "fsign/spca.hpp"

namespace fsign {

enum class TestMode { sign, classical, classical_gauss };

TestMode parse_test_mode(const std::string& name);
std::string to_string(TestMode mode);

struct ThetaSpectrum {
  std::vector<double> thetas;  // non-increasing, >= 0, length q_n
  std::size_t M = 0;
  std::size_t q_n = 0;         // M(M+1)/2
  std::size_t n_clipped = 0;   // negative eigenvalue estimates clipped to 0
};

struct TestResult {
  double statistic = 0.0;
  ThetaSpectrum spectrum;
  std::vector<double> null_draws;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::pair<Curve, Curve> centers;
};

/// n * ||sign_cov(sample2, center2) - sign_cov(sample1, center1)||_HS^2
/// with n = n1 + n2.
double statistic_sign(const std::vector<Curve>& sample1,
                      const std::vector<Curve>& sample2, const Curve& center1,
                      const Curve& center2);

/// Same distance for the ordinary covariance operators about the sample
/// means (1/n_i normalization).
double statistic_classical(const std::vector<Curve>& sample1,
                           const std::vector<Curve>& sample2);

/// Shared preparation for the theta-spectrum pipeline: pooled operator in
/// the requested mode, its top-M eigenbasis, and per-observation score
/// coordinates. Scores at any M' <= M are prefixes of these.
struct PooledBasis {
  EigenSystem system;
  double pooled_trace = 0.0;
  std::vector<std::vector<double>> scores1;
  std::vector<std::vector<double>> scores2;
};

PooledBasis pooled_scores(const std::vector<Curve>& sample1,
                          const std::vector<Curve>& sample2,
                          const Curve& center1, const Curve& center2,
                          std::size_t M, TestMode mode);

/// Theta spectrum from prepared scores, truncated to the leading M
/// coordinates. Throws InsufficientRank when the pooled operator has
/// fewer than M eigenvalues above roundoff.
ThetaSpectrum theta_from_scores(const PooledBasis& basis, std::size_t M);

/// Estimated limit spectrum of the two-sample statistic: projects the
/// per-observation rank-1 score matrices onto the pooled top-M basis,
/// half-vectorizes their deviations (off-diagonals scaled by sqrt(2), so
/// Euclidean geometry matches the HS norm), forms per-sample covariances,
/// combines them as (n/n1) Y1 + (n/n2) Y2 and returns the clipped, sorted
/// eigenvalues.
ThetaSpectrum estimate_theta_spectrum(const std::vector<Curve>& sample1,
                                      const std::vector<Curve>& sample2,
                                      const Curve& center1, const Curve& center2,
                                      std::size_t M, TestMode mode);

/// Gaussian-theory spectrum for the classical statistic (experimental):
/// thetas are 2 (lambda_{1,a} lambda_{1,b} n/n1 + lambda_{2,a} lambda_{2,b}
/// n/n2) over a <= b, from per-sample covariance eigenvalues.
ThetaSpectrum gaussian_theta_spectrum(const std::vector<Curve>& sample1,
                                      const std::vector<Curve>& sample2,
                                      std::size_t M);

/// Same spectrum from precomputed per-sample covariance eigenvalues
/// (prefixes of length >= M; negatives treated as 0).
ThetaSpectrum gaussian_theta_from_eigs(const std::vector<double>& lambda1,
                                       const std::vector<double>& lambda2,
                                       std::size_t M, std::size_t n1,
                                       std::size_t n2);

/// N_b draws of sum_j theta_j Z_j^2 with Z i.i.d. standard Gaussian,
/// deterministic in (seed, stream_id).
std::vector<double> bootstrap_null(const ThetaSpectrum& spectrum,
                                   std::size_t n_b, std::uint64_t seed,
                                   std::uint64_t stream_id = 0);

/// Full test: centers are per-sample Weiszfeld medians (sign mode) or
/// sample means (classical modes); p = #{draws >= statistic} / N_b.
TestResult run_test(const std::vector<Curve>& sample1,
                    const std::vector<Curve>& sample2, std::size_t M,
                    std::size_t n_b, TestMode mode, std::uint64_t seed);

/// sqrt(2)-scaled upper-triangle half-vectorization of a symmetric M x M
/// matrix (row-major), the isometry used by the spectrum pipeline.
std::vector<double> half_vectorize(const std::vector<double>& sym, std::size_t M);

}  // namespace fsign
