#include "fsign/twosample.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "fsign/errors.hpp"
#include "fsign/location.hpp"
#include "fsign/rng.hpp"
#include "fsign/signcov.hpp"

namespace fsign {

TestMode parse_test_mode(const std::string& name) {
  if (name == "sign") return TestMode::sign;
  if (name == "classical") return TestMode::classical;
  if (name == "classical-gauss" || name == "classical_gauss") {
    return TestMode::classical_gauss;
  }
  throw InvalidArgument("unknown test mode '" + name + "'");
}

std::string to_string(TestMode mode) {
  switch (mode) {
    case TestMode::sign: return "sign";
    case TestMode::classical: return "classical";
    case TestMode::classical_gauss: return "classical-gauss";
  }
  return "?";
}

double statistic_sign(const std::vector<Curve>& sample1,
                      const std::vector<Curve>& sample2, const Curve& center1,
                      const Curve& center2) {
  const double n = static_cast<double>(sample1.size() + sample2.size());
  HSOperator diff = sign_cov(sample2, center2).op;
  axpy_inplace(-1.0, sign_cov(sample1, center1).op, diff);
  return n * hs_inner(diff, diff);
}

double statistic_classical(const std::vector<Curve>& sample1,
                           const std::vector<Curve>& sample2) {
  const double n = static_cast<double>(sample1.size() + sample2.size());
  HSOperator diff = classical_cov(sample2, sample_mean(sample2));
  axpy_inplace(-1.0, classical_cov(sample1, sample_mean(sample1)), diff);
  return n * hs_inner(diff, diff);
}

std::vector<double> half_vectorize(const std::vector<double>& sym, std::size_t M) {
  if (sym.size() != M * M) throw InvalidArgument("half_vectorize: size mismatch");
  static const double kSqrt2 = std::sqrt(2.0);
  std::vector<double> out;
  out.reserve(M * (M + 1) / 2);
  for (std::size_t a = 0; a < M; ++a) {
    out.push_back(sym[a * M + a]);
    for (std::size_t b = a + 1; b < M; ++b) {
      out.push_back(kSqrt2 * sym[a * M + b]);
    }
  }
  return out;
}

namespace {

void check_two_samples(const std::vector<Curve>& sample1,
                       const std::vector<Curve>& sample2) {
  if (sample1.empty() || sample2.empty()) {
    throw InvalidArgument("twosample: empty sample");
  }
  for (const auto& c : sample1) require_same_grid(sample1.front().grid, c.grid);
  for (const auto& c : sample2) require_same_grid(sample1.front().grid, c.grid);
}

// Score coordinates <psi_a, y_ij> for every observation; y is the sign
// curve (sign mode) or the centered raw curve (classical modes).
std::vector<std::vector<double>> score_block(const std::vector<Curve>& sample,
                                             const Curve& center,
                                             const std::vector<Curve>& basis,
                                             TestMode mode) {
  std::vector<std::vector<double>> out;
  out.reserve(sample.size());
  for (const auto& x : sample) {
    Curve y = sub(x, center);
    if (mode == TestMode::sign) y = sign(y);
    std::vector<double> c(basis.size());
    for (std::size_t a = 0; a < basis.size(); ++a) c[a] = inner(basis[a], y);
    out.push_back(std::move(c));
  }
  return out;
}

// Covariance of the half-vectorized score deviations, accumulated into ups
// (q x q row-major) with weight (extra / n_obs).
void accumulate_upsilon(const std::vector<std::vector<double>>& scores,
                        std::size_t M, double extra, std::vector<double>& ups) {
  const std::size_t q = M * (M + 1) / 2;
  const std::size_t n = scores.size();
  std::vector<std::vector<double>> hv;
  hv.reserve(n);
  std::vector<double> mean(q, 0.0);
  std::vector<double> r(M * M);
  for (const auto& c : scores) {
    for (std::size_t a = 0; a < M; ++a) {
      for (std::size_t b = 0; b < M; ++b) r[a * M + b] = c[a] * c[b];
    }
    hv.push_back(half_vectorize(r, M));
    for (std::size_t l = 0; l < q; ++l) mean[l] += hv.back()[l];
  }
  for (std::size_t l = 0; l < q; ++l) mean[l] /= static_cast<double>(n);

  const double w = extra / static_cast<double>(n);
  std::vector<double> d(q);
  for (const auto& v : hv) {
    for (std::size_t l = 0; l < q; ++l) d[l] = v[l] - mean[l];
    for (std::size_t a = 0; a < q; ++a) {
      const double da = d[a];
      for (std::size_t b = 0; b < q; ++b) ups[a * q + b] += w * da * d[b];
    }
  }
}

ThetaSpectrum clipped_sorted_eigs(std::vector<double> ups, std::size_t M) {
  const std::size_t q = M * (M + 1) / 2;
  Eigen::MatrixXd U(q, q);
  for (std::size_t a = 0; a < q; ++a) {
    for (std::size_t b = 0; b < q; ++b) {
      U(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          0.5 * (ups[a * q + b] + ups[b * q + a]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(U, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("theta spectrum: eigensolver did not converge");
  }
  ThetaSpectrum spec;
  spec.M = M;
  spec.q_n = q;
  spec.thetas.resize(q);
  for (std::size_t l = 0; l < q; ++l) {
    double v = solver.eigenvalues()(static_cast<Eigen::Index>(q - 1 - l));
    if (v < 0.0) {
      v = 0.0;
      ++spec.n_clipped;
    }
    spec.thetas[l] = v;
  }
  return spec;
}

}  // namespace

PooledBasis pooled_scores(const std::vector<Curve>& sample1,
                          const std::vector<Curve>& sample2,
                          const Curve& center1, const Curve& center2,
                          std::size_t M, TestMode mode) {
  check_two_samples(sample1, sample2);
  const std::size_t m = sample1.front().grid->size();
  if (M < 1 || M > m) throw InvalidArgument("theta spectrum: M must lie in [1, m]");
  const double n1 = static_cast<double>(sample1.size());
  const double n2 = static_cast<double>(sample2.size());
  const double n = n1 + n2;

  HSOperator pooled = (mode == TestMode::sign)
                          ? sign_cov(sample1, center1).op
                          : classical_cov(sample1, center1);
  scale_inplace(n1 / n, pooled);
  HSOperator second = (mode == TestMode::sign)
                          ? sign_cov(sample2, center2).op
                          : classical_cov(sample2, center2);
  axpy_inplace(n2 / n, second, pooled);

  PooledBasis basis;
  basis.system = eigendecompose(pooled, M);
  basis.pooled_trace = basis.system.op_trace;
  basis.scores1 = score_block(sample1, center1, basis.system.functions, mode);
  basis.scores2 = score_block(sample2, center2, basis.system.functions, mode);
  return basis;
}

ThetaSpectrum theta_from_scores(const PooledBasis& basis, std::size_t M) {
  if (M < 1 || M > basis.system.values.size()) {
    throw InvalidArgument("theta spectrum: M exceeds prepared basis");
  }
  const double lead = std::max(1.0, basis.system.values.front());
  if (basis.system.values[M - 1] <= 1e-12 * lead) {
    throw InsufficientRank(
        "theta spectrum: pooled operator has fewer than M positive eigenvalues");
  }
  const double n1 = static_cast<double>(basis.scores1.size());
  const double n2 = static_cast<double>(basis.scores2.size());
  const double n = n1 + n2;

  const std::size_t q = M * (M + 1) / 2;
  std::vector<double> ups(q * q, 0.0);
  accumulate_upsilon(basis.scores1, M, n / n1, ups);
  accumulate_upsilon(basis.scores2, M, n / n2, ups);
  return clipped_sorted_eigs(std::move(ups), M);
}

ThetaSpectrum estimate_theta_spectrum(const std::vector<Curve>& sample1,
                                      const std::vector<Curve>& sample2,
                                      const Curve& center1, const Curve& center2,
                                      std::size_t M, TestMode mode) {
  if (mode == TestMode::classical_gauss) {
    return gaussian_theta_spectrum(sample1, sample2, M);
  }
  return theta_from_scores(pooled_scores(sample1, sample2, center1, center2, M, mode),
                           M);
}

ThetaSpectrum gaussian_theta_from_eigs(const std::vector<double>& lambda1,
                                       const std::vector<double>& lambda2,
                                       std::size_t M, std::size_t n1,
                                       std::size_t n2) {
  if (M < 1 || lambda1.size() < M || lambda2.size() < M) {
    throw InvalidArgument("theta spectrum: need at least M eigenvalues");
  }
  const double n = static_cast<double>(n1 + n2);
  const double w1 = n / static_cast<double>(n1);
  const double w2 = n / static_cast<double>(n2);
  auto lam = [](const std::vector<double>& l, std::size_t a) {
    return std::max(0.0, l[a]);
  };

  ThetaSpectrum spec;
  spec.M = M;
  spec.q_n = M * (M + 1) / 2;
  spec.thetas.reserve(spec.q_n);
  for (std::size_t a = 0; a < M; ++a) {
    for (std::size_t b = a; b < M; ++b) {
      spec.thetas.push_back(2.0 * (lam(lambda1, a) * lam(lambda1, b) * w1 +
                                   lam(lambda2, a) * lam(lambda2, b) * w2));
    }
  }
  std::sort(spec.thetas.begin(), spec.thetas.end(), std::greater<double>());
  return spec;
}

ThetaSpectrum gaussian_theta_spectrum(const std::vector<Curve>& sample1,
                                      const std::vector<Curve>& sample2,
                                      std::size_t M) {
  check_two_samples(sample1, sample2);
  const std::size_t m = sample1.front().grid->size();
  if (M < 1 || M > m) throw InvalidArgument("theta spectrum: M must lie in [1, m]");
  EigenSystem e1 = eigendecompose(classical_cov(sample1, sample_mean(sample1)), M);
  EigenSystem e2 = eigendecompose(classical_cov(sample2, sample_mean(sample2)), M);
  return gaussian_theta_from_eigs(e1.values, e2.values, M, sample1.size(),
                                  sample2.size());
}

std::vector<double> bootstrap_null(const ThetaSpectrum& spectrum, std::size_t n_b,
                                   std::uint64_t seed, std::uint64_t stream_id) {
  if (n_b < 1) throw InvalidArgument("bootstrap: N_b must be >= 1");
  rng::Stream rs(seed, stream_id);
  std::vector<double> draws(n_b);
  for (std::size_t d = 0; d < n_b; ++d) {
    double acc = 0.0;
    for (double th : spectrum.thetas) {
      double z = rs.normal();
      acc += th * z * z;
    }
    draws[d] = acc;
  }
  return draws;
}

TestResult run_test(const std::vector<Curve>& sample1,
                    const std::vector<Curve>& sample2, std::size_t M,
                    std::size_t n_b, TestMode mode, std::uint64_t seed) {
  check_two_samples(sample1, sample2);

  TestResult res;
  res.n1 = sample1.size();
  res.n2 = sample2.size();
  if (mode == TestMode::sign) {
    res.centers.first = spatial_median_weiszfeld(sample1).estimate;
    res.centers.second = spatial_median_weiszfeld(sample2).estimate;
    res.statistic =
        statistic_sign(sample1, sample2, res.centers.first, res.centers.second);
    res.spectrum = estimate_theta_spectrum(sample1, sample2, res.centers.first,
                                           res.centers.second, M, mode);
  } else {
    res.centers.first = sample_mean(sample1);
    res.centers.second = sample_mean(sample2);
    res.statistic = statistic_classical(sample1, sample2);
    res.spectrum = (mode == TestMode::classical)
                       ? estimate_theta_spectrum(sample1, sample2,
                                                 res.centers.first,
                                                 res.centers.second, M, mode)
                       : gaussian_theta_spectrum(sample1, sample2, M);
  }
  res.null_draws = bootstrap_null(res.spectrum, n_b, seed);
  std::size_t count = 0;
  for (double d : res.null_draws) {
    if (d >= res.statistic) ++count;
  }
  res.p_value = static_cast<double>(count) / static_cast<double>(n_b);
  return res;
}

}  // namespace fsign
