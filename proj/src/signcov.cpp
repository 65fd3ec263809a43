#include "fsign/signcov.hpp"

#include <algorithm>

#include "fsign/errors.hpp"
#include "fsign/kernels.hpp"

namespace fsign {

namespace {

void check_inputs(const std::vector<Curve>& sample, const Curve& center) {
  if (sample.empty()) throw InvalidArgument("signcov: empty sample");
  for (const auto& c : sample) require_same_grid(sample.front().grid, c.grid);
  require_same_grid(sample.front().grid, center.grid);
}

double median_of(std::vector<double> v) {
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  return 0.5 * (*std::max_element(v.begin(), mid) + *mid);
}

std::vector<Curve> residuals_checked(const std::vector<Curve>& sample,
                                     const Curve& center) {
  std::vector<Curve> out;
  std::vector<double> norms;
  out.reserve(sample.size());
  norms.reserve(sample.size());
  for (const auto& x : sample) {
    out.push_back(sub(x, center));
    norms.push_back(norm(out.back()));
  }
  const double eps0 = residual_eps0(norms);
  for (double nr : norms) {
    if (nr <= eps0) {
      throw DegenerateObservation(
          "signcov: observation coincides with the center");
    }
  }
  return out;
}

}  // namespace

double residual_eps0(const std::vector<double>& residual_norms) {
  if (residual_norms.empty()) throw InvalidArgument("signcov: empty sample");
  return 1e-12 * median_of(residual_norms);
}

SignCovResult sign_cov(const std::vector<Curve>& sample, const Curve& center) {
  check_inputs(sample, center);
  const std::size_t n = sample.size();
  const std::size_t m = center.grid->size();

  std::vector<Curve> resid;
  std::vector<double> norms;
  resid.reserve(n);
  norms.reserve(n);
  for (const auto& x : sample) {
    resid.push_back(sub(x, center));
    norms.push_back(norm(resid.back()));
  }
  const double eps0 = residual_eps0(norms);

  SignCovResult res{HSOperator(center.grid), center, 0};
  for (std::size_t i = 0; i < n; ++i) {
    if (norms[i] <= eps0) {
      ++res.n_zero_residuals;
      continue;
    }
    Curve s = sign(resid[i], eps0);
    kern::active().rank1_accum(res.op.kernel.data(), s.values.data(),
                               s.values.data(), m);
  }
  scale_inplace(1.0 / static_cast<double>(n), res.op);
  return res;
}

HSOperator empirical_F(const std::vector<Curve>& sample, const Curve& center,
                       const Curve& u) {
  check_inputs(sample, center);
  require_same_grid(center.grid, u.grid);
  auto resid = residuals_checked(sample, center);
  const std::size_t n = sample.size();
  const std::size_t m = center.grid->size();

  HSOperator out(center.grid);
  for (const auto& r : resid) {
    double nr = norm(r);
    double w = inner(r, u) / (nr * nr * nr * nr);
    Curve wr = scale(r, w);
    kern::active().rank1_accum(out.kernel.data(), wr.values.data(),
                               r.values.data(), m);
  }
  scale_inplace(1.0 / static_cast<double>(n), out);
  return out;
}

HSOperator empirical_S(const std::vector<Curve>& sample, const Curve& center,
                       const Curve& u) {
  check_inputs(sample, center);
  require_same_grid(center.grid, u.grid);
  auto resid = residuals_checked(sample, center);
  const std::size_t n = sample.size();

  Curve ebar(center.grid);
  for (const auto& r : resid) {
    double nr = norm(r);
    axpy_inplace(1.0 / (nr * nr), r, ebar);
  }
  scale_inplace(1.0 / static_cast<double>(n), ebar);

  HSOperator out = tensor(u, ebar);
  axpy_inplace(1.0, tensor(ebar, u), out);
  scale_inplace(0.5, out);
  return out;
}

HSOperator empirical_G(const std::vector<Curve>& sample, const Curve& center,
                       const Curve& u) {
  HSOperator out = empirical_F(sample, center, u);
  scale_inplace(2.0, out);
  axpy_inplace(-2.0, empirical_S(sample, center, u), out);
  return out;
}

HSOperator shift_correction(const std::vector<Curve>& sample,
                            const MedianResult& median_result,
                            const Curve& displacement) {
  return empirical_G(sample, median_result.estimate, displacement);
}

HSOperator classical_cov(const std::vector<Curve>& sample, const Curve& center) {
  check_inputs(sample, center);
  const std::size_t n = sample.size();
  const std::size_t m = center.grid->size();
  HSOperator out(center.grid);
  for (const auto& x : sample) {
    Curve r = sub(x, center);
    kern::active().rank1_accum(out.kernel.data(), r.values.data(),
                               r.values.data(), m);
  }
  scale_inplace(1.0 / static_cast<double>(n), out);
  return out;
}

Curve sample_mean(const std::vector<Curve>& sample) {
  if (sample.empty()) throw InvalidArgument("signcov: empty sample");
  for (const auto& c : sample) require_same_grid(sample.front().grid, c.grid);
  Curve out(sample.front().grid);
  for (const auto& x : sample) axpy_inplace(1.0, x, out);
  scale_inplace(1.0 / static_cast<double>(sample.size()), out);
  return out;
}

}  // namespace fsign
