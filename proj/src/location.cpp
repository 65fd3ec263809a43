#include "fsign/location.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fsign/errors.hpp"
#include "fsign/rng.hpp"

namespace fsign {

namespace {

constexpr double kAnchorEps = 1e-12;

void check_sample(const std::vector<Curve>& sample) {
  if (sample.empty()) throw InvalidArgument("location: empty sample");
  for (const auto& c : sample) require_same_grid(sample.front().grid, c.grid);
}

}  // namespace

double l1_objective(const std::vector<Curve>& sample, const Curve& center) {
  check_sample(sample);
  require_same_grid(sample.front().grid, center.grid);
  double acc = 0.0;
  for (const auto& x : sample) acc += norm(sub(x, center));
  return acc / static_cast<double>(sample.size());
}

Curve coordinatewise_median(const std::vector<Curve>& sample) {
  check_sample(sample);
  const std::size_t n = sample.size();
  const std::size_t m = sample.front().grid->size();
  Curve out(sample.front().grid);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = sample[i].values[j];
    auto mid = col.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(col.begin(), mid, col.end());
    if (n % 2 == 1) {
      out.values[j] = *mid;
    } else {
      double hi = *mid;
      double lo = *std::max_element(col.begin(), mid);
      out.values[j] = 0.5 * (lo + hi);
    }
  }
  return out;
}

MedianResult spatial_median_weiszfeld(const std::vector<Curve>& sample,
                                      double tol, std::size_t max_iter) {
  check_sample(sample);
  if (!(tol > 0.0)) throw InvalidArgument("weiszfeld: tol must be positive");
  const auto& grid = sample.front().grid;

  MedianResult res{coordinatewise_median(sample)};
  double obj = l1_objective(sample, res.estimate);

  Curve cand(grid);
  for (std::size_t it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;

    std::fill(cand.values.begin(), cand.values.end(), 0.0);
    double wsum = 0.0;
    std::size_t active = 0;
    for (const auto& x : sample) {
      double r = norm(sub(x, res.estimate));
      if (r <= kAnchorEps) continue;  // anchor exclusion
      double w = 1.0 / r;
      axpy_inplace(w, x, cand);
      wsum += w;
      ++active;
    }
    if (active == 0) {
      // Every observation coincides with the iterate; it is the minimizer.
      res.converged = true;
      res.final_step = 0.0;
      return res;
    }
    scale_inplace(1.0 / wsum, cand);

    double step = norm(sub(cand, res.estimate));
    double rel = step / std::max(1.0, norm(res.estimate));
    double cand_obj = l1_objective(sample, cand);
    if (cand_obj > obj + 1e-10) {
      // Anchor exclusion can propose an uphill move; keep the current
      // iterate instead.
      res.final_step = rel;
      res.converged = rel <= tol;
      return res;
    }
    res.estimate.values = cand.values;
    obj = cand_obj;
    res.final_step = rel;
    if (rel <= tol) {
      res.converged = true;
      return res;
    }
  }
  res.converged = false;
  return res;
}

MedianResult spatial_median_asgd(const std::vector<Curve>& sample, double step_c,
                                 double step_gamma, std::uint64_t seed) {
  check_sample(sample);
  if (sample.size() < 2) throw InvalidArgument("asgd: need at least 2 curves");
  if (!(step_c > 0.0)) throw InvalidArgument("asgd: step_c must be positive");
  if (!(step_gamma > 0.5 && step_gamma < 1.0)) {
    throw InvalidArgument("asgd: step_gamma must lie in (1/2, 1)");
  }
  const std::size_t n = sample.size();
  const auto& grid = sample.front().grid;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng::Stream rs(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(rs.uniform() * static_cast<double>(i + 1));
    if (j > i) j = i;
    std::swap(order[i], order[j]);
  }

  Curve mu = coordinatewise_median(sample);
  Curve avg(grid);
  double last_rel = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const Curve& x = sample[order[k - 1]];
    Curve resid = sub(x, mu);
    double r = norm(resid);
    if (r > kAnchorEps) {
      double step = step_c * std::pow(static_cast<double>(k), -step_gamma);
      axpy_inplace(step / r, resid, mu);
      last_rel = step / std::max(1.0, norm(mu));
    }
    axpy_inplace(1.0, mu, avg);
  }
  scale_inplace(1.0 / static_cast<double>(n), avg);

  MedianResult res{std::move(avg)};
  res.iterations = n;
  res.converged = true;
  res.final_step = last_rel;
  return res;
}

}  // namespace fsign
