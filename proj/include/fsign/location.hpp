#pragma once

#include <cstdint>
#include <vector>

#include "fsign/hilbert.hpp"

namespace fsign {

struct MedianResult {
  Curve estimate;
  std::size_t iterations = 0;
  bool converged = false;
  // Relative L2 size of the last step, norm(step)/max(1, norm(iterate)).
  double final_step = 0.0;
};

/// (1/n) sum_i ||X_i - center||.
double l1_objective(const std::vector<Curve>& sample, const Curve& center);

/// Pointwise median across the sample at each grid point.
Curve coordinatewise_median(const std::vector<Curve>& sample);

/// Weiszfeld fixed point iteration started at the coordinatewise median.
/// Observations within eps0 of the current iterate are excluded from that
/// update. Steps that would increase the empirical objective are rejected
/// and terminate the iteration.
MedianResult spatial_median_weiszfeld(const std::vector<Curve>& sample,
                                      double tol = 1e-8,
                                      std::size_t max_iter = 500);

/// Averaged stochastic gradient median: one pass over the sample in
/// shuffled order with steps step_c * k^(-step_gamma), returning the
/// average of the iterates. The shuffle is driven by `seed`.
MedianResult spatial_median_asgd(const std::vector<Curve>& sample,
                                 double step_c = 1.0, double step_gamma = 0.6,
                                 std::uint64_t seed = 0);

}  // namespace fsign
