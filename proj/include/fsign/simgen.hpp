#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fsign/hilbert.hpp"

namespace fsign {

enum class SimModel { null_bm, model1, model2 };

SimModel parse_sim_model(const std::string& name);
std::string to_string(SimModel model);

struct SimDesign {
  SimModel model = SimModel::null_bm;
  double delta = 0.0;  // the alternative scales as delta * n^(-1/4)
  std::size_t n1 = 100;
  std::size_t n2 = 100;
  std::size_t m = 100;
  bool contaminated = false;
  double epsilon = 0.1;
  std::uint64_t seed = 0;

  double delta_n() const;  // delta * (n1 + n2)^(-1/4)
  void validate() const;
};

/// Standard Brownian motion on t_j = j/m via cumulative N(0, 1/m) increments.
std::vector<Curve> gen_bm(std::size_t m, std::size_t count, std::uint64_t seed);

/// Pair (sample1, sample2): BMs vs Y1 + delta_n * Y2^2 with independent BMs.
std::pair<std::vector<Curve>, std::vector<Curve>> gen_model1(const SimDesign& design);

/// Pair (sample1, sample2): BMs vs Y1 + delta_n * Y2 where Y2 is the
/// Ornstein-Uhlenbeck-kernel Gaussian process exp(-|s-t|/0.2).
std::pair<std::vector<Curve>, std::vector<Curve>> gen_model2(const SimDesign& design);

/// The Y2 process of model2 on its own: centered Gaussian draws with
/// covariance exp(-|s-t|/0.2).
std::vector<Curve> gen_ou(std::size_t m, std::size_t count, std::uint64_t seed);

/// Generate per the design's model; null_bm ignores delta.
std::pair<std::vector<Curve>, std::vector<Curve>> gen_design(const SimDesign& design);

/// Each curve independently, with probability epsilon, is multiplied by a
/// draw of |standard Cauchy|.
std::vector<Curve> contaminate(const std::vector<Curve>& sample, double epsilon,
                               std::uint64_t seed);

/// Elliptical t-process: V * BM with V = sqrt(k / chi2_k), independent.
std::vector<Curve> gen_elliptical_t(std::size_t m, std::size_t count, double k,
                                    std::uint64_t seed);

}  // namespace fsign
