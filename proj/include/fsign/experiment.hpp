#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsign/simgen.hpp"
#include "fsign/twosample.hpp"

namespace fsign {

struct ExperimentConfig {
  SimDesign design;
  std::vector<std::size_t> M_list;
  double alpha = 0.05;
  std::size_t replications = 1;
  std::size_t N_b = 5000;
  std::vector<TestMode> modes;
  std::string output_dir;
  double gamma = 0.01;       // classification band level
  std::string fixture_path;  // non-empty: both samples read from this CSV

  void validate() const;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_json(const std::string& json_text);

struct RejectionRow {
  SimModel model;
  double delta = 0.0;
  std::size_t M = 0;
  TestMode mode;
  bool contaminated = false;
  double rejection_freq = 0.0;
  std::size_t replications = 0;
  std::size_t N_b = 0;
  std::uint64_t seed = 0;
};

struct VarianceRow {
  SimModel model;
  double delta = 0.0;
  TestMode mode;
  bool contaminated = false;
  std::size_t M = 0;
  double explained_fraction = 0.0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
};

struct RejectionTable {
  std::vector<RejectionRow> rows;
  std::vector<VarianceRow> explained;
};

/// Monte Carlo study over all (M, mode) cells of the config. Replication r
/// derives its generation, contamination and per-cell bootstrap streams
/// from (design.seed, r), so output never depends on the worker count.
/// Progress is appended to <output_dir>/checkpoint.csv after each
/// replication; rerunning with the same config resumes from it. Emits
/// <output_dir>/rejections.csv, explained_variance.csv and
/// size_classification.csv. threads = 0 uses the hardware concurrency.
RejectionTable run_experiment(const ExperimentConfig& config,
                              std::size_t threads = 0);

enum class SizeClass { accurate, conservative, liberal };

std::string to_string(SizeClass c);

/// Binomial accuracy band alpha +- z_{gamma/2} sqrt(alpha (1-alpha) / N):
/// below it conservative, above it liberal.
SizeClass classify_size(double pi_n, std::size_t N, double alpha, double gamma);

/// Inverse standard normal CDF (Acklam's rational approximation with one
/// Newton correction step; absolute error far below the band tolerances).
double normal_quantile(double p);

}  // namespace fsign
