#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fsign/errors.hpp"
#include "fsign/experiment.hpp"
#include "fsign/io.hpp"
#include "fsign/location.hpp"
#include "fsign/rng.hpp"
#include "fsign/signcov.hpp"
#include "fsign/simgen.hpp"
#include "fsign/spca.hpp"
#include "fsign/twosample.hpp"

namespace {

using nlohmann::json;

struct GlobalOpts {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t threads = 0;
  std::string out = ".";
};

std::string out_path(const GlobalOpts& g, const std::string& name) {
  std::filesystem::create_directories(g.out);
  return (std::filesystem::path(g.out) / name).string();
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw fsign::InvalidArgument("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

int cmd_median(const GlobalOpts& g, const std::string& sample_path, double tol,
               std::size_t max_iter, bool use_asgd, double step_c,
               double step_gamma) {
  auto sample = fsign::io::read_sample_csv(sample_path);
  fsign::MedianResult res =
      use_asgd ? fsign::spatial_median_asgd(sample, step_c, step_gamma, g.seed)
               : fsign::spatial_median_weiszfeld(sample, tol, max_iter);
  fsign::io::write_curve_csv(out_path(g, "median.csv"), res.estimate);
  json diag;
  diag["iterations"] = res.iterations;
  diag["converged"] = res.converged;
  diag["objective"] = fsign::l1_objective(sample, res.estimate);
  write_json(out_path(g, "median.json"), diag);
  std::cout << diag.dump(2) << std::endl;
  return 0;
}

int cmd_signcov(const GlobalOpts& g, const std::string& sample_path,
                const std::string& center_path) {
  auto sample = fsign::io::read_sample_csv(sample_path);
  fsign::Curve center = center_path.empty()
                            ? fsign::spatial_median_weiszfeld(sample).estimate
                            : fsign::io::read_curve_csv(center_path);
  fsign::SignCovResult res = fsign::sign_cov(sample, center);
  const std::size_t m = res.op.dim();
  fsign::io::write_matrix_csv(out_path(g, "signcov.csv"), res.op.kernel, m, m);
  json diag;
  diag["trace"] = fsign::trace(res.op);
  diag["hs_norm"] = fsign::hs_norm(res.op);
  diag["n_zero_residuals"] = res.n_zero_residuals;
  write_json(out_path(g, "signcov.json"), diag);
  std::cout << diag.dump(2) << std::endl;
  return 0;
}

int cmd_spca(const GlobalOpts& g, const std::string& sample_path, std::size_t k) {
  auto sample = fsign::io::read_sample_csv(sample_path);
  fsign::Curve center = fsign::spatial_median_weiszfeld(sample).estimate;
  fsign::SignCovResult cov = fsign::sign_cov(sample, center);
  const std::size_t m = cov.op.dim();
  if (k == 0) k = std::min<std::size_t>(10, m);
  fsign::EigenSystem sys = fsign::eigendecompose(cov.op, k);

  fsign::io::write_matrix_csv(out_path(g, "eigenvalues.csv"), sys.values, 1,
                              sys.values.size());
  std::vector<double> funcs;
  funcs.reserve(k * m);
  for (const auto& f : sys.functions) {
    funcs.insert(funcs.end(), f.values.begin(), f.values.end());
  }
  fsign::io::write_matrix_csv(out_path(g, "eigenfunctions.csv"), funcs, k, m);

  json diag;
  diag["trace"] = sys.op_trace;
  double acc = 0.0;
  json fractions = json::array();
  for (double v : sys.values) {
    acc += v;
    fractions.push_back(acc / sys.op_trace);
  }
  diag["explained_fraction"] = fractions;
  write_json(out_path(g, "spca.json"), diag);
  std::cout << diag.dump(2) << std::endl;
  return 0;
}

int cmd_test2(const GlobalOpts& g, const std::string& s1_path,
              const std::string& s2_path, const std::string& mode_name,
              std::size_t M, std::size_t nb, const std::string& draws_path) {
  auto s1 = fsign::io::read_sample_csv(s1_path);
  auto s2 = fsign::io::read_sample_csv(s2_path);
  fsign::TestMode mode = fsign::parse_test_mode(mode_name);
  fsign::TestResult res = fsign::run_test(s1, s2, M, nb, mode, g.seed);

  json j;
  j["statistic"] = res.statistic;
  j["p_value"] = res.p_value;
  j["thetas"] = res.spectrum.thetas;
  j["M"] = res.spectrum.M;
  j["q_n"] = res.spectrum.q_n;
  j["n1"] = res.n1;
  j["n2"] = res.n2;
  write_json(out_path(g, "test2.json"), j);
  if (!draws_path.empty()) {
    fsign::io::write_matrix_csv(draws_path, res.null_draws, res.null_draws.size(),
                                1);
  }
  std::cout << j.dump(2) << std::endl;
  return 0;
}

int cmd_simulate(const GlobalOpts& g, const std::string& model_name, double delta,
                 std::size_t n1, std::size_t n2, std::size_t m, double eps,
                 bool contaminate_given) {
  fsign::SimDesign design;
  design.model = fsign::parse_sim_model(model_name);
  design.delta = delta;
  design.n1 = n1;
  design.n2 = n2;
  design.m = m;
  design.contaminated = contaminate_given;
  design.epsilon = eps;
  design.seed = g.seed;
  design.validate();

  auto samples = fsign::gen_design(design);
  if (design.contaminated) {
    samples.first = fsign::contaminate(samples.first, design.epsilon,
                                       fsign::rng::derive(design.seed, 2));
    samples.second = fsign::contaminate(samples.second, design.epsilon,
                                        fsign::rng::derive(design.seed, 3));
  }
  fsign::io::write_sample_csv(out_path(g, "sample1.csv"), samples.first);
  fsign::io::write_sample_csv(out_path(g, "sample2.csv"), samples.second);
  std::cout << "wrote " << out_path(g, "sample1.csv") << " and "
            << out_path(g, "sample2.csv") << std::endl;
  return 0;
}

int cmd_experiment(const GlobalOpts& g, const std::string& config_path,
                   bool out_given) {
  fsign::ExperimentConfig cfg = fsign::parse_config_file(config_path);
  if (g.seed_given) cfg.design.seed = g.seed;
  if (out_given) cfg.output_dir = g.out;
  fsign::RejectionTable table = fsign::run_experiment(cfg, g.threads);

  std::printf("%-8s %-8s %-4s %-16s %-12s %s\n", "model", "delta", "M", "mode",
              "contaminated", "rejection_freq");
  for (const auto& r : table.rows) {
    std::printf("%-8s %-8.3g %-4zu %-16s %-12s %.4f\n",
                fsign::to_string(r.model).c_str(), r.delta, r.M,
                fsign::to_string(r.mode).c_str(),
                r.contaminated ? "true" : "false", r.rejection_freq);
  }
  std::printf("tables written to %s\n", cfg.output_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust functional sign-covariance analysis"};
  app.require_subcommand(1);

  GlobalOpts g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--threads", g.threads,
                 "Worker threads for experiments (0 = hardware)");
  auto* out_opt = app.add_option("--out", g.out, "Output directory")
                      ->capture_default_str();

  // median
  auto* median = app.add_subcommand("median", "Spatial median of a sample");
  std::string median_sample;
  double tol = 1e-8;
  std::size_t max_iter = 500;
  bool use_asgd = false;
  double step_c = 1.0;
  double step_gamma = 0.6;
  median->add_option("sample", median_sample, "Sample CSV")->required();
  median->add_option("--tol", tol, "Relative step tolerance")->capture_default_str();
  median->add_option("--max-iter", max_iter, "Iteration cap")->capture_default_str();
  median->add_flag("--asgd", use_asgd, "Averaged stochastic gradient estimator");
  median->add_option("--step-c", step_c, "asgd step constant")->capture_default_str();
  median->add_option("--step-gamma", step_gamma, "asgd step exponent")
      ->capture_default_str();

  // signcov
  auto* signcov = app.add_subcommand("signcov", "Sample sign covariance operator");
  std::string signcov_sample;
  std::string signcov_center;
  signcov->add_option("sample", signcov_sample, "Sample CSV")->required();
  signcov->add_option("--center", signcov_center,
                      "Center curve CSV (default: internal spatial median)");

  // spca
  auto* spca = app.add_subcommand("spca", "Spherical principal components");
  std::string spca_sample;
  std::size_t spca_k = 0;
  spca->add_option("sample", spca_sample, "Sample CSV")->required();
  spca->add_option("--k", spca_k, "Number of components (default min(10, m))");

  // test2
  auto* test2 = app.add_subcommand("test2", "Two-sample operator equality test");
  std::string t2_s1;
  std::string t2_s2;
  std::string t2_mode = "sign";
  std::size_t t2_M = 10;
  std::size_t t2_nb = 5000;
  std::string t2_draws;
  test2->add_option("sample1", t2_s1, "First sample CSV")->required();
  test2->add_option("sample2", t2_s2, "Second sample CSV")->required();
  test2->add_option("--mode", t2_mode, "sign | classical | classical-gauss")
      ->capture_default_str();
  test2->add_option("--M", t2_M, "Projection dimension")->capture_default_str();
  test2->add_option("--nb", t2_nb, "Bootstrap draws")->capture_default_str();
  test2->add_option("--draws", t2_draws, "Optional CSV path for the null draws");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate a two-sample design");
  std::string sim_model = "null";
  double sim_delta = 0.0;
  std::size_t sim_n1 = 100;
  std::size_t sim_n2 = 100;
  std::size_t sim_m = 100;
  double sim_eps = 0.1;
  simulate->add_option("--model", sim_model, "null | model1 | model2")
      ->capture_default_str();
  simulate->add_option("--delta", sim_delta, "Alternative size")
      ->capture_default_str();
  simulate->add_option("--n1", sim_n1, "First sample size")->capture_default_str();
  simulate->add_option("--n2", sim_n2, "Second sample size")->capture_default_str();
  simulate->add_option("--m", sim_m, "Grid size")->capture_default_str();
  auto* cont_opt = simulate->add_option("--contaminate", sim_eps,
                                        "Contaminate with this probability");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo study");
  std::string config_path;
  experiment->add_option("--config", config_path, "JSON config path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  g.seed_given = seed_opt->count() > 0;

  try {
    if (median->parsed()) {
      return cmd_median(g, median_sample, tol, max_iter, use_asgd, step_c,
                        step_gamma);
    }
    if (signcov->parsed()) return cmd_signcov(g, signcov_sample, signcov_center);
    if (spca->parsed()) return cmd_spca(g, spca_sample, spca_k);
    if (test2->parsed()) {
      return cmd_test2(g, t2_s1, t2_s2, t2_mode, t2_M, t2_nb, t2_draws);
    }
    if (simulate->parsed()) {
      return cmd_simulate(g, sim_model, sim_delta, sim_n1, sim_n2, sim_m, sim_eps,
                          cont_opt->count() > 0);
    }
    if (experiment->parsed()) {
      return cmd_experiment(g, config_path, out_opt->count() > 0);
    }
  } catch (const fsign::Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  }
  return 0;
}
