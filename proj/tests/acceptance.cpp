// Acceptance gate: one line per criterion, [PASS]/[FAIL] with the measured
// value and the pinned tolerance. Exits nonzero when any criterion fails.
//
// Usage: acceptance [work_dir]

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "fsign/experiment.hpp"
#include "fsign/hilbert.hpp"
#include "fsign/kernels.hpp"
#include "fsign/location.hpp"
#include "fsign/rng.hpp"
#include "fsign/signcov.hpp"
#include "fsign/simgen.hpp"
#include "fsign/spca.hpp"
#include "fsign/twosample.hpp"

using namespace fsign;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  const double mu = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

ExperimentConfig desk_config(const std::string& out_dir, SimModel model,
                             double delta, bool contaminated,
                             std::size_t replications, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.design.model = model;
  cfg.design.delta = delta;
  cfg.design.n1 = cfg.design.n2 = 100;
  cfg.design.m = 100;
  cfg.design.contaminated = contaminated;
  cfg.design.epsilon = 0.1;
  cfg.design.seed = seed;
  cfg.M_list = {10};
  cfg.alpha = 0.05;
  cfg.replications = replications;
  cfg.N_b = 1000;
  cfg.modes = {TestMode::sign};
  cfg.output_dir = out_dir;
  return cfg;
}

// 1. Null size of the sign test at desk scale.
Outcome criterion_null_size(const std::string& work) {
  ExperimentConfig cfg = desk_config(work + "/c1", SimModel::null_bm, 0.0, false,
                                     200, 20260814);
  const RejectionTable table = run_experiment(cfg, 0);
  const double freq = table.rows[0].rejection_freq;
  Outcome out;
  out.pass = freq >= 0.02 && freq <= 0.09;
  out.detail = fmt("null size, sign mode, M=10: rejection_freq=%.4f, band [0.02, 0.09]", freq);
  return out;
}

// 2. Scale contamination: the sign test keeps its level, the classical
//    test collapses below it.
Outcome criterion_contaminated(const std::string& work) {
  ExperimentConfig cfg = desk_config(work + "/c2", SimModel::model1, 0.0, true,
                                     200, 20260815);
  cfg.modes = {TestMode::sign, TestMode::classical};
  const RejectionTable table = run_experiment(cfg, 0);
  double sign_freq = -1.0;
  double classical_freq = -1.0;
  for (const auto& row : table.rows) {
    if (row.mode == TestMode::sign) sign_freq = row.rejection_freq;
    if (row.mode == TestMode::classical) classical_freq = row.rejection_freq;
  }
  Outcome out;
  out.pass = sign_freq >= 0.02 && sign_freq <= 0.09 && classical_freq < 0.03;
  out.detail = fmt(
      "contaminated null: sign=%.4f (band [0.02, 0.09]), classical=%.4f (< 0.03)",
      sign_freq, classical_freq);
  return out;
}

// 3. Power against the mean-shift alternative at delta = 2.
Outcome criterion_power(const std::string& work) {
  ExperimentConfig cfg = desk_config(work + "/c3", SimModel::model2, 2.0, false,
                                     100, 20260816);
  const RejectionTable table = run_experiment(cfg, 0);
  const double freq = table.rows[0].rejection_freq;
  Outcome out;
  out.pass = std::abs(freq - 0.867) <= 0.10;
  out.detail = fmt("power, model2 delta=2, M=10: rejection_freq=%.4f, target 0.867 +/- 0.10",
                   freq);
  return out;
}

// 4. Explained variance of the pooled sign operator under the null design.
Outcome criterion_explained_variance(const std::string&) {
  SimDesign d;
  d.model = SimModel::null_bm;
  d.n1 = d.n2 = 100;
  d.m = 100;
  d.seed = 20260817;
  auto samples = gen_design(d);
  const Curve c1 = spatial_median_weiszfeld(samples.first).estimate;
  const Curve c2 = spatial_median_weiszfeld(samples.second).estimate;
  const HSOperator op1 = sign_cov(samples.first, c1).op;
  const HSOperator op2 = sign_cov(samples.second, c2).op;
  HSOperator pooled = scale(op1, 0.5);
  axpy_inplace(0.5, op2, pooled);

  const EigenSystem sys = eigendecompose(pooled, 30);
  const double tr = trace(pooled);
  const std::size_t Ms[4] = {3, 10, 20, 30};
  const double targets[4] = {0.828, 0.950, 0.979, 0.989};
  double got[4];
  double acc = 0.0;
  std::size_t next = 0;
  for (std::size_t j = 0; j < 30; ++j) {
    acc += sys.values[j];
    if (next < 4 && j + 1 == Ms[next]) got[next++] = acc / tr;
  }
  Outcome out;
  out.pass = true;
  for (std::size_t k = 0; k < 4; ++k) {
    if (std::abs(got[k] - targets[k]) > 0.02) out.pass = false;
  }
  out.detail = fmt(
      "explained variance at M=3/10/20/30: %.3f/%.3f/%.3f/%.3f, "
      "targets 0.828/0.950/0.979/0.989 +/- 0.02",
      got[0], got[1], got[2], got[3]);
  return out;
}

// 5. Sign-operator eigenvalues of a rank-2 Gaussian process against the
//    Monte Carlo shrinkage factors, within 3 combined standard errors.
Outcome criterion_shrinkage(const std::string&) {
  const std::size_t m = 50;
  const std::size_t n = 20000;
  GridPtr grid = make_equidistant_grid(m);

  // Exactly orthonormal pair in the grid inner product.
  Curve e1(grid);
  Curve e2(grid);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = grid->points[i];
    e1.values[i] = std::sin(std::numbers::pi * t) + 0.25;
    e2.values[i] = std::cos(2.0 * std::numbers::pi * t);
  }
  e1 = scale(e1, 1.0 / norm(e1));
  e2 = sub(e2, scale(e1, inner(e1, e2)));
  e2 = scale(e2, 1.0 / norm(e2));

  const double lambda1 = 2.0;
  const double lambda2 = 1.0;
  rng::Stream gen(99991);
  std::vector<Curve> sample;
  sample.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Curve x(grid);
    axpy_inplace(std::sqrt(lambda1) * gen.normal(), e1, x);
    axpy_inplace(std::sqrt(lambda2) * gen.normal(), e2, x);
    sample.push_back(std::move(x));
  }

  const Curve center(grid);
  const SignCovResult cov = sign_cov(sample, center);
  const EigenSystem sys = eigendecompose(cov.op, 2);

  // Per-observation squared scores reproduce the eigenvalues and give
  // their Monte Carlo standard errors.
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = norm(sample[i]);
  const double eps0 = residual_eps0(norms);
  std::vector<double> v1(n), v2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Curve s = sign(sample[i], eps0);
    const double a = inner(sys.functions[0], s);
    const double b = inner(sys.functions[1], s);
    v1[i] = a * a;
    v2[i] = b * b;
  }
  const double se_op1 = sd_of(v1) / std::sqrt(static_cast<double>(n));
  const double se_op2 = sd_of(v2) / std::sqrt(static_cast<double>(n));

  // Independent replicates of the shrinkage factors.
  std::vector<double> f1, f2;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto f = shrinkage_factor_mc({lambda1, lambda2}, 100000, 7000 + k);
    f1.push_back(f[0]);
    f2.push_back(f[1]);
  }
  const double m1 = mean_of(f1);
  const double m2 = mean_of(f2);
  const double se_sh1 = sd_of(f1) / std::sqrt(10.0);
  const double se_sh2 = sd_of(f2) / std::sqrt(10.0);

  const double tol1 = 3.0 * std::sqrt(se_op1 * se_op1 + se_sh1 * se_sh1);
  const double tol2 = 3.0 * std::sqrt(se_op2 * se_op2 + se_sh2 * se_sh2);
  Outcome out;
  out.pass = std::abs(sys.values[0] - m1) <= tol1 &&
             std::abs(sys.values[1] - m2) <= tol2;
  out.detail = fmt(
      "rank-2 shrinkage: operator (%.5f, %.5f) vs factors (%.5f, %.5f), "
      "3se tolerances (%.5f, %.5f)",
      sys.values[0], sys.values[1], m1, m2, tol1, tol2);
  return out;
}

// 6. Property bundle with a hard runtime budget.
Outcome criterion_properties(const std::string&) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string failed;

  // trace identity: trace = (n - n_zero)/n
  {
    auto s = gen_bm(40, 60, 31);
    const Curve c = spatial_median_weiszfeld(s).estimate;
    const SignCovResult r = sign_cov(s, c);
    const double expect =
        static_cast<double>(60 - r.n_zero_residuals) / 60.0;
    if (std::abs(trace(r.op) - expect) > 1e-10) failed += " trace";
  }

  // positive per-observation rescaling leaves the operator unchanged
  {
    auto s = gen_bm(25, 30, 32);
    const Curve zero(s.front().grid);
    const HSOperator a = sign_cov(s, zero).op;
    rng::Stream g(33);
    for (auto& x : s) scale_inplace(0.5 + 4.0 * g.uniform(), x);
    const HSOperator b = sign_cov(s, zero).op;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.kernel.size(); ++i) {
      worst = std::max(worst, std::abs(a.kernel[i] - b.kernel[i]));
    }
    if (worst > 1e-12) failed += " scale-invariance";
  }

  // half-vectorization is an isometry for the Frobenius norm
  {
    rng::Stream g(34);
    for (std::size_t rep = 0; rep < 20; ++rep) {
      const std::size_t M = 1 + rep % 5;
      std::vector<double> sym(M * M);
      for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t j = i; j < M; ++j) {
          sym[i * M + j] = sym[j * M + i] = g.normal();
        }
      }
      double fro = 0.0;
      for (double x : sym) fro += x * x;
      double hv2 = 0.0;
      for (double x : half_vectorize(sym, M)) hv2 += x * x;
      if (std::abs(fro - hv2) > 1e-12 * std::max(1.0, fro)) {
        failed += " hv-isometry";
        break;
      }
    }
  }

  // Weiszfeld objective never increases with the iteration budget
  {
    auto s = gen_bm(20, 30, 35);
    double prev = l1_objective(s, coordinatewise_median(s));
    for (std::size_t k = 1; k <= 15; ++k) {
      const double obj =
          l1_objective(s, spatial_median_weiszfeld(s, 1e-15, k).estimate);
      if (obj > prev + 1e-10) {
        failed += " weiszfeld-monotone";
        break;
      }
      prev = obj;
    }
  }

  // eigenfunctions are orthonormal in the grid inner product
  {
    auto s = gen_bm(30, 50, 36);
    const Curve c = spatial_median_weiszfeld(s).estimate;
    const EigenSystem sys = eigendecompose(sign_cov(s, c).op, 8);
    double worst = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t j = 0; j < 8; ++j) {
        const double want = i == j ? 1.0 : 0.0;
        worst = std::max(
            worst, std::abs(inner(sys.functions[i], sys.functions[j]) - want));
      }
    }
    if (worst > 1e-8) failed += " orthonormality";
  }

  // bootstrap draws are a pure function of (seed, stream)
  {
    ThetaSpectrum sp;
    sp.thetas = {1.5, 0.7, 0.2};
    sp.M = 2;
    sp.q_n = 3;
    const auto a = bootstrap_null(sp, 1000, 77, 0);
    const auto b = bootstrap_null(sp, 1000, 77, 0);
    const auto c = bootstrap_null(sp, 1000, 77, 1);
    if (a != b || a == c) failed += " bootstrap-determinism";
  }

  // nested-loop oracle reproduces sign_cov bit for bit (scalar backend)
  {
    kern::ScopedBackend backend("scalar");
    GridPtr grid = make_equidistant_grid(3);
    const std::vector<Curve> s = {
        Curve(grid, {1.0, -0.5, 2.0}),
        Curve(grid, {0.25, 0.75, -1.5}),
        Curve(grid, {-2.0, 1.0, 0.5}),
        Curve(grid, {0.25, 0.75, -1.5}),  // duplicate of the center
    };
    const Curve center = s[1];
    const std::size_t n = s.size();
    const std::size_t m = 3;

    std::vector<std::vector<double>> resid(n, std::vector<double>(m));
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        resid[i][j] = s[i].values[j] - center.values[j];
        acc += grid->weights[j] * (resid[i][j] * resid[i][j]);
      }
      norms[i] = std::sqrt(acc);
    }
    const double eps0 = residual_eps0(norms);
    std::vector<double> K(m * m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(norms[i] > eps0)) continue;
      const double inv = 1.0 / norms[i];
      double sv[3];
      for (std::size_t j = 0; j < m; ++j) sv[j] = resid[i][j] * inv;
      for (std::size_t a = 0; a < m; ++a) {
        const double ua = sv[a];
        for (std::size_t b = 0; b < m; ++b) K[a * m + b] += ua * sv[b];
      }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& x : K) x *= inv_n;

    // Observations 1 and 3 coincide with the center.
    const SignCovResult r = sign_cov(s, center);
    if (r.n_zero_residuals != 2 ||
        std::memcmp(K.data(), r.op.kernel.data(), sizeof(double) * K.size()) != 0) {
      failed += " nested-loop-oracle";
    }
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome out;
  out.pass = failed.empty() && elapsed <= 120.0;
  out.detail =
      failed.empty()
          ? fmt("property bundle: all passed in %.1f s (budget 120 s)", elapsed)
          : fmt("property bundle failed:%s (%.1f s)", failed.c_str(), elapsed);
  return out;
}

// 7. Sign-operator eigenfunctions track the Brownian basis.
Outcome criterion_bm_eigenfunctions(const std::string&) {
  auto s = gen_bm(100, 2000, 41);
  const Curve c = spatial_median_weiszfeld(s).estimate;
  const EigenSystem sys = eigendecompose(sign_cov(s, c).op, 2);

  GridPtr grid = s.front().grid;
  double align[2];
  for (std::size_t j = 0; j < 2; ++j) {
    Curve phi(grid);
    for (std::size_t i = 0; i < grid->size(); ++i) {
      phi.values[i] = std::sqrt(2.0) * std::sin((static_cast<double>(j) + 0.5) *
                                                std::numbers::pi *
                                                grid->points[i]);
    }
    align[j] = std::abs(inner(sys.functions[j], phi));
  }
  Outcome out;
  out.pass = align[0] >= 0.95 && align[1] >= 0.95;
  out.detail = fmt("eigenfunction alignment: |<phi_1,bm_1>|=%.4f, |<phi_2,bm_2>|=%.4f, "
                   "threshold 0.95",
                   align[0], align[1]);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string work = argc > 1 ? argv[1] : "acceptance_work";
  fs::remove_all(work);
  fs::create_directories(work);

  using Criterion = std::function<Outcome(const std::string&)>;
  const std::vector<Criterion> criteria = {
      criterion_null_size,     criterion_contaminated,
      criterion_power,         criterion_explained_variance,
      criterion_shrinkage,     criterion_properties,
      criterion_bm_eigenfunctions,
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      out = criteria[i](work);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = fmt("unexpected exception: %s", e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("[%s] criterion %zu: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL",
                i + 1, out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }

  std::printf("acceptance: %zu/%zu criteria passed\n", criteria.size() - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
