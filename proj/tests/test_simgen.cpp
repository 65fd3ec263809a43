#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fsign/errors.hpp"
#include "fsign/hilbert.hpp"
#include "fsign/rng.hpp"
#include "fsign/signcov.hpp"
#include "fsign/simgen.hpp"
#include "fsign/twosample.hpp"
#include "helpers.hpp"

using namespace fsign;

namespace {

std::vector<double> coordinate(const std::vector<Curve>& sample, std::size_t j) {
  std::vector<double> out;
  out.reserve(sample.size());
  for (const auto& c : sample) out.push_back(c.values[j]);
  return out;
}

double cov_of(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = th::mean_of(a), mb = th::mean_of(b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - ma) * (b[i] - mb);
  return acc / static_cast<double>(a.size() - 1);
}

}  // namespace

TEST_CASE("model name parsing") {
  CHECK(parse_sim_model("null") == SimModel::null_bm);
  CHECK(parse_sim_model("null_bm") == SimModel::null_bm);
  CHECK(parse_sim_model("model1") == SimModel::model1);
  CHECK(parse_sim_model("model2") == SimModel::model2);
  CHECK_THROWS_AS(parse_sim_model("model3"), InvalidArgument);
  CHECK(to_string(SimModel::null_bm) == "null");
}

TEST_CASE("design validation") {
  SimDesign d;
  CHECK_NOTHROW(d.validate());
  SimDesign bad_m = d;
  bad_m.m = 1;
  CHECK_THROWS_AS(bad_m.validate(), InvalidArgument);
  SimDesign bad_n = d;
  bad_n.n1 = 0;
  CHECK_THROWS_AS(bad_n.validate(), InvalidArgument);
  SimDesign bad_delta = d;
  bad_delta.delta = -1.0;
  CHECK_THROWS_AS(bad_delta.validate(), InvalidArgument);
  SimDesign bad_eps = d;
  bad_eps.epsilon = 1.0;
  CHECK_THROWS_AS(bad_eps.validate(), InvalidArgument);

  SimDesign scaled = d;
  scaled.delta = 2.0;
  scaled.n1 = scaled.n2 = 50;
  CHECK(scaled.delta_n() == doctest::Approx(2.0 * std::pow(100.0, -0.25)).epsilon(1e-14));
}

TEST_CASE("Brownian motion moments") {
  const std::size_t m = 20, count = 10000;
  const auto sample = gen_bm(m, count, 20260814);

  // Pooled increment variance ~ 1/m.
  double acc = 0.0;
  std::size_t terms = 0;
  for (const auto& c : sample) {
    double prev = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double inc = c.values[j] - prev;
      acc += inc * inc;
      prev = c.values[j];
      ++terms;
    }
  }
  const double inc_var = acc / static_cast<double>(terms);
  CHECK(std::abs(inc_var - 1.0 / m) <= 0.05 / m);

  // W(1) has variance 1.
  const auto w1 = coordinate(sample, m - 1);
  CHECK(std::abs(th::var_of(w1) - 1.0) <= 0.05);
  CHECK(std::abs(th::mean_of(w1)) <= 0.05);

  // Cov(W(0.5), W(1)) = 0.5.
  const auto wh = coordinate(sample, m / 2 - 1);
  CHECK(std::abs(cov_of(wh, w1) - 0.5) <= 0.05);
}

TEST_CASE("generators are deterministic in the seed") {
  const auto a = gen_bm(10, 5, 3);
  const auto b = gen_bm(10, 5, 3);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 10; ++j) REQUIRE(a[i].values[j] == b[i].values[j]);
  const auto c = gen_bm(10, 5, 4);
  CHECK(c[0].values[0] != a[0].values[0]);

  SimDesign d;
  d.model = SimModel::model2;
  d.delta = 1.5;
  d.n1 = d.n2 = 4;
  d.m = 12;
  d.seed = 9;
  const auto p1 = gen_model2(d);
  const auto p2 = gen_model2(d);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 12; ++j) {
      REQUIRE(p1.first[i].values[j] == p2.first[i].values[j]);
      REQUIRE(p1.second[i].values[j] == p2.second[i].values[j]);
    }

  const auto e1 = gen_elliptical_t(8, 6, 3.0, 11);
  const auto e2 = gen_elliptical_t(8, 6, 3.0, 11);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 8; ++j) REQUIRE(e1[i].values[j] == e2[i].values[j]);
}

TEST_CASE("model1 reduces to the null at delta 0") {
  SimDesign d;
  d.model = SimModel::model1;
  d.delta = 0.0;
  d.n1 = 2;
  d.n2 = 10000;
  d.m = 10;
  d.seed = 5;
  const auto [s1, s2] = gen_model1(d);
  REQUIRE(s2.size() == 10000);
  const auto final_coord = coordinate(s2, 9);
  CHECK(std::abs(th::var_of(final_coord) - 1.0) <= 0.05);
  CHECK(std::abs(th::mean_of(final_coord)) <= 0.05);
}

TEST_CASE("model1 mean shift matches delta_n") {
  SimDesign d;
  d.model = SimModel::model1;
  d.delta = 3.0;
  d.n1 = 2;
  d.n2 = 10000;
  d.m = 10;
  d.seed = 6;
  const auto [s1, s2] = gen_model1(d);
  // E[X2(1)] = delta_n E[Y2(1)^2] = delta_n; spread is sqrt(1 + 2 delta_n^2).
  const double dn = d.delta_n();
  const auto final_coord = coordinate(s2, 9);
  const double se = std::sqrt((1.0 + 2.0 * dn * dn) / static_cast<double>(d.n2));
  CHECK(std::abs(th::mean_of(final_coord) - dn) <= 4.0 * se);
}

TEST_CASE("OU process matches its kernel") {
  const std::size_t m = 20, count = 10000;
  const auto sample = gen_ou(m, count, 77);

  // Kernel diagonal is 1 at every design point.
  for (std::size_t j = 0; j < m; ++j) {
    CAPTURE(j);
    CHECK(std::abs(th::var_of(coordinate(sample, j)) - 1.0) <= 0.05);
  }

  // Corr at lag 0.2 is exp(-1). Points 0.5 and 0.7 sit at j=10 and j=14.
  const auto a = coordinate(sample, 9);
  const auto b = coordinate(sample, 13);
  const double corr = cov_of(a, b) / std::sqrt(th::var_of(a) * th::var_of(b));
  CHECK(std::abs(corr - std::exp(-1.0)) <= 0.03);
}

TEST_CASE("model2 reduces to the null at delta 0") {
  SimDesign d;
  d.model = SimModel::model2;
  d.delta = 0.0;
  d.n1 = 2;
  d.n2 = 10000;
  d.m = 10;
  d.seed = 8;
  const auto [s1, s2] = gen_model2(d);
  const auto final_coord = coordinate(s2, 9);
  CHECK(std::abs(th::var_of(final_coord) - 1.0) <= 0.05);
}

TEST_CASE("null-model samples keep the sign test near its level") {
  // Crude level smoke at desk scale: 30 seeded null replications, expect
  // a rejection count consistent with alpha = 0.05.
  std::size_t rejections = 0;
  for (std::uint64_t rep = 0; rep < 30; ++rep) {
    SimDesign d;
    d.model = SimModel::model1;
    d.delta = 0.0;
    d.n1 = d.n2 = 40;
    d.m = 30;
    d.seed = rng::derive(1000, rep);
    const auto [s1, s2] = gen_design(d);
    const TestResult res = run_test(s1, s2, 3, 200, TestMode::sign, d.seed + 1);
    rejections += (res.p_value < 0.05);
  }
  CHECK(rejections <= 6);
}

TEST_CASE("contamination") {
  const auto sample = gen_bm(12, 100, 13);

  const auto untouched = contaminate(sample, 0.0, 99);
  for (std::size_t i = 0; i < sample.size(); ++i)
    for (std::size_t j = 0; j < 12; ++j)
      REQUIRE(untouched[i].values[j] == sample[i].values[j]);

  const auto all = contaminate(sample, 1.0, 99);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    bool changed = false;
    for (std::size_t j = 0; j < 12; ++j) changed |= (all[i].values[j] != sample[i].values[j]);
    CHECK(changed);
  }

  // Positive per-curve multipliers leave the sign operator about the center
  // of symmetry untouched.
  const GridPtr g = sample.front().grid;
  std::vector<Curve> symmetric;
  for (std::size_t i = 0; i < 50; ++i) {
    symmetric.push_back(sample[i]);
    symmetric.push_back(scale(sample[i], -1.0));
  }
  const auto polluted = contaminate(symmetric, 1.0, 4);
  const SignCovResult clean_op = sign_cov(symmetric, Curve(g));
  const SignCovResult dirty_op = sign_cov(polluted, Curve(g));
  for (std::size_t i = 0; i < clean_op.op.kernel.size(); ++i)
    CHECK(std::abs(clean_op.op.kernel[i] - dirty_op.op.kernel[i]) <= 1e-12);

  std::size_t hits = 0;
  const auto big = gen_bm(4, 10000, 14);
  const auto frac = contaminate(big, 0.1, 15);
  for (std::size_t i = 0; i < big.size(); ++i) {
    bool changed = false;
    for (std::size_t j = 0; j < 4; ++j) changed |= (frac[i].values[j] != big[i].values[j]);
    hits += changed;
  }
  CHECK(std::abs(hits / 10000.0 - 0.10) <= 0.01);

  CHECK_THROWS_AS(contaminate(sample, -0.1, 0), InvalidArgument);
  CHECK_THROWS_AS(contaminate(sample, 1.5, 0), InvalidArgument);
}

TEST_CASE("elliptical t-process") {
  // Large df: the scale mixture collapses to the Gaussian.
  const auto nearly_gaussian = gen_elliptical_t(6, 10000, 1e6, 16);
  const auto w1 = coordinate(nearly_gaussian, 5);
  const double mu = th::mean_of(w1);
  const double var = th::var_of(w1);
  double m4 = 0.0;
  for (double x : w1) m4 += std::pow(x - mu, 4) / w1.size();
  const double kurt = m4 / (var * var);
  CHECK(std::abs(kurt - 3.0) <= 0.2);
  CHECK(std::abs(var - 1.0) <= 0.05);

  // The sign operator is blind to the radial mixing variable.
  const std::size_t m = 30, n = 5000;
  const auto heavy = gen_elliptical_t(m, n, 1.0, 17);
  const auto light = gen_bm(m, n, 18);
  const GridPtr g = heavy.front().grid;
  const SignCovResult sc_heavy = sign_cov(heavy, Curve(g));
  const SignCovResult sc_light = sign_cov(light, Curve(g));
  CHECK(hs_norm(sub(sc_heavy.op, sc_light.op)) <= 0.05);

  CHECK_THROWS_AS(gen_elliptical_t(6, 10, 0.5, 0), InvalidArgument);
}

TEST_CASE("generator input validation") {
  CHECK_THROWS_AS(gen_bm(1, 10, 0), InvalidArgument);
  CHECK_THROWS_AS(gen_bm(10, 0, 0), InvalidArgument);
  CHECK_THROWS_AS(gen_ou(1, 10, 0), InvalidArgument);

  SimDesign d;
  d.model = SimModel::model1;
  CHECK_THROWS_AS(gen_model2(d), InvalidArgument);
  d.model = SimModel::model2;
  CHECK_THROWS_AS(gen_model1(d), InvalidArgument);
}
