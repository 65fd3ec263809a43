#include "fsign/simgen.hpp"

#include <cmath>

#include "fsign/errors.hpp"
#include "fsign/rng.hpp"

namespace fsign {

SimModel parse_sim_model(const std::string& name) {
  if (name == "null" || name == "null_bm") return SimModel::null_bm;
  if (name == "model1") return SimModel::model1;
  if (name == "model2") return SimModel::model2;
  throw InvalidArgument("unknown model '" + name + "'");
}

std::string to_string(SimModel model) {
  switch (model) {
    case SimModel::null_bm: return "null";
    case SimModel::model1: return "model1";
    case SimModel::model2: return "model2";
  }
  return "?";
}

double SimDesign::delta_n() const {
  return delta * std::pow(static_cast<double>(n1 + n2), -0.25);
}

void SimDesign::validate() const {
  if (m < 2) throw InvalidArgument("design: m must be >= 2");
  if (n1 < 1 || n2 < 1) throw InvalidArgument("design: sample sizes must be >= 1");
  if (!(delta >= 0.0)) throw InvalidArgument("design: delta must be >= 0");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw InvalidArgument("design: epsilon must lie in [0, 1)");
  }
}

namespace {

void append_bm(std::vector<Curve>& out, const GridPtr& grid, std::size_t count,
               rng::Stream& rs) {
  const std::size_t m = grid->size();
  const double sd = 1.0 / std::sqrt(static_cast<double>(m));
  for (std::size_t i = 0; i < count; ++i) {
    Curve c(grid);
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      acc += sd * rs.normal();
      c.values[j] = acc;
    }
    out.push_back(std::move(c));
  }
}

// Lower-triangular Cholesky factor of the Ornstein-Uhlenbeck kernel matrix
// exp(-|t_i - t_j| / 0.2) with escalating diagonal jitter.
std::vector<double> ou_cholesky(const Grid& grid) {
  const std::size_t m = grid.size();
  std::vector<double> base(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      base[i * m + j] = std::exp(-std::abs(grid.points[i] - grid.points[j]) / 0.2);
    }
  }
  for (double jitter : {1e-10, 1e-8}) {
    std::vector<double> a = base;
    for (std::size_t i = 0; i < m; ++i) a[i * m + i] += jitter;
    std::vector<double> L(m * m, 0.0);
    bool ok = true;
    for (std::size_t i = 0; i < m && ok; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = a[i * m + j];
        for (std::size_t k = 0; k < j; ++k) s -= L[i * m + k] * L[j * m + k];
        if (i == j) {
          if (s <= 0.0) {
            ok = false;
            break;
          }
          L[i * m + i] = std::sqrt(s);
        } else {
          L[i * m + j] = s / L[j * m + j];
        }
      }
    }
    if (ok) return L;
  }
  throw NumericalFailure("model2: kernel factorization failed after jitter escalation");
}

Curve ou_draw(const GridPtr& grid, const std::vector<double>& chol,
              rng::Stream& rs) {
  const std::size_t m = grid->size();
  std::vector<double> z(m);
  rs.fill_normal(z.data(), m);
  Curve c(grid);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k <= i; ++k) acc += chol[i * m + k] * z[k];
    c.values[i] = acc;
  }
  return c;
}

}  // namespace

std::vector<Curve> gen_bm(std::size_t m, std::size_t count, std::uint64_t seed) {
  if (m < 2) throw InvalidArgument("gen_bm: m must be >= 2");
  if (count < 1) throw InvalidArgument("gen_bm: count must be >= 1");
  GridPtr grid = make_equidistant_grid(m);
  rng::Stream rs(seed);
  std::vector<Curve> out;
  out.reserve(count);
  append_bm(out, grid, count, rs);
  return out;
}

std::pair<std::vector<Curve>, std::vector<Curve>> gen_model1(const SimDesign& design) {
  design.validate();
  if (design.model != SimModel::model1) {
    throw InvalidArgument("gen_model1: design.model mismatch");
  }
  GridPtr grid = make_equidistant_grid(design.m);
  rng::Stream rs(design.seed);
  const double dn = design.delta_n();

  std::vector<Curve> s1;
  s1.reserve(design.n1);
  append_bm(s1, grid, design.n1, rs);

  std::vector<Curve> s2;
  s2.reserve(design.n2);
  std::vector<Curve> tmp;
  for (std::size_t i = 0; i < design.n2; ++i) {
    tmp.clear();
    append_bm(tmp, grid, 2, rs);
    Curve c(grid);
    for (std::size_t j = 0; j < design.m; ++j) {
      const double y2 = tmp[1].values[j];
      c.values[j] = tmp[0].values[j] + dn * (y2 * y2);
    }
    s2.push_back(std::move(c));
  }
  return {std::move(s1), std::move(s2)};
}

std::pair<std::vector<Curve>, std::vector<Curve>> gen_model2(const SimDesign& design) {
  design.validate();
  if (design.model != SimModel::model2) {
    throw InvalidArgument("gen_model2: design.model mismatch");
  }
  GridPtr grid = make_equidistant_grid(design.m);
  rng::Stream rs(design.seed);
  const double dn = design.delta_n();
  const std::vector<double> chol = ou_cholesky(*grid);

  std::vector<Curve> s1;
  s1.reserve(design.n1);
  append_bm(s1, grid, design.n1, rs);

  std::vector<Curve> s2;
  s2.reserve(design.n2);
  std::vector<Curve> y1;
  for (std::size_t i = 0; i < design.n2; ++i) {
    y1.clear();
    append_bm(y1, grid, 1, rs);
    Curve y2 = ou_draw(grid, chol, rs);
    Curve c(grid);
    for (std::size_t j = 0; j < design.m; ++j) {
      c.values[j] = y1[0].values[j] + dn * y2.values[j];
    }
    s2.push_back(std::move(c));
  }
  return {std::move(s1), std::move(s2)};
}

std::vector<Curve> gen_ou(std::size_t m, std::size_t count, std::uint64_t seed) {
  if (m < 2) throw InvalidArgument("gen_ou: m must be >= 2");
  if (count < 1) throw InvalidArgument("gen_ou: count must be >= 1");
  GridPtr grid = make_equidistant_grid(m);
  const std::vector<double> chol = ou_cholesky(*grid);
  rng::Stream rs(seed);
  std::vector<Curve> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(ou_draw(grid, chol, rs));
  return out;
}

std::pair<std::vector<Curve>, std::vector<Curve>> gen_design(const SimDesign& design) {
  switch (design.model) {
    case SimModel::model1: return gen_model1(design);
    case SimModel::model2: return gen_model2(design);
    case SimModel::null_bm: break;
  }
  design.validate();
  GridPtr grid = make_equidistant_grid(design.m);
  rng::Stream rs(design.seed);
  std::vector<Curve> s1;
  s1.reserve(design.n1);
  append_bm(s1, grid, design.n1, rs);
  std::vector<Curve> s2;
  s2.reserve(design.n2);
  append_bm(s2, grid, design.n2, rs);
  return {std::move(s1), std::move(s2)};
}

std::vector<Curve> contaminate(const std::vector<Curve>& sample, double epsilon,
                               std::uint64_t seed) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InvalidArgument("contaminate: epsilon must lie in [0, 1]");
  }
  rng::Stream rs(seed);
  std::vector<Curve> out = sample;
  for (auto& c : out) {
    if (rs.bernoulli(epsilon)) scale_inplace(rs.abs_cauchy(), c);
  }
  return out;
}

std::vector<Curve> gen_elliptical_t(std::size_t m, std::size_t count, double k,
                                    std::uint64_t seed) {
  if (!(k >= 1.0)) throw InvalidArgument("gen_elliptical_t: k must be >= 1");
  if (m < 2) throw InvalidArgument("gen_elliptical_t: m must be >= 2");
  if (count < 1) throw InvalidArgument("gen_elliptical_t: count must be >= 1");
  GridPtr grid = make_equidistant_grid(m);
  rng::Stream rs(seed);
  std::vector<Curve> out;
  out.reserve(count);
  std::vector<Curve> y;
  for (std::size_t i = 0; i < count; ++i) {
    y.clear();
    append_bm(y, grid, 1, rs);
    const double v = std::sqrt(k / rs.chi_square(k));
    scale_inplace(v, y[0]);
    out.push_back(std::move(y[0]));
  }
  return out;
}

}  // namespace fsign
