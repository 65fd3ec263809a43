#include "fsign/hilbert.hpp"

#include <cmath>
#include <utility>

#include "fsign/kernels.hpp"

namespace fsign {

GridPtr make_equidistant_grid(std::size_t m) {
  if (m < 2) throw InvalidArgument("make_equidistant_grid: need m >= 2");
  auto grid = std::make_shared<Grid>();
  grid->points.resize(m);
  grid->weights.assign(m, 1.0 / static_cast<double>(m));
  for (std::size_t j = 0; j < m; ++j) {
    grid->points[j] = static_cast<double>(j + 1) / static_cast<double>(m);
  }
  return grid;
}

Curve::Curve(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw InvalidArgument("Curve: null grid");
  if (values.size() != grid->size()) {
    throw InvalidArgument("Curve: values length does not match grid size");
  }
}

Curve::Curve(GridPtr g) : grid(std::move(g)) {
  if (!grid) throw InvalidArgument("Curve: null grid");
  values.assign(grid->size(), 0.0);
}

HSOperator::HSOperator(GridPtr g) : grid(std::move(g)) {
  if (!grid) throw InvalidArgument("HSOperator: null grid");
  kernel.assign(grid->size() * grid->size(), 0.0);
}

HSOperator::HSOperator(GridPtr g, std::vector<double> k) : grid(std::move(g)), kernel(std::move(k)) {
  if (!grid) throw InvalidArgument("HSOperator: null grid");
  if (kernel.size() != grid->size() * grid->size()) {
    throw InvalidArgument("HSOperator: kernel is not m x m for the grid");
  }
}

void require_same_grid(const GridPtr& a, const GridPtr& b) {
  if (a == b) return;
  if (a && b && a->points == b->points && a->weights == b->weights) return;
  throw IncompatibleGrids("operands live on different grids");
}

double inner(const Curve& u, const Curve& v) {
  require_same_grid(u.grid, v.grid);
  return kern::active().wdot(u.grid->weights.data(), u.values.data(), v.values.data(), u.size());
}

double norm(const Curve& u) { return std::sqrt(inner(u, u)); }

Curve sign(const Curve& u, double eps0) {
  if (eps0 < 0.0) throw InvalidArgument("sign: eps0 must be non-negative");
  const double nrm = norm(u);
  if (!(nrm > eps0)) return Curve(u.grid);
  Curve out = u;
  kern::active().scale(1.0 / nrm, out.values.data(), out.size());
  return out;
}

Curve add(const Curve& u, const Curve& v) {
  require_same_grid(u.grid, v.grid);
  Curve out = u;
  kern::active().axpy(1.0, v.values.data(), out.values.data(), out.size());
  return out;
}

Curve sub(const Curve& u, const Curve& v) {
  require_same_grid(u.grid, v.grid);
  Curve out(u.grid);
  kern::active().sub(u.values.data(), v.values.data(), out.values.data(), out.size());
  return out;
}

Curve scale(const Curve& u, double alpha) {
  Curve out = u;
  kern::active().scale(alpha, out.values.data(), out.size());
  return out;
}

void scale_inplace(double alpha, Curve& u) {
  kern::active().scale(alpha, u.values.data(), u.size());
}

void axpy_inplace(double alpha, const Curve& x, Curve& y) {
  require_same_grid(x.grid, y.grid);
  kern::active().axpy(alpha, x.values.data(), y.values.data(), y.size());
}

HSOperator tensor(const Curve& u, const Curve& v) {
  require_same_grid(u.grid, v.grid);
  HSOperator out(u.grid);
  kern::active().rank1_accum(out.kernel.data(), u.values.data(), v.values.data(), u.size());
  return out;
}

double hs_inner(const HSOperator& A, const HSOperator& B) {
  require_same_grid(A.grid, B.grid);
  return kern::active().wfrob(A.grid->weights.data(), A.kernel.data(), B.kernel.data(), A.dim());
}

double hs_norm(const HSOperator& A) { return std::sqrt(hs_inner(A, A)); }

Curve apply(const HSOperator& A, const Curve& u) {
  require_same_grid(A.grid, u.grid);
  Curve out(u.grid);
  kern::active().kernel_apply(A.kernel.data(), A.grid->weights.data(), u.values.data(),
                              out.values.data(), A.dim());
  return out;
}

HSOperator add(const HSOperator& A, const HSOperator& B) {
  require_same_grid(A.grid, B.grid);
  HSOperator out = A;
  kern::active().axpy(1.0, B.kernel.data(), out.kernel.data(), out.kernel.size());
  return out;
}

HSOperator sub(const HSOperator& A, const HSOperator& B) {
  require_same_grid(A.grid, B.grid);
  HSOperator out(A.grid);
  kern::active().sub(A.kernel.data(), B.kernel.data(), out.kernel.data(), out.kernel.size());
  return out;
}

HSOperator scale(const HSOperator& A, double alpha) {
  HSOperator out = A;
  kern::active().scale(alpha, out.kernel.data(), out.kernel.size());
  return out;
}

void scale_inplace(double alpha, HSOperator& A) {
  kern::active().scale(alpha, A.kernel.data(), A.kernel.size());
}

void axpy_inplace(double alpha, const HSOperator& A, HSOperator& B) {
  require_same_grid(A.grid, B.grid);
  kern::active().axpy(alpha, A.kernel.data(), B.kernel.data(), B.kernel.size());
}

double trace(const HSOperator& A) {
  const std::size_t m = A.dim();
  const auto& w = A.grid->weights;
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) acc += w[j] * A.kernel[j * m + j];
  return acc;
}

double symmetry_defect(const HSOperator& A) {
  const std::size_t m = A.dim();
  double max_abs = 0.0;
  double max_gap = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      max_gap = std::max(max_gap, std::fabs(A.kernel[i * m + j] - A.kernel[j * m + i]));
    }
    for (std::size_t j = 0; j < m; ++j) {
      max_abs = std::max(max_abs, std::fabs(A.kernel[i * m + j]));
    }
  }
  return max_gap / std::max(1.0, max_abs);
}

}  // namespace fsign
