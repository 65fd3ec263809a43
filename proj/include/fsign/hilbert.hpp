#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "fsign/errors.hpp"

// Discretized Hilbert-space arithmetic. Functions on [0,1] are represented
// by their values on a quadrature grid; all inner products, norms and
// operator traces are taken with respect to the grid weights, so the
// operator algebra is exact for the chosen quadrature rule.

namespace fsign {

/// Design points and quadrature weights shared by every curve and operator
/// in one computation.
struct Grid {
  std::vector<double> points;   // strictly increasing, in (0, 1]
  std::vector<double> weights;  // positive

  std::size_t size() const { return points.size(); }
};

using GridPtr = std::shared_ptr<const Grid>;

/// Right-endpoint rectangle rule: points t_j = j/m, weights 1/m, j = 1..m.
/// Throws InvalidArgument for m < 2.
GridPtr make_equidistant_grid(std::size_t m);

/// One functional observation sampled on a grid.
struct Curve {
  GridPtr grid;
  std::vector<double> values;

  Curve() = default;
  Curve(GridPtr g, std::vector<double> v);
  /// Zero curve on g.
  explicit Curve(GridPtr g);

  std::size_t size() const { return values.size(); }
};

/// A Hilbert-Schmidt operator represented by its kernel matrix K; the
/// operator acts as (Au)(t_i) = sum_j w_j K(i,j) u(t_j).
struct HSOperator {
  GridPtr grid;
  std::vector<double> kernel;  // row-major m x m

  HSOperator() = default;
  /// Zero operator on g.
  explicit HSOperator(GridPtr g);
  HSOperator(GridPtr g, std::vector<double> k);

  std::size_t dim() const { return grid ? grid->size() : 0; }
  double at(std::size_t i, std::size_t j) const { return kernel[i * dim() + j]; }
  double& at(std::size_t i, std::size_t j) { return kernel[i * dim() + j]; }
};

/// Throws IncompatibleGrids unless a and b refer to the same grid (same
/// object, or identical points and weights).
void require_same_grid(const GridPtr& a, const GridPtr& b);

// --- curve arithmetic -------------------------------------------------------

double inner(const Curve& u, const Curve& v);
double norm(const Curve& u);

/// u / ||u|| when ||u|| > eps0, the zero curve otherwise.
Curve sign(const Curve& u, double eps0 = 1e-12);

Curve add(const Curve& u, const Curve& v);
Curve sub(const Curve& u, const Curve& v);
Curve scale(const Curve& u, double alpha);
void scale_inplace(double alpha, Curve& u);
/// y += alpha * x, in place.
void axpy_inplace(double alpha, const Curve& x, Curve& y);

// --- operator algebra -------------------------------------------------------

/// Rank-1 operator u (x) v: w -> <v, w> u. Kernel K(i,j) = u_i v_j.
HSOperator tensor(const Curve& u, const Curve& v);

/// Trace inner product, realized as sum_{i,j} w_i w_j K_A(i,j) K_B(i,j).
double hs_inner(const HSOperator& A, const HSOperator& B);
double hs_norm(const HSOperator& A);

Curve apply(const HSOperator& A, const Curve& u);

HSOperator add(const HSOperator& A, const HSOperator& B);
HSOperator sub(const HSOperator& A, const HSOperator& B);
HSOperator scale(const HSOperator& A, double alpha);
void scale_inplace(double alpha, HSOperator& A);
/// B += alpha * A, in place.
void axpy_inplace(double alpha, const HSOperator& A, HSOperator& B);

/// sum_j w_j K(j,j).
double trace(const HSOperator& A);

/// Largest absolute kernel asymmetry relative to max(1, max |K|).
double symmetry_defect(const HSOperator& A);

}  // namespace fsign
