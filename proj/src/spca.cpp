#include "fsign/spca.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "fsign/errors.hpp"
#include "fsign/rng.hpp"

namespace fsign {

EigenSystem eigendecompose(const HSOperator& A, std::size_t k) {
  const std::size_t m = A.dim();
  if (k < 1 || k > m) {
    throw InvalidArgument("eigendecompose: k must lie in [1, m]");
  }
  if (symmetry_defect(A) > 1e-8) {
    throw NotSelfAdjoint("eigendecompose: kernel asymmetry exceeds 1e-8");
  }

  const auto& w = A.grid->weights;
  Eigen::MatrixXd B(m, m);
  std::vector<double> sqw(m);
  for (std::size_t i = 0; i < m; ++i) sqw[i] = std::sqrt(w[i]);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      // Symmetrize: the defect below 1e-8 is roundoff, not structure.
      double kij = 0.5 * (A.at(i, j) + A.at(j, i));
      B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          sqw[i] * kij * sqw[j];
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("eigendecompose: eigensolver did not converge");
  }

  EigenSystem out;
  out.op_trace = trace(A);
  out.values.reserve(k);
  out.functions.reserve(k);
  // Eigen orders ascending; emit the top k in non-increasing order.
  for (std::size_t r = 0; r < k; ++r) {
    Eigen::Index col = static_cast<Eigen::Index>(m - 1 - r);
    out.values.push_back(solver.eigenvalues()(col));
    Curve phi(A.grid);
    double maxabs = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      phi.values[i] = solver.eigenvectors()(static_cast<Eigen::Index>(i), col) / sqw[i];
      maxabs = std::max(maxabs, std::abs(phi.values[i]));
    }
    // Fixed sign convention: first coordinate of nontrivial size positive.
    for (std::size_t i = 0; i < m; ++i) {
      if (std::abs(phi.values[i]) > 1e-12 * maxabs) {
        if (phi.values[i] < 0.0) scale_inplace(-1.0, phi);
        break;
      }
    }
    out.functions.push_back(std::move(phi));
  }
  return out;
}

Curve align_sign(const Curve& est, const Curve& reference) {
  double ip = inner(est, reference);
  if (std::abs(ip) <= 1e-12) {
    throw AmbiguousAlignment("align_sign: estimate nearly orthogonal to reference");
  }
  return ip > 0.0 ? est : scale(est, -1.0);
}

HSOperator eigenprojection(const EigenSystem& system,
                           const std::vector<std::size_t>& indices) {
  if (system.functions.empty()) {
    throw InvalidArgument("eigenprojection: empty system");
  }
  HSOperator out(system.functions.front().grid);
  for (std::size_t idx : indices) {
    if (idx < 1 || idx > system.functions.size()) {
      throw InvalidArgument("eigenprojection: index out of range");
    }
    axpy_inplace(1.0, tensor(system.functions[idx - 1], system.functions[idx - 1]),
                 out);
  }
  return out;
}

HSOperator resolvent_delta(const EigenSystem& system, std::size_t i,
                           std::size_t k) {
  const std::size_t retained = system.values.size();
  if (i < 1 || i > retained || k < 1 || k > retained) {
    throw InvalidArgument("resolvent_delta: index out of range");
  }
  const double li = system.values[i - 1];
  HSOperator out(system.functions.front().grid);
  for (std::size_t l = 1; l <= k; ++l) {
    if (l == i) continue;
    double gap = li - system.values[l - 1];
    if (std::abs(gap) <= 1e-10 * std::max(1.0, std::abs(li))) {
      throw DegenerateEigenvalue("resolvent_delta: eigenvalue gap below threshold");
    }
    axpy_inplace(1.0 / gap, tensor(system.functions[l - 1], system.functions[l - 1]),
                 out);
  }
  return out;
}

std::vector<double> shrinkage_factor_mc(const std::vector<double>& eigenvalues,
                                        std::size_t reps, std::uint64_t seed) {
  if (eigenvalues.empty()) throw InvalidArgument("shrinkage: empty spectrum");
  if (reps < 1) throw InvalidArgument("shrinkage: reps must be >= 1");
  double total = 0.0;
  for (double l : eigenvalues) {
    if (l < 0.0) throw InvalidArgument("shrinkage: negative eigenvalue");
    total += l;
  }
  if (total <= 0.0) throw InvalidArgument("shrinkage: all eigenvalues zero");

  const std::size_t p = eigenvalues.size();
  rng::Stream rs(seed);
  std::vector<double> acc(p, 0.0);
  std::vector<double> term(p);
  std::size_t done = 0;
  while (done < reps) {
    double denom = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      double xi = rs.normal();
      term[j] = eigenvalues[j] * xi * xi;
      denom += term[j];
    }
    if (denom <= 0.0) continue;  // measure-zero draw, retry
    for (std::size_t j = 0; j < p; ++j) acc[j] += term[j] / denom;
    ++done;
  }
  for (std::size_t j = 0; j < p; ++j) acc[j] /= static_cast<double>(reps);
  return acc;
}

}  // namespace fsign
