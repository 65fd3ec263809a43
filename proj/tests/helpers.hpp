#pragma once

#include <cmath>
#include <vector>

#include "fsign/hilbert.hpp"
#include "fsign/rng.hpp"

namespace th {

inline fsign::Curve curve(const fsign::GridPtr& g, std::initializer_list<double> v) {
  return fsign::Curve(g, std::vector<double>(v));
}

inline fsign::Curve random_curve(const fsign::GridPtr& g, fsign::rng::Stream& rs) {
  fsign::Curve c(g);
  for (auto& x : c.values) x = rs.normal();
  return c;
}

inline std::vector<fsign::Curve> random_sample(const fsign::GridPtr& g,
                                               std::size_t n,
                                               fsign::rng::Stream& rs) {
  std::vector<fsign::Curve> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_curve(g, rs));
  return out;
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

// Basic sample statistics used by the moment-check tests.
inline double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

inline double var_of(const std::vector<double>& v) {
  const double mu = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mu) * (x - mu);
  return acc / static_cast<double>(v.size() - 1);
}

}  // namespace th
