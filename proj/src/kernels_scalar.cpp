#include "fsign/kernels.hpp"

// Reference backend. Plain loops, no reassociation; every other backend is
// tested against this one.

namespace fsign::kern {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double wdot_scalar(const double* w, const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * (a[i] * b[i]);
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void sub_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void rank1_scalar(double* K, const double* u, const double* v, std::size_t m) {
  for (std::size_t i = 0; i < m; ++i) {
    const double ui = u[i];
    double* row = K + i * m;
    for (std::size_t j = 0; j < m; ++j) row[j] += ui * v[j];
  }
}

double wfrob_scalar(const double* w, const double* A, const double* B, std::size_t m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double* ra = A + i * m;
    const double* rb = B + i * m;
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j) row += w[j] * (ra[j] * rb[j]);
    acc += w[i] * row;
  }
  return acc;
}

void kernel_apply_scalar(const double* K, const double* w, const double* u, double* out,
                         std::size_t m) {
  for (std::size_t i = 0; i < m; ++i) out[i] = wdot_scalar(w, K + i * m, u, m);
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend backend{
      "scalar",     dot_scalar,   wdot_scalar,  axpy_scalar,
      scale_scalar, sub_scalar,   rank1_scalar, wfrob_scalar,
      kernel_apply_scalar,
  };
  return backend;
}

}  // namespace fsign::kern
