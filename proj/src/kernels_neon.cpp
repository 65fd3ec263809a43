#include "fsign/kernels.hpp"

// NEON backend (aarch64). 2-lane double vectors, scalar tails. Entrywise
// kernels use separate mul/add so they match the scalar reference bit for
// bit. Compiled only on aarch64, where NEON is baseline.

#include <arm_neon.h>

namespace fsign::kern {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  }
  double out = vaddvq_f64(acc);
  for (; i < n; ++i) out += a[i] * b[i];
  return out;
}

double wdot_neon(const double* w, const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t ab = vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(w + i), ab));
  }
  double out = vaddvq_f64(acc);
  for (; i < n; ++i) out += w[i] * (a[i] * b[i]);
  return out;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t yi = vld1q_f64(y + i);
    yi = vaddq_f64(yi, vmulq_f64(va, vld1q_f64(x + i)));
    vst1q_f64(y + i, yi);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_neon(double alpha, double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

void sub_neon(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void rank1_neon(double* K, const double* u, const double* v, std::size_t m) {
  for (std::size_t i = 0; i < m; ++i) {
    const float64x2_t ui = vdupq_n_f64(u[i]);
    double* row = K + i * m;
    std::size_t j = 0;
    for (; j + 2 <= m; j += 2) {
      float64x2_t kj = vld1q_f64(row + j);
      kj = vaddq_f64(kj, vmulq_f64(ui, vld1q_f64(v + j)));
      vst1q_f64(row + j, kj);
    }
    const double us = u[i];
    for (; j < m; ++j) row[j] += us * v[j];
  }
}

double wfrob_neon(const double* w, const double* A, const double* B, std::size_t m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    acc += w[i] * wdot_neon(w, A + i * m, B + i * m, m);
  }
  return acc;
}

void kernel_apply_neon(const double* K, const double* w, const double* u, double* out,
                       std::size_t m) {
  for (std::size_t i = 0; i < m; ++i) out[i] = wdot_neon(w, K + i * m, u, m);
}

}  // namespace

const Backend* neon_backend_impl() {
  static const Backend backend{
      "neon",     dot_neon,   wdot_neon,  axpy_neon,
      scale_neon, sub_neon,   rank1_neon, wfrob_neon,
      kernel_apply_neon,
  };
  return &backend;
}

}  // namespace fsign::kern
