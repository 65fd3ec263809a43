#include "fsign/kernels.hpp"

// AVX2 backend. 4-lane double vectors; tails run the scalar ops. Entrywise
// kernels use separate mul/add (no FMA) so they stay bit-identical to the
// scalar reference. Compiled only on x86-64 with -mavx2 -ffp-contract=off.

#include <immintrin.h>

namespace fsign::kern {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double out = hsum(acc);
  for (; i < n; ++i) out += a[i] * b[i];
  return out;
}

double wdot_avx2(const double* w, const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), ab));
  }
  double out = hsum(acc);
  for (; i < n; ++i) out += w[i] * (a[i] * b[i]);
  return out;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yi = _mm256_loadu_pd(y + i);
    yi = _mm256_add_pd(yi, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, yi);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

void sub_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void rank1_avx2(double* K, const double* u, const double* v, std::size_t m) {
  for (std::size_t i = 0; i < m; ++i) {
    const __m256d ui = _mm256_set1_pd(u[i]);
    double* row = K + i * m;
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
      __m256d kj = _mm256_loadu_pd(row + j);
      kj = _mm256_add_pd(kj, _mm256_mul_pd(ui, _mm256_loadu_pd(v + j)));
      _mm256_storeu_pd(row + j, kj);
    }
    const double us = u[i];
    for (; j < m; ++j) row[j] += us * v[j];
  }
}

double wfrob_avx2(const double* w, const double* A, const double* B, std::size_t m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    acc += w[i] * wdot_avx2(w, A + i * m, B + i * m, m);
  }
  return acc;
}

void kernel_apply_avx2(const double* K, const double* w, const double* u, double* out,
                       std::size_t m) {
  for (std::size_t i = 0; i < m; ++i) out[i] = wdot_avx2(w, K + i * m, u, m);
}

}  // namespace

const Backend* avx2_backend_impl() {
  static const Backend backend{
      "avx2",     dot_avx2,   wdot_avx2,  axpy_avx2,
      scale_avx2, sub_avx2,   rank1_avx2, wfrob_avx2,
      kernel_apply_avx2,
  };
  return &backend;
}

}  // namespace fsign::kern
