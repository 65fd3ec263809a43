#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Low-level array kernels behind all inner loops: weighted dots, rank-1
// accumulation, weighted Frobenius sums, kernel application and entrywise
// vector arithmetic. A scalar reference backend always exists; SIMD
// backends (AVX2 on x86-64, NEON on aarch64) are selected at runtime and
// equivalence-tested against the reference.
//
// Contract notes:
//  - Entrywise kernels (axpy, scale, add/sub, rank1_accum) perform exactly
//    one multiply and one add per element in the same order as the scalar
//    reference, so their results are bit-identical across backends.
//  - Reduction kernels (dot, wdot, wfrob) may reassociate the sum; backends
//    agree with the scalar reference to relative 1e-13 on sane data.

namespace fsign::kern {

struct Backend {
  const char* name;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i w[i] * a[i] * b[i]
  double (*wdot)(const double* w, const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x[i] *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  // out[i] = a[i] - b[i]
  void (*sub)(const double* a, const double* b, double* out, std::size_t n);
  // K[i*m + j] += u[i] * v[j]   (row-major m x m)
  void (*rank1_accum)(double* K, const double* u, const double* v, std::size_t m);
  // sum_{i,j} w[i] * w[j] * A[i*m+j] * B[i*m+j]
  double (*wfrob)(const double* w, const double* A, const double* B, std::size_t m);
  // out[i] = sum_j w[j] * K[i*m+j] * u[j]
  void (*kernel_apply)(const double* K, const double* w, const double* u, double* out,
                       std::size_t m);
};

const Backend& scalar_backend();
const Backend* avx2_backend();  // nullptr when not compiled in or CPU lacks AVX2
const Backend* neon_backend();  // nullptr when not compiled in

// Currently active backend. Defaults to the best available one; the
// FSIGN_BACKEND environment variable ("scalar", "avx2", "neon") overrides
// the default at process start.
const Backend& active();

// Force a backend by name; returns false (and leaves the active backend
// unchanged) when the request cannot be honored.
bool set_active(std::string_view name);

std::vector<std::string> available();

// RAII backend override for tests.
struct ScopedBackend {
  explicit ScopedBackend(std::string_view name);
  ~ScopedBackend();
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;

 private:
  const Backend* prev_;
};

}  // namespace fsign::kern
