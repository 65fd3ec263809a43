#include "fsign/kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace fsign::kern {

#if defined(FSIGN_HAVE_AVX2_TU)
const Backend* avx2_backend_impl();
#endif
#if defined(FSIGN_HAVE_NEON_TU)
const Backend* neon_backend_impl();
#endif

const Backend* avx2_backend() {
#if defined(FSIGN_HAVE_AVX2_TU)
  if (__builtin_cpu_supports("avx2")) return avx2_backend_impl();
#endif
  return nullptr;
}

const Backend* neon_backend() {
#if defined(FSIGN_HAVE_NEON_TU)
  return neon_backend_impl();
#endif
  return nullptr;
}

namespace {

const Backend* lookup(std::string_view name) {
  if (name == "scalar") return &scalar_backend();
  if (name == "avx2") return avx2_backend();
  if (name == "neon") return neon_backend();
  return nullptr;
}

const Backend* default_backend() {
  if (const char* env = std::getenv("FSIGN_BACKEND")) {
    if (const Backend* b = lookup(env)) return b;
  }
  if (const Backend* b = avx2_backend()) return b;
  if (const Backend* b = neon_backend()) return b;
  return &scalar_backend();
}

std::atomic<const Backend*>& active_slot() {
  static std::atomic<const Backend*> slot{default_backend()};
  return slot;
}

}  // namespace

const Backend& active() { return *active_slot().load(std::memory_order_relaxed); }

bool set_active(std::string_view name) {
  if (name == "auto") {
    active_slot().store(default_backend(), std::memory_order_relaxed);
    return true;
  }
  const Backend* b = lookup(name);
  if (!b) return false;
  active_slot().store(b, std::memory_order_relaxed);
  return true;
}

std::vector<std::string> available() {
  std::vector<std::string> names{"scalar"};
  if (avx2_backend()) names.emplace_back("avx2");
  if (neon_backend()) names.emplace_back("neon");
  return names;
}

ScopedBackend::ScopedBackend(std::string_view name) : prev_(&active()) { set_active(name); }

ScopedBackend::~ScopedBackend() { active_slot().store(prev_, std::memory_order_relaxed); }

}  // namespace fsign::kern
