#include "fsign/rng.hpp"

#include <cmath>

#include "fsign/errors.hpp"

namespace fsign::rng {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state += kGolden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t stream_id) {
  SplitMix64 sm{seed + (stream_id + 1) * kGolden};
  return sm.next();
}

Stream::Stream(std::uint64_t seed, std::uint64_t stream_id) {
  SplitMix64 sm{seed + (stream_id + 1) * kGolden};
  for (auto& word : s_) word = sm.next();
  // xoshiro state must not be all zero; splitmix output makes this
  // astronomically unlikely, but guard anyway.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = kGolden;
}

std::uint64_t Stream::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Stream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::uniform_pos() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Stream::normal() {
  const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
  const double theta = 2.0 * M_PI * uniform();
  return r * std::cos(theta);
}

void Stream::fill_normal(double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = normal();
}

double Stream::abs_cauchy() {
  return std::fabs(std::tan(M_PI * (uniform() - 0.5)));
}

bool Stream::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("bernoulli: p must lie in [0, 1]");
  return uniform() < p;
}

double Stream::gamma(double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("gamma: alpha must be positive");
  if (alpha < 1.0) {
    // Boost to alpha + 1 and scale back by U^{1/alpha}.
    const double u = uniform_pos();
    return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_pos();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Stream::chi_square(double k) {
  if (!(k > 0.0)) throw InvalidArgument("chi_square: degrees of freedom must be positive");
  return 2.0 * gamma(0.5 * k);
}

}  // namespace fsign::rng
