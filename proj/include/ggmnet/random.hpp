#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace ggmnet::rng {

using Engine = std::mt19937_64;

/// splitmix64 step; used to derive independent stream seeds.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix(base ^ mix(stream));
}

/// Unbiased draw from {0, ..., n-1}. Hand-rolled so sequences do not
/// depend on the standard library's unspecified distribution algorithms.
inline std::uint64_t below(Engine& g, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = g();
  while (v >= limit) v = g();
  return v % n;
}

/// Uniform draw in [0, 1) with 53 random bits.
inline double uniform01(Engine& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Standard normal draws via Box-Muller; caches the paired deviate.
class NormalSampler {
 public:
  explicit NormalSampler(Engine& g) : g_(g) {}

  double operator()() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform01(g_);
    while (u1 <= 0.0) u1 = uniform01(g_);
    const double u2 = uniform01(g_);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(t);
    has_cached_ = true;
    return r * std::cos(t);
  }

 private:
  Engine& g_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Fisher-Yates shuffle driven by below(); deterministic given the engine state.
template <typename T>
void shuffle(std::vector<T>& v, Engine& g) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[below(g, i)]);
  }
}

}  // namespace ggmnet::rng
