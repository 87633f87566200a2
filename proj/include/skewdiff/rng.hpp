#pragma once

#include <cmath>
#include <cstdint>

namespace skewdiff {

// Counter-based generator: every (seed, stream, axis) triple yields an
// independent reproducible stream, so per-path draws do not depend on thread
// scheduling. Output function is the splitmix64 finalizer applied to a
// Weyl-sequenced counter.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream, uint64_t axis = 0) {
    key_ = mix(seed ^ mix(stream ^ mix(axis ^ 0x6a09e667f3bcc909ULL)));
  }

  uint64_t next_u64() {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return mix(key_ ^ counter_);
  }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second draw of each pair is cached.
  double gaussian() {
    if (have_cache_) {
      have_cache_ = false;
      return cache_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925287 * u2;
    cache_ = r * std::sin(a);
    have_cache_ = true;
    return r * std::cos(a);
  }

 private:
  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t key_ = 0;
  uint64_t counter_ = 0;
  double cache_ = 0.0;
  bool have_cache_ = false;
};

}  // namespace skewdiff
