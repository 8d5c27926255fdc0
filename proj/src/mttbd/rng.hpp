#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

#include <Eigen/Core>

namespace mttbd {

// splitmix64 finalizer; full-period mixing of a 64-bit word
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t combine64(std::uint64_t key, std::uint64_t tag) {
  return mix64(key ^ (mix64(tag) + 0x9E3779B97F4A7C15ull + (key << 6) + (key >> 2)));
}

// Counter-based random stream. A stream is identified by a 64-bit key derived
// from a run seed and a tag tuple, so any unit of work (particle, target
// model, time step) can own an independent stream that does not depend on
// evaluation order. Streams are cheap to create and copy (16 bytes of state).
//
// Draw conventions relied on by reproducibility tests:
//   - uniform01() consumes one counter step and returns a double in [0, 1).
//   - normal() uses Box-Muller on two uniforms and caches the second variate;
//     consecutive calls consume 2, 0, 2, 0, ... counter steps.
class RngStream {
 public:
  RngStream() = default;
  explicit RngStream(std::uint64_t key) : state_(key) {}

  static RngStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t key = mix64(seed);
    for (std::uint64_t t : tags) key = combine64(key, t);
    return RngStream(key);
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Child stream keyed off the next counter value; advances this stream.
  RngStream split(std::uint64_t tag) { return RngStream(combine64(next_u64(), tag)); }

  // [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  Eigen::VectorXd normals(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

 private:
  std::uint64_t state_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace mttbd
