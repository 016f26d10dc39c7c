#pragma once

#include <cmath>
#include <cstdint>

#include "netlimits/core.hpp"

namespace netlimits {

// Splittable counter-based generator (SplitMix construction): the state walks
// an arithmetic progression with a per-stream odd increment and each output is
// a finalizing mix of the state. The raw u64 sequence for a given
// (master, stream) pair is bit-identical across platforms; derived doubles go
// through libm (log/cos in the Gaussian transform) and are deterministic for a
// given build.
//
// Stream discipline used throughout: one Rng per sampled object. Monte-Carlo
// trial t of an experiment uses stream-id t (or the sweep harness's
// h(cell, t), see sweep.hpp), never a re-used stream.
class Rng {
 public:
  explicit Rng(Seed seed)
      : state_(mix(seed.master + kGolden)), increment_(mix(seed.stream ^ 0xDA942042E4DD58B5ull) | 1ull) {}

  std::uint64_t next_u64() {
    state_ += increment_;
    return mix(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe to feed to log().
  double next_unit_positive() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // Consumes exactly one uniform regardless of p, so replacing a parameter
  // never shifts the rest of the stream.
  bool bernoulli(double p) { return next_unit() < p; }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit_positive();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * kPi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  std::uint64_t increment_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace netlimits
