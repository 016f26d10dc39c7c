#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "netlimits/core.hpp"

namespace netlimits {

// Point in the k-simplex, optionally with a per-entry cap of 1/m.
struct WeightVector {
  std::vector<double> w;
  std::optional<double> cap;

  void validate() const {
    double sum = 0.0;
    for (double v : w) {
      if (v < 0.0) throw RangeError("WeightVector: negative entry");
      if (cap && v > *cap + 1e-12) throw RangeError("WeightVector: entry exceeds cap");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw RangeError("WeightVector: entries do not sum to 1");
  }
};

// Caps each entry of a simplex vector at 1/m, redistributing the excess of
// every over-cap entry evenly across the entries still below the cap. A
// receiver that would be pushed past the cap is clipped there and the residue
// carried to the remaining below-cap entries within the same pass; the outer
// scan repeats until no entry exceeds the cap. The fixed point solves
// minimize 1/2 * sum_i (out_i - w_i)^2 over the capped simplex, so
// min_i out_i >= min_i w_i and max_i out_i <= max_i w_i.
inline void cap_values(std::vector<double>& w, std::size_t m) {
  const std::size_t k = w.size();
  if (m > k) throw InfeasibleError("cap_simplex: m > k, cannot cap " + std::to_string(k) +
                                   " entries at 1/" + std::to_string(m) + " summing to 1");
  if (m == 0) throw RangeError("cap_simplex: m >= 1 required");
  const double cap = 1.0 / static_cast<double>(m);

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < k; ++i) {
      if (w[i] <= cap) continue;
      changed = true;
      double excess = w[i] - cap;
      w[i] = cap;
      // Clip-and-carry even redistribution of `excess`.
      while (excess > 1e-18) {
        std::size_t below = 0;
        for (std::size_t j = 0; j < k; ++j) {
          if (w[j] < cap) ++below;
        }
        if (below == 0) break;  // numerically exhausted headroom
        const double share = excess / static_cast<double>(below);
        double undelivered = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          if (w[j] >= cap) continue;
          const double room = cap - w[j];
          if (share <= room) {
            w[j] += share;
          } else {
            w[j] = cap;
            undelivered += share - room;
          }
        }
        if (undelivered >= excess) break;  // no forward progress at double precision
        excess = undelivered;
      }
    }
  }
  // Entries that saturate land within an ulp of the cap; snap them so that
  // saturation is detectable by exact comparison (m * cap links become
  // deterministic, as the construction demands).
  for (auto& v : w) {
    if (std::abs(v - cap) <= 1e-12) v = cap;
  }
}

// Link probability m * w for a capped weight; exactly 1 at saturation.
inline double capped_link_probability(double w_entry, std::size_t m) {
  const double cap = 1.0 / static_cast<double>(m);
  if (w_entry == cap) return 1.0;
  return std::min(1.0, w_entry * static_cast<double>(m));
}

inline WeightVector cap_simplex(const WeightVector& input, std::size_t m) {
  if (input.cap) throw RangeError("cap_simplex: input must be uncapped");
  input.validate();
  WeightVector out{input.w, 1.0 / static_cast<double>(m == 0 ? 1 : m)};
  cap_values(out.w, m);
  return out;
}

}  // namespace netlimits
