#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "netlimits/core.hpp"
#include "netlimits/model_spec.hpp"
#include "netlimits/rng.hpp"

namespace netlimits {

// Marginal edge probability of the latent space model, integrating out the
// pair of latent vectors:
//   same-label pair:  (4*sigma^2 + 1)^{-d/2}
//   cross-label pair: (4*sigma^2 + 1)^{-d/2} * exp(-4*||mu||^2 / (4*sigma^2 + 1))
inline double lsm_edge_moment(std::size_t d, const std::vector<double>& mu, double sigma, bool same_label) {
  detail::check_lsm(d, mu, sigma);
  const double a = 4.0 * sigma * sigma + 1.0;
  const double base = std::pow(a, -0.5 * static_cast<double>(d));
  if (same_label) return base;
  double mu_sq = 0.0;
  for (double v : mu) mu_sq += v * v;
  return base * std::exp(-4.0 * mu_sq / a);
}

struct MomentEstimate {
  double estimate;
  double std_error;
};

// Monte-Carlo estimate of E[exp(-||x_i - x_j (+ 2*mu)||^2)] with
// x_i, x_j ~ N(0, sigma^2 I) drawn independently; validates lsm_edge_moment.
inline MomentEstimate mc_moment_check(std::size_t d, const std::vector<double>& mu, double sigma,
                                      bool same_label, std::size_t samples, Seed seed) {
  detail::check_lsm(d, mu, sigma);
  if (samples < 10000) throw RangeError("mc_moment_check: samples >= 10^4 required");
  Rng rng(seed);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t t = 0; t < samples; ++t) {
    double dist_sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double xi = sigma * rng.next_normal();
      const double xj = sigma * rng.next_normal();
      double diff = xi - xj;
      if (!same_label) diff += 2.0 * mu[k];
      dist_sq += diff * diff;
    }
    const double v = std::exp(-dist_sq);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / static_cast<double>(samples);
  const double var = (sum_sq - sum * mean) / static_cast<double>(samples - 1);
  const double se = std::sqrt(var / static_cast<double>(samples));
  return {mean, se};
}

}  // namespace netlimits
