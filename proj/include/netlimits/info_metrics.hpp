#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "netlimits/core.hpp"
#include "netlimits/enumeration.hpp"
#include "netlimits/model_spec.hpp"
#include "netlimits/moments.hpp"
#include "netlimits/rng.hpp"
#include "netlimits/thresholds.hpp"

namespace netlimits {

struct MIEstimate {
  double value;        // nats
  std::string method;  // "exact-enumeration" or "monte-carlo"
  double std_error;    // 0 for exact
};

namespace detail {

inline double log_sum_exp(const std::vector<double>& v) {
  double mx = -SequentialModel::kInf;
  for (double x : v) mx = std::max(mx, x);
  if (mx == -SequentialModel::kInf) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace detail

// Exact I(Y*; A) under the uniform label prior, by double enumeration over
// the 2^n labelings and the 2^E graphs. Latent models go through the
// edge-marginal surrogate (see SequentialModel).
inline MIEstimate mi_plugin(const ModelSpec& spec, std::size_t n, const PredecessorSet* tau = nullptr) {
  validate_spec(spec, n);
  const std::size_t edges = pair_count(n);
  if (edges > kMaxEnumerationEdges || n > 20 ||
      (static_cast<std::uint64_t>(1) << n) * (static_cast<std::uint64_t>(1) << edges) > (1ull << 26)) {
    throw TooLargeError("mi_plugin: enumeration over 2^" + std::to_string(n) + " labelings x 2^" +
                        std::to_string(edges) + " graphs is too large");
  }
  const std::size_t label_count = std::size_t{1} << n;
  const std::size_t mask_count = std::size_t{1} << edges;
  const double prior = 1.0 / static_cast<double>(label_count);
  const double log_prior = -std::log(static_cast<double>(label_count));

  std::vector<std::vector<double>> log_cond(label_count);
  std::vector<std::vector<double>> cond(label_count);
  for (std::size_t ly = 0; ly < label_count; ++ly) {
    auto dist = enumerate_distribution(spec, LabelVector::from_order_value(n, ly), tau);
    log_cond[ly] = std::move(dist.log_probs);
    cond[ly] = std::move(dist.probs);
  }

  std::vector<double> scratch(label_count);
  std::vector<double> log_marginal(mask_count);
  for (std::size_t mask = 0; mask < mask_count; ++mask) {
    for (std::size_t ly = 0; ly < label_count; ++ly) scratch[ly] = log_prior + log_cond[ly][mask];
    log_marginal[mask] = detail::log_sum_exp(scratch);
  }

  double mi = 0.0;
  for (std::size_t ly = 0; ly < label_count; ++ly) {
    for (std::size_t mask = 0; mask < mask_count; ++mask) {
      const double p = cond[ly][mask];
      if (p == 0.0) continue;
      mi += prior * p * (log_cond[ly][mask] - log_marginal[mask]);
    }
  }
  return {mi, "exact-enumeration", 0.0};
}

// Closed-form pairwise-KL upper bounds on I(Y*; A):
//   SBM/ERGM:  n^2/4 * KL(p || q)
//   LSM:       n^2 * (4 sigma^2 + 1)^{-1-d/2} ||mu||^2
//   DSBM:      C(n,2) * (p-q)^2 / (q(1-q))
//   DLSM:      C(n,2) * 4 (4 sigma^2 + 1)^{-1-d/2} ||mu||^2
// The directed models have no closed-form bound of this shape.
inline double mi_pairwise_upper(const ModelSpec& spec, std::size_t n) {
  validate_spec(spec, n);
  const double nn = static_cast<double>(n);
  const double choose2 = nn * (nn - 1.0) / 2.0;
  switch (spec.kind()) {
    case ModelKind::Sbm: {
      const auto& p = spec.get<SbmParams>();
      return nn * nn / 4.0 * kl_bernoulli(p.p, p.q);
    }
    case ModelKind::Ergm: {
      const auto probs = ergm_edge_probs(spec.get<ErgmParams>().beta);
      return nn * nn / 4.0 * kl_bernoulli(probs.first, probs.second);
    }
    case ModelKind::Lsm: {
      const auto& p = spec.get<LsmParams>();
      return nn * nn * std::pow(4.0 * p.sigma * p.sigma + 1.0, -1.0 - 0.5 * static_cast<double>(p.d)) *
             p.mu_norm_sq();
    }
    case ModelKind::Dsbm: {
      const auto& p = spec.get<DsbmParams>();
      return choose2 * chi2_bound(p.p, p.q);
    }
    case ModelKind::Dlsm: {
      const auto& p = spec.get<DlsmParams>();
      return choose2 * 4.0 *
             std::pow(4.0 * p.sigma * p.sigma + 1.0, -1.0 - 0.5 * static_cast<double>(p.d)) *
             p.mu_norm_sq();
    }
    case ModelKind::Dpam:
    case ModelKind::Dswm:
      throw UnsupportedSpecError("mi_pairwise_upper: no closed-form bound for directed models");
  }
  throw UnsupportedSpecError("unknown model kind");
}

// Fano lower bound on the exact-recovery error of any estimator:
// max(0, min(1, 1 - (I + ln 2) / (n ln 2))).
inline double fano_lower_bound(double mutual_information, std::size_t n) {
  if (!(mutual_information >= 0.0)) throw RangeError("fano_lower_bound: I >= 0 required");
  if (n < 2) throw RangeError("fano_lower_bound: n >= 2 required");
  const double bound =
      1.0 - (mutual_information + detail::kLn2) / (static_cast<double>(n) * detail::kLn2);
  return std::clamp(bound, 0.0, 1.0);
}

// Nested Monte-Carlo estimate of the exact (non-surrogate) LSM mutual
// information at small n: sample latent matrices, average the conditional
// graph distributions, then plug in. Block means give the standard error.
inline MIEstimate mi_lsm_nested_mc(const ModelSpec& spec, std::size_t n, std::size_t latent_draws,
                                   std::size_t blocks, Seed seed) {
  if (spec.kind() != ModelKind::Lsm) throw UnsupportedSpecError("mi_lsm_nested_mc: LSM spec required");
  validate_spec(spec, n);
  const std::size_t edges = pair_count(n);
  if (edges > 10) throw TooLargeError("mi_lsm_nested_mc: n too large");
  if (blocks < 2 || latent_draws < blocks) throw RangeError("mi_lsm_nested_mc: need >= 2 blocks");
  const auto& par = spec.get<LsmParams>();
  const std::size_t label_count = std::size_t{1} << n;
  const std::size_t mask_count = std::size_t{1} << edges;
  const auto pairs = generation_pairs(n, false);
  const double prior = 1.0 / static_cast<double>(label_count);

  std::vector<double> block_mi(blocks);
  const std::size_t per_block = latent_draws / blocks;
  for (std::size_t b = 0; b < blocks; ++b) {
    Rng rng(Seed{seed.master, seed.stream + b});
    // cond[ly][mask] = E_Z[P(mask | Z, y)] estimated over this block
    std::vector<std::vector<double>> cond(label_count, std::vector<double>(mask_count, 0.0));
    for (std::size_t draw = 0; draw < per_block; ++draw) {
      // One standard-normal matrix reused for every labeling (common random
      // numbers): z_i = y_i*mu + sigma*g_i.
      std::vector<double> gauss(n * par.d);
      for (auto& g : gauss) g = rng.next_normal();
      for (std::size_t ly = 0; ly < label_count; ++ly) {
        const LabelVector y = LabelVector::from_order_value(n, ly);
        std::vector<double> edge_p(edges);
        for (std::size_t e = 0; e < edges; ++e) {
          const auto [i, j] = pairs[e];
          double dist_sq = 0.0;
          for (std::size_t k = 0; k < par.d; ++k) {
            const double zi = static_cast<double>(y[i]) * par.mu[k] + par.sigma * gauss[i * par.d + k];
            const double zj = static_cast<double>(y[j]) * par.mu[k] + par.sigma * gauss[j * par.d + k];
            const double diff = zi - zj;
            dist_sq += diff * diff;
          }
          edge_p[e] = std::exp(-dist_sq);
        }
        for (std::size_t mask = 0; mask < mask_count; ++mask) {
          double pr = 1.0;
          for (std::size_t e = 0; e < edges; ++e) {
            pr *= (mask >> e) & 1u ? edge_p[e] : 1.0 - edge_p[e];
          }
          cond[ly][mask] += pr;
        }
      }
    }
    for (auto& row : cond)
      for (auto& v : row) v /= static_cast<double>(per_block);

    double mi = 0.0;
    for (std::size_t mask = 0; mask < mask_count; ++mask) {
      double marginal = 0.0;
      for (std::size_t ly = 0; ly < label_count; ++ly) marginal += prior * cond[ly][mask];
      for (std::size_t ly = 0; ly < label_count; ++ly) {
        const double p = cond[ly][mask];
        if (p > 0.0) mi += prior * p * std::log(p / marginal);
      }
    }
    block_mi[b] = mi;
  }

  double mean = 0.0;
  for (double v : block_mi) mean += v;
  mean /= static_cast<double>(blocks);
  double var = 0.0;
  for (double v : block_mi) var += (v - mean) * (v - mean);
  var /= static_cast<double>(blocks - 1);
  return {mean, "monte-carlo", std::sqrt(var / static_cast<double>(blocks))};
}

}  // namespace netlimits
