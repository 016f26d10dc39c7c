#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netlimits/core.hpp"
#include "netlimits/enumeration.hpp"
#include "netlimits/model_spec.hpp"
#include "netlimits/moments.hpp"
#include "netlimits/rng.hpp"

namespace netlimits {

// How latent-model likelihoods are evaluated. Every other model is exact.
enum class LsmLikelihoodMode {
  surrogate,    // independent-edge approximation from the closed-form marginals
  mc_marginal,  // Monte-Carlo marginal over latent draws, log-mean-exp aggregated
};

struct LikelihoodOptions {
  LsmLikelihoodMode lsm_mode = LsmLikelihoodMode::surrogate;
  std::size_t mc_latent_draws = 512;
  Seed mc_seed{};
  const PredecessorSet* tau = nullptr;
};

struct RecoveryResult {
  LabelVector y_hat;
  double log_posterior;
  std::uint64_t ties;  // count of co-maximal labelings; >= 2 under flip symmetry
  std::string mode;    // likelihood provenance: "exact", "lsm-surrogate", "lsm-mc(L)"
};

namespace detail {

inline std::vector<std::uint8_t> graph_bits(const Graph& g) {
  g.validate();
  const auto pairs = generation_pairs(g.node_count(), g.directed());
  std::vector<std::uint8_t> bits(pairs.size());
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    bits[e] = g.edge(pairs[e].first, pairs[e].second) ? 1 : 0;
  }
  return bits;
}

inline std::string likelihood_mode_name(const ModelSpec& spec, const LikelihoodOptions& opts) {
  if (!spec.latent()) return "exact";
  if (opts.lsm_mode == LsmLikelihoodMode::surrogate) return "lsm-surrogate";
  return "lsm-mc(" + std::to_string(opts.mc_latent_draws) + ")";
}

// MC marginal ln P(A | Y) for LSM/DLSM via the centered representation:
// x ~ N(0, sigma^2 I) with the cross-pair shift 2*y_i*mu, so one set of
// draws serves every labeling (common random numbers).
inline double lsm_mc_log_likelihood(const ModelSpec& spec, const LabelVector& y,
                                    std::span<const std::uint8_t> bits,
                                    std::span<const double> draws, std::size_t L,
                                    const PredecessorSet& tau) {
  const std::size_t n = y.size();
  const bool dynamic = spec.kind() == ModelKind::Dlsm;
  const std::size_t d = dynamic ? spec.get<DlsmParams>().d : spec.get<LsmParams>().d;
  const auto& mu = dynamic ? spec.get<DlsmParams>().mu : spec.get<LsmParams>().mu;
  const double sigma = dynamic ? spec.get<DlsmParams>().sigma : spec.get<LsmParams>().sigma;
  const Modifier* modifier = dynamic ? &spec.get<DlsmParams>().modifier : nullptr;
  const auto pairs = generation_pairs(n, false);

  std::vector<double> log_liks(L);
  for (std::size_t l = 0; l < L; ++l) {
    const double* x = draws.data() + l * n * d;
    double ll = 0.0;
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      const auto [i, j] = pairs[e];
      double dist_sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        double diff = sigma * (x[i * d + k] - x[j * d + k]);
        if (!y.same(i, j)) diff += 2.0 * static_cast<double>(y[i]) * mu[k];
        dist_sq += diff * diff;
      }
      double p = std::exp(-dist_sq);
      if (modifier) p *= modifier->evaluate(tau.history(e, bits.first(e)));
      ll += SequentialModel::log_bernoulli(p, bits[e] != 0);
      if (ll == -SequentialModel::kInf) break;
    }
    log_liks[l] = ll;
  }
  double mx = -SequentialModel::kInf;
  for (double v : log_liks) mx = std::max(mx, v);
  if (mx == -SequentialModel::kInf) return mx;
  double s = 0.0;
  for (double v : log_liks) s += std::exp(v - mx);
  return mx + std::log(s / static_cast<double>(L));
}

inline double log_likelihood_or_minus_inf(const ModelSpec& spec, const LabelVector& y,
                                          std::span<const std::uint8_t> bits,
                                          const LikelihoodOptions& opts,
                                          std::span<const double> mc_draws,
                                          const PredecessorSet& tau_storage) {
  if (spec.latent() && opts.lsm_mode == LsmLikelihoodMode::mc_marginal) {
    return lsm_mc_log_likelihood(spec, y, bits, mc_draws, opts.mc_latent_draws, tau_storage);
  }
  SequentialModel model(spec, y, opts.tau);
  return model.log_likelihood(bits);
}

}  // namespace detail

// ln P(A | Y) for the given model; latent models evaluate the mode selected
// in opts and record it in map_recover's result. Throws
// ImpossibleObservationError when the graph has probability zero under
// (spec, y).
inline double log_likelihood(const ModelSpec& spec, const LabelVector& y, const Graph& g,
                             const LikelihoodOptions& opts = {}) {
  validate_spec(spec, y.size());
  if (g.node_count() != y.size()) throw LengthMismatchError("graph and labels differ in size");
  if (g.directed() != spec.directed()) throw RangeError("graph directedness does not match model");
  const auto bits = detail::graph_bits(g);
  PredecessorSet tau_storage;
  std::span<const double> no_draws;
  double ll;
  if (spec.latent() && opts.lsm_mode == LsmLikelihoodMode::mc_marginal) {
    const std::size_t d = spec.kind() == ModelKind::Dlsm ? spec.get<DlsmParams>().d : spec.get<LsmParams>().d;
    if (opts.mc_latent_draws < 1) throw RangeError("mc_latent_draws >= 1 required");
    Rng rng(opts.mc_seed);
    std::vector<double> draws(opts.mc_latent_draws * y.size() * d);
    for (auto& v : draws) v = rng.next_normal();
    tau_storage = opts.tau ? *opts.tau : PredecessorSet::full(y.size());
    ll = detail::lsm_mc_log_likelihood(spec, y, bits, draws, opts.mc_latent_draws, tau_storage);
  } else {
    ll = detail::log_likelihood_or_minus_inf(spec, y, bits, opts, no_draws, tau_storage);
  }
  if (ll == -SequentialModel::kInf) {
    throw ImpossibleObservationError("graph has probability 0 under the given labeling");
  }
  return ll;
}

// Replay of a graph's per-edge Bernoulli parameters in generation order under
// (spec, y); equals the trace a sampler records when drawing that graph.
inline std::vector<double> edge_parameter_trace(const ModelSpec& spec, const LabelVector& y,
                                                const Graph& g, const PredecessorSet* tau = nullptr) {
  SequentialModel model(spec, y, tau);
  return model.parameter_trace(detail::graph_bits(g));
}

// Exhaustive MAP (= maximum likelihood: the label prior is uniform) over all
// 2^n labelings. Ties are counted exactly and broken toward the smallest
// labeling in binary order (all-(-1) first; see LabelVector::order_value).
// Labelings under which the observation is impossible are skipped; if every
// labeling is impossible the observation contradicts the model.
inline RecoveryResult map_recover(const ModelSpec& spec, const Graph& g,
                                  const LikelihoodOptions& opts = {}) {
  const std::size_t n = g.node_count();
  if (n > 20) throw TooLargeError("map_recover: 2^n search needs n <= 20");
  validate_spec(spec, n);
  if (g.directed() != spec.directed()) throw RangeError("graph directedness does not match model");
  const auto bits = detail::graph_bits(g);
  const std::uint64_t label_count = std::uint64_t{1} << n;

  double best = -SequentialModel::kInf;
  std::uint64_t best_value = 0;
  std::uint64_t ties = 0;

  auto consider = [&](std::uint64_t value, double ll) {
    if (ll == -SequentialModel::kInf) return;
    if (ll > best) {
      best = ll;
      best_value = value;
      ties = 1;
    } else if (ll == best) {
      ++ties;
      best_value = std::min(best_value, value);
    }
  };

  const bool independent_two_prob = spec.kind() == ModelKind::Sbm || spec.kind() == ModelKind::Ergm ||
                                    spec.kind() == ModelKind::Lsm;
  if (independent_two_prob) {
    // Likelihood depends on the labeling only through four integer counts
    // (same/cross x present/absent), updated along a Gray-code walk: exact
    // tie detection and O(n) work per labeling.
    double p_same, q_cross;
    if (spec.kind() == ModelKind::Sbm) {
      p_same = spec.get<SbmParams>().p;
      q_cross = spec.get<SbmParams>().q;
    } else if (spec.kind() == ModelKind::Ergm) {
      const auto probs = ergm_edge_probs(spec.get<ErgmParams>().beta);
      p_same = probs.first;
      q_cross = probs.second;
    } else {
      const auto& par = spec.get<LsmParams>();
      p_same = lsm_edge_moment(par.d, par.mu, par.sigma, true);
      q_cross = lsm_edge_moment(par.d, par.mu, par.sigma, false);
    }
    const std::array<double, 4> logv = {
        std::log(p_same), std::log1p(-p_same), std::log(q_cross), std::log1p(-q_cross)};
    // counts[0]=same-present, [1]=same-absent, [2]=cross-present, [3]=cross-absent
    std::array<std::int64_t, 4> counts = {0, 0, 0, 0};
    const auto pairs = generation_pairs(n, false);
    std::vector<std::int8_t> labels(n, -1);  // Gray value 0 = all -1
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      const auto [i, j] = pairs[e];
      const bool same = labels[i] == labels[j];
      ++counts[(same ? 0 : 2) + (bits[e] ? 0 : 1)];
    }
    // When p_same == q_cross the likelihood is label-free; merging the counts
    // keeps the sum bit-identical across labelings so ties come out as 2^n.
    const bool flat = p_same == q_cross;
    auto count_ll = [&]() {
      double ll = 0.0;
      if (flat) {
        const auto present = static_cast<double>(counts[0] + counts[2]);
        const auto absent = static_cast<double>(counts[1] + counts[3]);
        if (present != 0) ll += present * logv[0];
        if (absent != 0) ll += absent * logv[1];
        return ll;
      }
      for (int c = 0; c < 4; ++c) {
        if (counts[c] != 0) ll += static_cast<double>(counts[c]) * logv[c];
      }
      return ll;
    };
    std::uint64_t gray = 0;
    consider(gray, count_ll());
    for (std::uint64_t idx = 1; idx < label_count; ++idx) {
      const int flip_bit = std::countr_zero(idx);       // bit of the Gray code that changes
      const std::size_t node = n - 1 - static_cast<std::size_t>(flip_bit);
      gray ^= std::uint64_t{1} << flip_bit;
      for (std::size_t u = 0; u < n; ++u) {
        if (u == node) continue;
        const auto [a, b] = std::minmax(u, node);
        const bool present = bits[pair_rank(a, b, n)] != 0;
        const bool was_same = labels[u] == labels[node];
        --counts[(was_same ? 0 : 2) + (present ? 0 : 1)];
        ++counts[(was_same ? 2 : 0) + (present ? 0 : 1)];
      }
      labels[node] = static_cast<std::int8_t>(-labels[node]);
      consider(gray, count_ll());
    }
  } else {
    PredecessorSet tau_storage;
    std::vector<double> mc_draws;
    if (spec.latent() && opts.lsm_mode == LsmLikelihoodMode::mc_marginal) {
      const std::size_t d = spec.kind() == ModelKind::Dlsm ? spec.get<DlsmParams>().d
                                                           : spec.get<LsmParams>().d;
      Rng rng(opts.mc_seed);
      mc_draws.resize(opts.mc_latent_draws * n * d);
      for (auto& v : mc_draws) v = rng.next_normal();
      tau_storage = opts.tau ? *opts.tau : PredecessorSet::full(n);
    }
    for (std::uint64_t value = 0; value < label_count; ++value) {
      const LabelVector y = LabelVector::from_order_value(n, value);
      const double ll =
          detail::log_likelihood_or_minus_inf(spec, y, bits, opts, mc_draws, tau_storage);
      consider(value, ll);
    }
  }

  if (ties == 0) {
    throw ImpossibleObservationError("graph has probability 0 under every labeling");
  }
  return {LabelVector::from_order_value(n, best_value), best, ties,
          detail::likelihood_mode_name(spec, opts)};
}

// 1 unless y_hat equals y_star componentwise.
inline int exact_error(const LabelVector& y_hat, const LabelVector& y_star) {
  if (y_hat.size() != y_star.size()) throw LengthMismatchError("label vectors differ in length");
  return y_hat == y_star ? 0 : 1;
}

// 1 unless y_hat equals y_star or its global flip.
inline int flip_error(const LabelVector& y_hat, const LabelVector& y_star) {
  if (y_hat.size() != y_star.size()) throw LengthMismatchError("label vectors differ in length");
  return (y_hat == y_star || y_hat == y_star.flipped()) ? 0 : 1;
}

}  // namespace netlimits
