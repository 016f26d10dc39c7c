#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "netlimits/cap_simplex.hpp"
#include "netlimits/core.hpp"
#include "netlimits/model_spec.hpp"
#include "netlimits/moments.hpp"
#include "netlimits/rng.hpp"

namespace netlimits {

// Latent positions, row i = node i's d-dimensional vector. Returned by the
// latent-model samplers for diagnostics; recovery never sees it.
struct LatentMatrix {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> z;  // row-major n*d

  double at(std::size_t node, std::size_t k) const { return z[node * d + k]; }
};

// Per-edge Bernoulli parameters in generation order, recorded when a caller
// passes a trace; used by the replay-consistency tests.
struct EdgeTrace {
  std::vector<double> params;
};

inline LabelVector sample_labels(std::size_t n, Rng& rng) {
  if (n < 2) throw RangeError("sample_labels: n >= 2 required");
  std::vector<std::int8_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = (rng.next_u64() & 1ull) ? std::int8_t{1} : std::int8_t{-1};
  }
  return LabelVector(std::move(labels));
}

inline LabelVector sample_labels(std::size_t n, Seed seed) {
  Rng rng(seed);
  return sample_labels(n, rng);
}

namespace detail {

inline void check_labels(const LabelVector& y, std::size_t n) {
  if (y.size() != n) throw LengthMismatchError("label vector length != n");
}

template <typename ProbFn>
Graph sample_independent_edges(std::size_t n, ProbFn&& prob, Rng& rng, EdgeTrace* trace) {
  Graph g(n, /*directed=*/false);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = prob(i, j);
      if (trace) trace->params.push_back(p);
      g.set_edge(i, j, rng.bernoulli(p));
    }
  }
  return g;
}

inline LatentMatrix sample_gaussian_latents(std::size_t n, std::size_t d, double sigma,
                                            const std::vector<double>& mean_plus,
                                            const LabelVector& y, Rng& rng) {
  // Node i's mean is y_i * mean_plus (pass the zero vector for centered draws).
  LatentMatrix lat{n, d, std::vector<double>(n * d)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      lat.z[i * d + k] = static_cast<double>(y[i]) * mean_plus[k] + sigma * rng.next_normal();
    }
  }
  return lat;
}

inline double sq_dist(const LatentMatrix& lat, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t k = 0; k < lat.d; ++k) {
    const double diff = lat.at(i, k) - lat.at(j, k);
    s += diff * diff;
  }
  return s;
}

}  // namespace detail

inline Graph sample_sbm(std::size_t n, double p, double q, const LabelVector& y, Rng& rng,
                        EdgeTrace* trace = nullptr) {
  detail::check_pq(p, q);
  detail::check_labels(y, n);
  return detail::sample_independent_edges(
      n, [&](std::size_t i, std::size_t j) { return y.same(i, j) ? p : q; }, rng, trace);
}

inline Graph sample_sbm(std::size_t n, double p, double q, const LabelVector& y, Seed seed,
                        EdgeTrace* trace = nullptr) {
  Rng rng(seed);
  return sample_sbm(n, p, q, y, rng, trace);
}

// Factorized per-edge Bernoulli parameters of the edge-agreement ERGM:
// p_same = e^beta/(1+e^beta), q_cross = e^{-beta}/(1+e^{-beta}); they sum to 1.
inline std::pair<double, double> ergm_edge_probs(double beta) {
  if (!(beta > 0.0)) throw RangeError("beta > 0 required");
  const double p_same = 1.0 / (1.0 + std::exp(-beta));
  const double q_cross = 1.0 / (1.0 + std::exp(beta));
  return {p_same, q_cross};
}

inline Graph sample_ergm(std::size_t n, double beta, const LabelVector& y, Rng& rng,
                         EdgeTrace* trace = nullptr) {
  detail::check_labels(y, n);
  const auto [p_same, q_cross] = ergm_edge_probs(beta);
  return detail::sample_independent_edges(
      n, [&](std::size_t i, std::size_t j) { return y.same(i, j) ? p_same : q_cross; }, rng,
      trace);
}

inline Graph sample_ergm(std::size_t n, double beta, const LabelVector& y, Seed seed,
                         EdgeTrace* trace = nullptr) {
  Rng rng(seed);
  return sample_ergm(n, beta, y, rng, trace);
}

struct LatentSample {
  Graph graph;
  LatentMatrix latent;
};

// z_i ~ N(y_i * mu, sigma^2 I); edge (i,j) Bernoulli(exp(-||z_i - z_j||^2)).
inline LatentSample sample_lsm(std::size_t n, std::size_t d, const std::vector<double>& mu,
                               double sigma, const LabelVector& y, Rng& rng,
                               EdgeTrace* trace = nullptr) {
  detail::check_lsm(d, mu, sigma);
  detail::check_labels(y, n);
  LatentMatrix lat = detail::sample_gaussian_latents(n, d, sigma, mu, y, rng);
  Graph g = detail::sample_independent_edges(
      n, [&](std::size_t i, std::size_t j) { return std::exp(-detail::sq_dist(lat, i, j)); },
      rng, trace);
  return {std::move(g), std::move(lat)};
}

inline LatentSample sample_lsm(std::size_t n, std::size_t d, const std::vector<double>& mu,
                               double sigma, const LabelVector& y, Seed seed,
                               EdgeTrace* trace = nullptr) {
  Rng rng(seed);
  return sample_lsm(n, d, mu, sigma, y, rng, trace);
}

// Modified form: x_i ~ N(0, sigma^2 I); same-label pairs use exp(-||x_i-x_j||^2),
// cross pairs shift by 2*y_i*mu. Distribution of the graph equals sample_lsm's.
inline LatentSample sample_modified_lsm(std::size_t n, std::size_t d, const std::vector<double>& mu,
                                        double sigma, const LabelVector& y, Rng& rng,
                                        EdgeTrace* trace = nullptr) {
  detail::check_lsm(d, mu, sigma);
  detail::check_labels(y, n);
  const std::vector<double> zero(d, 0.0);
  LatentMatrix lat = detail::sample_gaussian_latents(n, d, sigma, zero, y, rng);
  auto prob = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      double diff = lat.at(i, k) - lat.at(j, k);
      if (!y.same(i, j)) diff += 2.0 * static_cast<double>(y[i]) * mu[k];
      s += diff * diff;
    }
    return std::exp(-s);
  };
  Graph g = detail::sample_independent_edges(n, prob, rng, trace);
  return {std::move(g), std::move(lat)};
}

inline LatentSample sample_modified_lsm(std::size_t n, std::size_t d, const std::vector<double>& mu,
                                        double sigma, const LabelVector& y, Seed seed,
                                        EdgeTrace* trace = nullptr) {
  Rng rng(seed);
  return sample_modified_lsm(n, d, mu, sigma, y, rng, trace);
}

namespace detail {

template <typename BaseFn>
Graph sample_dynamic_undirected(std::size_t n, const Modifier& modifier,
                                const PredecessorSet& tau, BaseFn&& base, Rng& rng,
                                EdgeTrace* trace) {
  if (tau.pair_count() != pair_count(n)) throw LengthMismatchError("predecessor set sized for a different n");
  Graph g(n, /*directed=*/false);
  std::vector<std::uint8_t> bits;
  bits.reserve(pair_count(n));
  std::size_t e = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++e) {
      const auto hist = tau.history(e, bits);
      const double f = modifier.evaluate(hist);
      const double p = base(i, j) * f;
      if (trace) trace->params.push_back(p);
      const bool present = rng.bernoulli(p);
      g.set_edge(i, j, present);
      bits.push_back(present ? 1 : 0);
    }
  }
  return g;
}

}  // namespace detail

// Edge (i,j) Bernoulli((p or q) * f_{|tau_ij|}(A_tau)), generated in
// lexicographic pair order.
inline Graph sample_dsbm(std::size_t n, double p, double q, const Modifier& modifier,
                         const PredecessorSet& tau, const LabelVector& y, Rng& rng,
                         EdgeTrace* trace = nullptr) {
  detail::check_pq(p, q);
  detail::check_labels(y, n);
  return detail::sample_dynamic_undirected(
      n, modifier, tau, [&](std::size_t i, std::size_t j) { return y.same(i, j) ? p : q; },
      rng, trace);
}

inline Graph sample_dsbm(std::size_t n, double p, double q, const Modifier& modifier,
                         const PredecessorSet& tau, const LabelVector& y, Seed seed,
                         EdgeTrace* trace = nullptr) {
  Rng rng(seed);
  return sample_dsbm(n, p, q, modifier, tau, y, rng, trace);
}

inline LatentSample sample_dlsm(std::size_t n, std::size_t d, const std::vector<double>& mu,
                                double sigma, const Modifier& modifier, const PredecessorSet& tau,
                                const LabelVector& y, Rng& rng, EdgeTrace* trace = nullptr) {
  detail::check_lsm(d, mu, sigma);
  detail::check_labels(y, n);
  LatentMatrix lat = detail::sample_gaussian_latents(n, d, sigma, mu, y, rng);
  Graph g = detail::sample_dynamic_undirected(
      n, modifier, tau,
      [&](std::size_t i, std::size_t j) { return std::exp(-detail::sq_dist(lat, i, j)); }, rng,
      trace);
  return {std::move(g), std::move(lat)};
}

inline LatentSample sample_dlsm(std::size_t n, std::size_t d, const std::vector<double>& mu,
                                double sigma, const Modifier& modifier, const PredecessorSet& tau,
                                const LabelVector& y, Seed seed, EdgeTrace* trace = nullptr) {
  Rng rng(seed);
  return sample_dlsm(n, d, mu, sigma, modifier, tau, y, rng, trace);
}

// Unnormalized-then-normalized attachment weights for column i of a DPAM:
// w_j proportional to (out_degree_j + 1) * (1[y_i = y_j]*s + 1), j < i.
inline std::vector<double> dpam_column_weights(std::span<const std::uint32_t> out_degrees,
                                               const LabelVector& y, std::size_t i, double s) {
  std::vector<double> w(i);
  double total = 0.0;
  for (std::size_t j = 0; j < i; ++j) {
    const double homophily = y.same(i, j) ? s + 1.0 : 1.0;
    w[j] = (static_cast<double>(out_degrees[j]) + 1.0) * homophily;
    total += w[j];
  }
  for (auto& v : w) v /= total;
  return w;
}

// DSWM weights for column i: within each group proportional to
// 1[y_i = y_j]*s + 1; the last-m window carries mass p_mix, older nodes
// 1 - p_mix. With no older nodes (i == m) the window carries all the mass.
inline std::vector<double> dswm_column_weights(const LabelVector& y, std::size_t i, std::size_t m,
                                               double s, double p_mix) {
  std::vector<double> w(i);
  const std::size_t window_lo = i - m;
  const bool has_older = window_lo > 0;
  const double window_mass = has_older ? p_mix : 1.0;
  double window_total = 0.0;
  double older_total = 0.0;
  for (std::size_t j = 0; j < i; ++j) {
    w[j] = y.same(i, j) ? s + 1.0 : 1.0;
    (j >= window_lo ? window_total : older_total) += w[j];
  }
  for (std::size_t j = 0; j < i; ++j) {
    if (j >= window_lo) {
      w[j] *= window_mass / window_total;
    } else {
      w[j] *= (1.0 - p_mix) / older_total;
    }
  }
  return w;
}

namespace detail {

template <typename WeightFn>
Graph sample_directed_growth(std::size_t n, std::size_t m, WeightFn&& weights, Rng& rng,
                             EdgeTrace* trace) {
  Graph g(n, /*directed=*/true);
  std::vector<std::uint32_t> out_degrees(n, 0);
  for (std::size_t i = m; i < n; ++i) {
    std::vector<double> w = weights(out_degrees, i);
    cap_values(w, m);
    for (std::size_t j = 0; j < i; ++j) {
      const double p = capped_link_probability(w[j], m);
      if (trace) trace->params.push_back(p);
      const bool present = rng.bernoulli(p);
      if (present) {
        g.set_edge(j, i, true);
        ++out_degrees[j];
      }
    }
  }
  return g;
}

}  // namespace detail

// Nodes 0..m-1 start unconnected with in-degree 0; each later node i draws
// its predecessors' weights from out-degree and homophily, caps them at 1/m,
// and every j < i links to i independently with probability m * w_j. The
// expected in-degree of every node i >= m is exactly m.
inline Graph sample_dpam(std::size_t n, std::size_t m, double s, const LabelVector& y, Rng& rng,
                         EdgeTrace* trace = nullptr) {
  detail::check_directed(m, s);
  if (n < m + 1) throw RangeError("n >= m+1 required");
  detail::check_labels(y, n);
  return detail::sample_directed_growth(
      n, m,
      [&](std::span<const std::uint32_t> degs, std::size_t i) {
        return dpam_column_weights(degs.first(i), y, i, s);
      },
      rng, trace);
}

inline Graph sample_dpam(std::size_t n, std::size_t m, double s, const LabelVector& y, Seed seed,
                         EdgeTrace* trace = nullptr) {
  Rng rng(seed);
  return sample_dpam(n, m, s, y, rng, trace);
}

inline Graph sample_dswm(std::size_t n, std::size_t m, double s, double p_mix, const LabelVector& y,
                         Rng& rng, EdgeTrace* trace = nullptr) {
  detail::check_directed(m, s);
  if (!(p_mix > 0.0 && p_mix < 1.0)) throw RangeError("p_mix in (0,1) required");
  if (n < m + 1) throw RangeError("n >= m+1 required");
  detail::check_labels(y, n);
  return detail::sample_directed_growth(
      n, m,
      [&](std::span<const std::uint32_t>, std::size_t i) {
        return dswm_column_weights(y, i, m, s, p_mix);
      },
      rng, trace);
}

inline Graph sample_dswm(std::size_t n, std::size_t m, double s, double p_mix, const LabelVector& y,
                         Seed seed, EdgeTrace* trace = nullptr) {
  Rng rng(seed);
  return sample_dswm(n, m, s, p_mix, y, rng, trace);
}

// Dispatch on a ModelSpec. For latent models the latent matrix is written to
// latent_out when given; tau applies to the dynamic undirected models only
// (null means the full predecessor set).
inline Graph sample_graph(const ModelSpec& spec, std::size_t n, const LabelVector& y, Rng& rng,
                          LatentMatrix* latent_out = nullptr, EdgeTrace* trace = nullptr,
                          const PredecessorSet* tau = nullptr) {
  validate_spec(spec, n);
  switch (spec.kind()) {
    case ModelKind::Sbm: {
      const auto& p = spec.get<SbmParams>();
      return sample_sbm(n, p.p, p.q, y, rng, trace);
    }
    case ModelKind::Ergm:
      return sample_ergm(n, spec.get<ErgmParams>().beta, y, rng, trace);
    case ModelKind::Lsm: {
      const auto& p = spec.get<LsmParams>();
      auto s = sample_lsm(n, p.d, p.mu, p.sigma, y, rng, trace);
      if (latent_out) *latent_out = std::move(s.latent);
      return std::move(s.graph);
    }
    case ModelKind::Dsbm: {
      const auto& p = spec.get<DsbmParams>();
      const PredecessorSet default_tau = tau ? PredecessorSet{} : PredecessorSet::full(n);
      return sample_dsbm(n, p.p, p.q, p.modifier, tau ? *tau : default_tau, y, rng, trace);
    }
    case ModelKind::Dlsm: {
      const auto& p = spec.get<DlsmParams>();
      const PredecessorSet default_tau = tau ? PredecessorSet{} : PredecessorSet::full(n);
      auto s = sample_dlsm(n, p.d, p.mu, p.sigma, p.modifier, tau ? *tau : default_tau, y, rng, trace);
      if (latent_out) *latent_out = std::move(s.latent);
      return std::move(s.graph);
    }
    case ModelKind::Dpam: {
      const auto& p = spec.get<DpamParams>();
      return sample_dpam(n, p.m, p.s, y, rng, trace);
    }
    case ModelKind::Dswm: {
      const auto& p = spec.get<DswmParams>();
      return sample_dswm(n, p.m, p.s, p.p_mix, y, rng, trace);
    }
  }
  throw UnsupportedSpecError("unknown model kind");
}

inline Graph sample_graph(const ModelSpec& spec, std::size_t n, const LabelVector& y, Seed seed,
                          LatentMatrix* latent_out = nullptr, EdgeTrace* trace = nullptr,
                          const PredecessorSet* tau = nullptr) {
  Rng rng(seed);
  return sample_graph(spec, n, y, rng, latent_out, trace, tau);
}

}  // namespace netlimits
