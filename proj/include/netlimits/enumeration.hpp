#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netlimits/cap_simplex.hpp"
#include "netlimits/core.hpp"
#include "netlimits/model_spec.hpp"
#include "netlimits/moments.hpp"
#include "netlimits/samplers.hpp"

namespace netlimits {

constexpr std::size_t kMaxEnumerationEdges = 20;

// P(A_e = 1 | previously generated edges, labels) for every model, with edges
// indexed in generation order (see generation_pairs). Latent models use the
// edge-marginal surrogate: each pair's conditional is the closed-form marginal
// with the latents integrated out, which matches the quantity the KL/MI bounds
// manipulate but drops the dependence induced by shared latents.
class SequentialModel {
 public:
  SequentialModel(const ModelSpec& spec, const LabelVector& y, const PredecessorSet* tau = nullptr)
      : spec_(spec), y_(y), n_(y.size()), pairs_(generation_pairs(n_, spec.directed())) {
    validate_spec(spec, n_);
    if (spec.dynamic_undirected()) {
      tau_ = tau ? *tau : PredecessorSet::full(n_);
      tau_.validate();
      if (tau_.pair_count() != pairs_.size())
        throw LengthMismatchError("predecessor set sized for a different n");
    }
    switch (spec.kind()) {
      case ModelKind::Sbm: {
        const auto& p = spec.get<SbmParams>();
        p_same_ = p.p;
        q_cross_ = p.q;
        break;
      }
      case ModelKind::Ergm: {
        const auto probs = ergm_edge_probs(spec.get<ErgmParams>().beta);
        p_same_ = probs.first;
        q_cross_ = probs.second;
        break;
      }
      case ModelKind::Lsm: {
        const auto& p = spec.get<LsmParams>();
        p_same_ = lsm_edge_moment(p.d, p.mu, p.sigma, true);
        q_cross_ = lsm_edge_moment(p.d, p.mu, p.sigma, false);
        surrogate_ = true;
        break;
      }
      case ModelKind::Dsbm: {
        const auto& p = spec.get<DsbmParams>();
        p_same_ = p.p;
        q_cross_ = p.q;
        break;
      }
      case ModelKind::Dlsm: {
        const auto& p = spec.get<DlsmParams>();
        p_same_ = lsm_edge_moment(p.d, p.mu, p.sigma, true);
        q_cross_ = lsm_edge_moment(p.d, p.mu, p.sigma, false);
        surrogate_ = true;
        break;
      }
      case ModelKind::Dpam:
      case ModelKind::Dswm:
        break;
    }
  }

  std::size_t edge_count() const { return pairs_.size(); }
  bool directed() const { return spec_.directed(); }
  bool surrogate() const { return surrogate_; }
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs() const { return pairs_; }

  double edge_prob(std::size_t e, std::span<const std::uint8_t> prev) const {
    const auto [from, to] = pairs_[e];
    switch (spec_.kind()) {
      case ModelKind::Sbm:
      case ModelKind::Ergm:
      case ModelKind::Lsm:
        return y_.same(from, to) ? p_same_ : q_cross_;
      case ModelKind::Dsbm: {
        const auto& par = spec_.get<DsbmParams>();
        const auto hist = tau_.history(e, prev);
        return (y_.same(from, to) ? p_same_ : q_cross_) * par.modifier.evaluate(hist);
      }
      case ModelKind::Dlsm: {
        const auto& par = spec_.get<DlsmParams>();
        const auto hist = tau_.history(e, prev);
        return (y_.same(from, to) ? p_same_ : q_cross_) * par.modifier.evaluate(hist);
      }
      case ModelKind::Dpam:
      case ModelKind::Dswm: {
        const auto w = directed_column_probs(to, prev, e - from);
        return w[from];
      }
    }
    throw UnsupportedSpecError("unknown model kind");
  }

  // ln P(bits | labels); -inf when the observation has probability zero.
  double log_likelihood(std::span<const std::uint8_t> bits) const {
    if (bits.size() != pairs_.size()) throw LengthMismatchError("bit string length != edge count");
    if (directed()) return directed_log_likelihood(bits);
    double ll = 0.0;
    for (std::size_t e = 0; e < pairs_.size(); ++e) {
      ll += log_bernoulli(edge_prob(e, bits.first(e)), bits[e]);
      if (ll == -kInf) return -kInf;
    }
    return ll;
  }

  // Bernoulli parameter of every edge in generation order, conditioned on the
  // given realized bits; replaying a sampled graph's bits reproduces the
  // parameters the sampler drew against, exactly.
  std::vector<double> parameter_trace(std::span<const std::uint8_t> bits) const {
    if (bits.size() != pairs_.size()) throw LengthMismatchError("bit string length != edge count");
    std::vector<double> out(pairs_.size());
    if (directed()) {
      std::size_t e = 0;
      const std::size_t m = directed_m();
      for (std::uint32_t i = 1; i < n_; ++i) {
        std::vector<double> w;
        if (i >= m) w = directed_column_probs(i, bits.first(e), e);
        for (std::uint32_t j = 0; j < i; ++j, ++e) out[e] = i >= m ? w[j] : 0.0;
      }
    } else {
      for (std::size_t e = 0; e < pairs_.size(); ++e) out[e] = edge_prob(e, bits.first(e));
    }
    return out;
  }

  static constexpr double kInf = std::numeric_limits<double>::infinity();

  // 0*log 0 convention: an observation matching a degenerate parameter
  // contributes 0; one contradicting it makes the whole graph impossible.
  static double log_bernoulli(double p, bool bit) {
    if (bit) return p > 0.0 ? std::log(p) : -kInf;
    return p < 1.0 ? std::log1p(-p) : -kInf;
  }

 private:
  std::size_t directed_m() const {
    return spec_.kind() == ModelKind::Dpam ? spec_.get<DpamParams>().m : spec_.get<DswmParams>().m;
  }

  // m * capped weights for column i; column_start is the index in generation
  // order of pair (0, i). Columns i < m admit no edges (all-zero probs).
  std::vector<double> directed_column_probs(std::uint32_t i, std::span<const std::uint8_t> prev,
                                            std::size_t column_start) const {
    const std::size_t m = directed_m();
    if (i < m) return std::vector<double>(i, 0.0);
    std::vector<double> w;
    if (spec_.kind() == ModelKind::Dpam) {
      std::vector<std::uint32_t> out_degrees(i, 0);
      // prev covers pairs for columns < i plus any already-generated bits in
      // column i; only earlier columns feed the out-degree counts.
      for (std::size_t e = 0; e < std::min(prev.size(), column_start); ++e) {
        if (prev[e]) ++out_degrees[pairs_[e].first];
      }
      w = dpam_column_weights(out_degrees, y_, i, spec_.get<DpamParams>().s);
    } else {
      const auto& par = spec_.get<DswmParams>();
      w = dswm_column_weights(y_, i, par.m, par.s, par.p_mix);
    }
    cap_values(w, m);
    for (auto& v : w) v = capped_link_probability(v, m);
    return w;
  }

  double directed_log_likelihood(std::span<const std::uint8_t> bits) const {
    double ll = 0.0;
    std::size_t e = 0;
    const std::size_t m = directed_m();
    for (std::uint32_t i = 1; i < n_; ++i) {
      if (i < m) {
        for (std::uint32_t j = 0; j < i; ++j, ++e) {
          if (bits[e]) return -kInf;  // edges into the seed nodes are impossible
        }
        continue;
      }
      const auto w = directed_column_probs(i, bits.first(e), e);
      for (std::uint32_t j = 0; j < i; ++j, ++e) {
        ll += log_bernoulli(w[j], bits[e] != 0);
        if (ll == -kInf) return -kInf;
      }
    }
    return ll;
  }

  ModelSpec spec_;
  LabelVector y_;
  std::size_t n_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs_;
  PredecessorSet tau_;
  double p_same_ = 0.0;
  double q_cross_ = 0.0;
  bool surrogate_ = false;
};

// Exact probability of every graph on n nodes under P(. | Y), indexed by the
// edge bitmask in generation order (bit e = pairs[e]).
struct GraphDistribution {
  std::size_t n = 0;
  bool directed = false;
  std::string method;  // "exact" or "edge-marginal-surrogate"
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::vector<double> probs;
  std::vector<double> log_probs;

  Graph graph_at(std::uint32_t mask) const {
    Graph g(n, directed);
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      if (mask & (std::uint32_t{1} << e)) g.set_edge(pairs[e].first, pairs[e].second, true);
    }
    return g;
  }
};

inline GraphDistribution enumerate_distribution(const ModelSpec& spec, const LabelVector& y,
                                                const PredecessorSet* tau = nullptr) {
  SequentialModel model(spec, y, tau);
  const std::size_t edges = model.edge_count();
  if (edges > kMaxEnumerationEdges)
    throw TooLargeError("enumerate_distribution: " + std::to_string(edges) + " edges exceeds " +
                        std::to_string(kMaxEnumerationEdges));
  GraphDistribution dist;
  dist.n = y.size();
  dist.directed = model.directed();
  dist.method = model.surrogate() ? "edge-marginal-surrogate" : "exact";
  dist.pairs = model.pairs();
  const std::size_t count = std::size_t{1} << edges;
  dist.probs.resize(count);
  dist.log_probs.resize(count);
  std::vector<std::uint8_t> bits(edges);
  for (std::size_t mask = 0; mask < count; ++mask) {
    for (std::size_t e = 0; e < edges; ++e) bits[e] = (mask >> e) & 1u;
    const double lp = model.log_likelihood(bits);
    dist.log_probs[mask] = lp;
    dist.probs[mask] = std::exp(lp);
  }
  return dist;
}

// KL(P_{A|Y} || P_{A|Y'}) in nats by exhaustive enumeration. +inf when the
// support of P(.|Y) escapes the support of P(.|Y').
inline double kl_graph(const ModelSpec& spec, const LabelVector& y, const LabelVector& y_prime,
                       const PredecessorSet* tau = nullptr) {
  if (y.size() != y_prime.size()) throw LengthMismatchError("label vectors differ in length");
  const GraphDistribution d1 = enumerate_distribution(spec, y, tau);
  const GraphDistribution d2 = enumerate_distribution(spec, y_prime, tau);
  double kl = 0.0;
  for (std::size_t mask = 0; mask < d1.probs.size(); ++mask) {
    const double p = d1.probs[mask];
    if (p == 0.0) continue;
    kl += p * (d1.log_probs[mask] - d2.log_probs[mask]);
  }
  return kl;
}

inline double total_variation(const GraphDistribution& a, const GraphDistribution& b) {
  if (a.probs.size() != b.probs.size()) throw LengthMismatchError("distributions differ in support size");
  double tv = 0.0;
  for (std::size_t i = 0; i < a.probs.size(); ++i) tv += std::abs(a.probs[i] - b.probs[i]);
  return 0.5 * tv;
}

}  // namespace netlimits
