#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "netlimits/enumeration.hpp"
#include "netlimits/recovery.hpp"
#include "netlimits/samplers.hpp"
#include "test_util.hpp"

using namespace netlimits;

namespace {

// Independent argmax over all labelings through the public log_likelihood,
// with the same smallest-binary tie-break; used to check the Gray-code fast
// path and the sequential path alike. `offset` exercises the invariance of
// the argmax under a constant shift.
struct BruteResult {
  std::uint64_t value;
  double best;
  std::uint64_t ties;
};

BruteResult brute_force_map(const ModelSpec& spec, const Graph& g, double offset = 0.0,
                            const LikelihoodOptions& opts = {}) {
  const std::size_t n = g.node_count();
  BruteResult r{0, -std::numeric_limits<double>::infinity(), 0};
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
    double ll;
    try {
      ll = log_likelihood(spec, LabelVector::from_order_value(n, v), g, opts) + offset;
    } catch (const ImpossibleObservationError&) {
      continue;
    }
    if (ll > r.best) {
      r.best = ll;
      r.value = v;
      r.ties = 1;
    } else if (ll == r.best) {
      ++r.ties;
    }
  }
  return r;
}

}  // namespace

TEST_CASE("sbm log likelihood of a single present edge") {
  Graph g(2, false);
  g.set_edge(0, 1, true);
  const auto y = LabelVector::of_ints({1, 1});
  CHECK(log_likelihood(ModelSpec::sbm(0.6, 0.4), y, g) ==
        Catch::Approx(std::log(0.6)).margin(1e-12));
  Graph empty(2, false);
  CHECK(log_likelihood(ModelSpec::sbm(0.6, 0.4), y, empty) ==
        Catch::Approx(std::log(0.4)).margin(1e-12));
}

TEST_CASE("ergm factorized likelihood equals the normalized potential form") {
  const auto y = LabelVector::of_ints({1, 1, -1});
  const double beta = 1.0;
  const auto pairs = generation_pairs(3, false);
  // route 2: ln of the enumerated normalized weight
  double z = 0.0;
  std::vector<double> weights(8);
  for (std::size_t mask = 0; mask < 8; ++mask) {
    double expo = 0.0;
    for (std::size_t e = 0; e < 3; ++e) {
      if ((mask >> e) & 1u)
        expo += beta * static_cast<double>(y[pairs[e].first]) * static_cast<double>(y[pairs[e].second]);
    }
    weights[mask] = std::exp(expo);
    z += weights[mask];
  }
  for (std::size_t mask = 0; mask < 8; ++mask) {
    Graph g(3, false);
    for (std::size_t e = 0; e < 3; ++e) {
      if ((mask >> e) & 1u) g.set_edge(pairs[e].first, pairs[e].second, true);
    }
    CHECK(log_likelihood(ModelSpec::ergm(beta), y, g) ==
          Catch::Approx(std::log(weights[mask] / z)).margin(1e-10));
  }
}

TEST_CASE("deterministic dpam columns carry zero log likelihood") {
  Graph g(3, true);
  g.set_edge(0, 2, true);
  g.set_edge(1, 2, true);
  for (std::uint64_t v = 0; v < 8; ++v) {
    CHECK(log_likelihood(ModelSpec::dpam(2, 1.0), LabelVector::from_order_value(3, v), g) == 0.0);
  }
}

TEST_CASE("impossible observations throw") {
  Graph g(3, true);
  g.set_edge(0, 1, true);  // edge into a seed node of a dpam with m = 2
  const auto y = LabelVector::of_ints({1, 1, -1});
  CHECK_THROWS_AS(log_likelihood(ModelSpec::dpam(2, 1.0), y, g), ImpossibleObservationError);
  // missing a deterministic edge is just as impossible
  Graph h(3, true);
  h.set_edge(0, 2, true);
  CHECK_THROWS_AS(log_likelihood(ModelSpec::dpam(2, 1.0), y, h), ImpossibleObservationError);
}

TEST_CASE("global flip symmetry holds exactly for every model") {
  Rng rng(Seed{61, 0});
  const auto tau = PredecessorSet::full(5);
  const std::vector<double> mu = {1.0, 0.0};
  const std::vector<ModelSpec> specs = {
      ModelSpec::sbm(0.7, 0.2),
      ModelSpec::ergm(1.3),
      ModelSpec::lsm(2, mu, 0.5),
      ModelSpec::dsbm(0.7, 0.2, Modifier::geometric(0.8, 0.1)),
      ModelSpec::dlsm(2, mu, 0.5, Modifier::inverse_count()),
      ModelSpec::dpam(2, 1.5),
      ModelSpec::dswm(2, 0.8, 0.4),
  };
  for (const auto& spec : specs) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto y_gen = sample_labels(5, rng);
      const auto g = sample_graph(spec, 5, y_gen, rng, nullptr, nullptr, &tau);
      const auto y = sample_labels(5, rng);
      LikelihoodOptions opts;
      opts.tau = &tau;
      double ll_y, ll_flip;
      try {
        ll_y = log_likelihood(spec, y, g, opts);
      } catch (const ImpossibleObservationError&) {
        CHECK_THROWS_AS(log_likelihood(spec, y.flipped(), g, opts), ImpossibleObservationError);
        continue;
      }
      ll_flip = log_likelihood(spec, y.flipped(), g, opts);
      REQUIRE(ll_y == ll_flip);  // bit-exact, not approximate
    }
  }
}

TEST_CASE("map recovery under near-degenerate sbm finds the planted pair") {
  const auto y = LabelVector::of_ints({1, 1, -1, -1});
  const auto g = sample_sbm(4, 1.0 - 1e-12, 1e-12, y, Seed{62, 0});
  const auto r = map_recover(ModelSpec::sbm(1.0 - 1e-12, 1e-12), g);
  CHECK(r.ties == 2);
  const bool hit = r.y_hat == y || r.y_hat == y.flipped();
  CHECK(hit);
  CHECK(r.mode == "exact");
}

TEST_CASE("flat likelihood ties every labeling") {
  const auto y = LabelVector::of_ints({1, -1, 1, -1});
  const auto g = sample_ergm(4, 1e-18, y, Seed{63, 0});
  const auto r = map_recover(ModelSpec::ergm(1e-18), g);
  CHECK(r.ties == 16);
  CHECK(r.y_hat.order_value() == 0);  // smallest binary labeling wins the tie
}

TEST_CASE("ties come in flip pairs for every model") {
  Rng rng(Seed{64, 0});
  const auto tau = PredecessorSet::full(4);
  const std::vector<ModelSpec> specs = {
      ModelSpec::sbm(0.7, 0.2),
      ModelSpec::ergm(1.3),
      ModelSpec::dsbm(0.7, 0.2, Modifier::inverse_count()),
      ModelSpec::dpam(2, 1.5),
      ModelSpec::dswm(2, 0.8, 0.4),
  };
  for (const auto& spec : specs) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto y = sample_labels(4, rng);
      const auto g = sample_graph(spec, 4, y, rng, nullptr, nullptr, &tau);
      LikelihoodOptions opts;
      opts.tau = &tau;
      const auto r = map_recover(spec, g, opts);
      REQUIRE(r.ties >= 2);
      REQUIRE(r.ties % 2 == 0);
    }
  }
}

namespace {

// From-scratch two-probability likelihood: recount the same/cross x
// present/absent tallies for each labeling (no incremental bookkeeping) and
// evaluate the same analytic form. Equal tallies give equal likelihoods by
// construction, which is what makes tie counts exact.
BruteResult counted_map_oracle(double p_same, double q_cross, const Graph& g, double offset = 0.0) {
  const std::size_t n = g.node_count();
  const double logs[4] = {std::log(p_same), std::log1p(-p_same), std::log(q_cross),
                          std::log1p(-q_cross)};
  BruteResult r{0, -std::numeric_limits<double>::infinity(), 0};
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
    const auto y = LabelVector::from_order_value(n, v);
    std::int64_t counts[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        ++counts[(y.same(i, j) ? 0 : 2) + (g.edge(i, j) ? 0 : 1)];
      }
    }
    double ll = offset;
    for (int c = 0; c < 4; ++c) {
      if (counts[c] != 0) ll += static_cast<double>(counts[c]) * logs[c];
    }
    if (ll > r.best) {
      r.best = ll;
      r.value = v;
      r.ties = 1;
    } else if (ll == r.best) {
      ++r.ties;
    }
  }
  return r;
}

}  // namespace

TEST_CASE("gray-code fast path agrees with the from-scratch argmax") {
  Rng rng(Seed{65, 0});
  for (int trial = 0; trial < 25; ++trial) {
    const bool sbm = trial % 2 == 0;
    const auto spec = sbm ? ModelSpec::sbm(0.75, 0.25) : ModelSpec::ergm(0.9);
    const auto [p_same, q_cross] =
        sbm ? std::pair{0.75, 0.25} : ergm_edge_probs(0.9);
    const auto y = sample_labels(6, rng);
    const auto g = sample_graph(spec, 6, y, rng);
    const auto fast = map_recover(spec, g);
    const auto brute = counted_map_oracle(p_same, q_cross, g);
    REQUIRE(fast.y_hat.order_value() == brute.value);
    REQUIRE(fast.ties == brute.ties);
    REQUIRE(fast.log_posterior == Catch::Approx(brute.best).margin(1e-10));
    // adding a constant to every log likelihood cannot move the argmax
    const auto shifted = counted_map_oracle(p_same, q_cross, g, 7.25);
    REQUIRE(shifted.value == brute.value);
    REQUIRE(shifted.ties == brute.ties);
  }
}

TEST_CASE("sequential path agrees with the brute-force argmax") {
  Rng rng(Seed{66, 0});
  const auto tau = PredecessorSet::full(5);
  const std::vector<ModelSpec> specs = {
      ModelSpec::dsbm(0.8, 0.2, Modifier::inverse_count()),
      ModelSpec::dpam(2, 1.0),
      ModelSpec::dswm(2, 1.5, 0.6),
  };
  for (const auto& spec : specs) {
    for (int trial = 0; trial < 8; ++trial) {
      const auto y = sample_labels(5, rng);
      const auto g = sample_graph(spec, 5, y, rng, nullptr, nullptr, &tau);
      LikelihoodOptions opts;
      opts.tau = &tau;
      const auto got = map_recover(spec, g, opts);
      const auto brute = brute_force_map(spec, g, 0.0, opts);
      REQUIRE(got.y_hat.order_value() == brute.value);
      REQUIRE(got.ties == brute.ties);
    }
  }
}

TEST_CASE("strong-signal sbm recovers up to flip") {
  std::size_t flips = 0;
  const std::size_t trials = 50;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(Seed{67, t});
    const auto y = sample_labels(10, rng);
    const auto g = sample_sbm(10, 0.9, 0.1, y, rng);
    const auto r = map_recover(ModelSpec::sbm(0.9, 0.1), g);
    flips += static_cast<std::size_t>(flip_error(r.y_hat, y));
  }
  CHECK(static_cast<double>(flips) / static_cast<double>(trials) < 0.10);
}

TEST_CASE("lsm recovery modes are recorded and mc mode runs") {
  const auto spec = ModelSpec::lsm(2, {1.5, 0.0}, 0.3);
  const auto y = LabelVector::of_ints({1, 1, -1, -1});
  const auto g = sample_lsm(4, 2, {1.5, 0.0}, 0.3, y, Seed{68, 0}).graph;
  const auto surrogate = map_recover(spec, g);
  CHECK(surrogate.mode == "lsm-surrogate");
  LikelihoodOptions opts;
  opts.lsm_mode = LsmLikelihoodMode::mc_marginal;
  opts.mc_latent_draws = 256;
  opts.mc_seed = Seed{68, 1};
  const auto mc = map_recover(spec, g, opts);
  CHECK(mc.mode == "lsm-mc(256)");
  // both modes see the strong separation
  CHECK(flip_error(surrogate.y_hat, y) == 0);
  CHECK(flip_error(mc.y_hat, y) == 0);
  // mc marginal likelihood is reproducible given the seed
  CHECK(log_likelihood(spec, y, g, opts) == log_likelihood(spec, y, g, opts));
}

TEST_CASE("search guard") {
  Graph g(21, false);
  CHECK_THROWS_AS(map_recover(ModelSpec::sbm(0.6, 0.4), g), TooLargeError);
}

TEST_CASE("error metrics") {
  const auto y = LabelVector::of_ints({1, -1, 1});
  CHECK(exact_error(y, y) == 0);
  CHECK(flip_error(y, y) == 0);
  CHECK(exact_error(y.flipped(), y) == 1);
  CHECK(flip_error(y.flipped(), y) == 0);
  const auto off = LabelVector::of_ints({1, -1, -1});
  CHECK(exact_error(off, y) == 1);
  CHECK(flip_error(off, y) == 1);
  CHECK_THROWS_AS(exact_error(LabelVector::of_ints({1, -1}), y), LengthMismatchError);
  CHECK_THROWS_AS(flip_error(LabelVector::of_ints({1, -1}), y), LengthMismatchError);
}

TEST_CASE("sampled edge parameters replay exactly through the evaluator") {
  Rng rng(Seed{69, 0});
  const auto tau = PredecessorSet::full(7);
  const std::vector<double> mu = {1.0, 0.0};
  struct Case {
    ModelSpec spec;
    bool uses_tau;
  };
  const std::vector<Case> cases = {
      {ModelSpec::sbm(0.7, 0.2), false},
      {ModelSpec::ergm(1.1), false},
      {ModelSpec::dsbm(0.7, 0.2, Modifier::geometric(0.6, 0.05)), true},
      {ModelSpec::dpam(3, 1.2), false},
      {ModelSpec::dswm(3, 0.7, 0.55), false},
  };
  for (const auto& c : cases) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto y = sample_labels(7, rng);
      EdgeTrace trace;
      const auto g = sample_graph(c.spec, 7, y, rng, nullptr, &trace, c.uses_tau ? &tau : nullptr);
      const auto replay = edge_parameter_trace(c.spec, y, g, c.uses_tau ? &tau : nullptr);
      if (c.spec.directed()) {
        // the sampler trace covers columns >= m; the replay covers all pairs
        const auto pairs = generation_pairs(7, true);
        const std::size_t m = c.spec.kind() == ModelKind::Dpam ? c.spec.get<DpamParams>().m
                                                               : c.spec.get<DswmParams>().m;
        std::size_t k = 0;
        for (std::size_t e = 0; e < pairs.size(); ++e) {
          if (pairs[e].second < m) {
            REQUIRE(replay[e] == 0.0);
          } else {
            REQUIRE(replay[e] == trace.params[k++]);
          }
        }
        REQUIRE(k == trace.params.size());
      } else {
        REQUIRE(replay == trace.params);
      }
    }
  }
}
