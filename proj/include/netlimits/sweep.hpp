#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "netlimits/core.hpp"
#include "netlimits/info_metrics.hpp"
#include "netlimits/model_spec.hpp"
#include "netlimits/recovery.hpp"
#include "netlimits/samplers.hpp"
#include "netlimits/serialize.hpp"
#include "netlimits/thresholds.hpp"

namespace netlimits {

struct SweepAxis {
  std::string param;
  std::vector<double> values;
};

enum class SweepMetric { Recovery, MeanInDegree, MutualInformation };

struct TauConfig {
  bool windowed = false;
  std::size_t w = 0;
};

// Declarative sweep description: a model template, a cartesian grid over
// scalar model parameters, and Monte-Carlo trial settings.
struct ExperimentConfig {
  ModelSpec model;
  std::size_t n;
  std::vector<SweepAxis> axes;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::vector<SweepMetric> metrics = {SweepMetric::Recovery};
  LsmLikelihoodMode recovery_mode = LsmLikelihoodMode::surrogate;
  std::size_t mc_latent_draws = 512;
  std::optional<TauConfig> tau;
  std::string out;     // optional output path
  std::string format;  // "csv" (default) or "json"
};

struct WilsonInterval {
  double lo;
  double hi;
};

// Wilson 95% score interval for a binomial rate.
inline WilsonInterval wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) throw RangeError("wilson_interval: trials >= 1 required");
  constexpr double z = 1.959963984540054;
  const double nT = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / nT;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nT;
  const double center = (phat + z2 / (2.0 * nT)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / nT + z2 / (4.0 * nT * nT)) / denom;
  // the score interval touches the boundary exactly at 0/n and n/n
  const double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

using SweepValue = std::variant<std::monostate, double, std::int64_t, bool, std::string>;

struct SweepResult {
  std::vector<std::string> columns;
  std::vector<std::vector<SweepValue>> rows;
};

namespace detail {

inline std::vector<std::string> sweepable_params(ModelKind kind) {
  switch (kind) {
    case ModelKind::Sbm:
    case ModelKind::Dsbm: return {"p", "q"};
    case ModelKind::Ergm: return {"beta"};
    case ModelKind::Lsm:
    case ModelKind::Dlsm: return {"sigma"};
    case ModelKind::Dpam: return {"m", "s"};
    case ModelKind::Dswm: return {"m", "s", "p_mix"};
  }
  return {};
}

inline ModelSpec with_param(const ModelSpec& spec, const std::string& name, double value) {
  auto integral = [&]() {
    if (value < 1.0 || value != std::floor(value))
      throw RangeError("sweep: parameter '" + name + "' must be a positive integer");
    return static_cast<std::size_t>(value);
  };
  switch (spec.kind()) {
    case ModelKind::Sbm: {
      auto p = spec.get<SbmParams>();
      if (name == "p") return ModelSpec::sbm(value, p.q);
      if (name == "q") return ModelSpec::sbm(p.p, value);
      break;
    }
    case ModelKind::Ergm:
      if (name == "beta") return ModelSpec::ergm(value);
      break;
    case ModelKind::Lsm: {
      auto p = spec.get<LsmParams>();
      if (name == "sigma") return ModelSpec::lsm(p.d, p.mu, value);
      break;
    }
    case ModelKind::Dsbm: {
      auto p = spec.get<DsbmParams>();
      if (name == "p") return ModelSpec::dsbm(value, p.q, p.modifier);
      if (name == "q") return ModelSpec::dsbm(p.p, value, p.modifier);
      break;
    }
    case ModelKind::Dlsm: {
      auto p = spec.get<DlsmParams>();
      if (name == "sigma") return ModelSpec::dlsm(p.d, p.mu, value, p.modifier);
      break;
    }
    case ModelKind::Dpam: {
      auto p = spec.get<DpamParams>();
      if (name == "m") return ModelSpec::dpam(integral(), p.s);
      if (name == "s") return ModelSpec::dpam(p.m, value);
      break;
    }
    case ModelKind::Dswm: {
      auto p = spec.get<DswmParams>();
      if (name == "m") return ModelSpec::dswm(integral(), p.s, p.p_mix);
      if (name == "s") return ModelSpec::dswm(p.m, value, p.p_mix);
      if (name == "p_mix") return ModelSpec::dswm(p.m, p.s, value);
      break;
    }
  }
  throw RangeError("sweep: parameter '" + name + "' does not exist on model '" +
                   std::string(spec.name()) + "'");
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Scalar parameter columns echoed into every row, canonical per model.
inline std::vector<std::pair<std::string, SweepValue>> param_columns(const ModelSpec& spec) {
  std::vector<std::pair<std::string, SweepValue>> out;
  switch (spec.kind()) {
    case ModelKind::Sbm: {
      const auto& p = spec.get<SbmParams>();
      out = {{"p", p.p}, {"q", p.q}};
      break;
    }
    case ModelKind::Ergm:
      out = {{"beta", spec.get<ErgmParams>().beta}};
      break;
    case ModelKind::Lsm: {
      const auto& p = spec.get<LsmParams>();
      out = {{"d", static_cast<std::int64_t>(p.d)}, {"sigma", p.sigma},
             {"mu_norm", std::sqrt(p.mu_norm_sq())}};
      break;
    }
    case ModelKind::Dsbm: {
      const auto& p = spec.get<DsbmParams>();
      out = {{"p", p.p}, {"q", p.q}, {"modifier", p.modifier.name()}};
      break;
    }
    case ModelKind::Dlsm: {
      const auto& p = spec.get<DlsmParams>();
      out = {{"d", static_cast<std::int64_t>(p.d)}, {"sigma", p.sigma},
             {"mu_norm", std::sqrt(p.mu_norm_sq())}, {"modifier", p.modifier.name()}};
      break;
    }
    case ModelKind::Dpam: {
      const auto& p = spec.get<DpamParams>();
      out = {{"m", static_cast<std::int64_t>(p.m)}, {"s", p.s}};
      break;
    }
    case ModelKind::Dswm: {
      const auto& p = spec.get<DswmParams>();
      out = {{"m", static_cast<std::int64_t>(p.m)}, {"s", p.s}, {"p_mix", p.p_mix}};
      break;
    }
  }
  return out;
}

}  // namespace detail

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.n < 2) throw RangeError("config: n >= 2 required");
  if (cfg.trials < 1) throw RangeError("config: trials >= 1 required");
  if (cfg.axes.empty()) throw RangeError("config: sweep grid must be non-empty");
  const auto allowed = detail::sweepable_params(cfg.model.kind());
  for (const auto& axis : cfg.axes) {
    if (axis.values.empty()) throw RangeError("config: axis '" + axis.param + "' has no values");
    bool ok = false;
    for (const auto& a : allowed) ok = ok || a == axis.param;
    if (!ok)
      throw RangeError("config: parameter '" + axis.param + "' does not exist on model '" +
                       std::string(cfg.model.name()) + "'");
  }
  for (auto metric : cfg.metrics) {
    if (metric == SweepMetric::MeanInDegree && !cfg.model.directed())
      throw RangeError("config: mean_in_degree metric needs a directed model");
  }
  if (!cfg.format.empty() && cfg.format != "csv" && cfg.format != "json")
    throw RangeError("config: format must be csv or json");
}

// Runs the full grid. Stream-id for trial t of a grid cell is
// h(cell, t) = fnv1a64("p=<v>;q=<v>") ^ t over the cell's axis assignment
// (axis order, %.17g values), so any single cell rerun in isolation
// reproduces its aggregate exactly. Cell failures are recorded in an `error`
// column and never abort the sweep. Every column except `seconds` is
// deterministic given the config.
inline SweepResult run_sweep(const ExperimentConfig& cfg) {
  validate_config(cfg);

  const bool want_recovery =
      std::find(cfg.metrics.begin(), cfg.metrics.end(), SweepMetric::Recovery) != cfg.metrics.end();
  const bool want_indegree = std::find(cfg.metrics.begin(), cfg.metrics.end(),
                                       SweepMetric::MeanInDegree) != cfg.metrics.end();
  const bool want_mi = std::find(cfg.metrics.begin(), cfg.metrics.end(),
                                 SweepMetric::MutualInformation) != cfg.metrics.end();

  PredecessorSet tau_storage;
  const PredecessorSet* tau = nullptr;
  if (cfg.tau) {
    tau_storage = cfg.tau->windowed ? PredecessorSet::window(cfg.n, cfg.tau->w)
                                    : PredecessorSet::full(cfg.n);
    tau = &tau_storage;
  }

  // Cartesian grid, last axis fastest.
  std::size_t grid_size = 1;
  for (const auto& axis : cfg.axes) grid_size *= axis.values.size();

  SweepResult result;
  bool any_error = false;
  std::vector<std::string> errors;

  for (std::size_t cell = 0; cell < grid_size; ++cell) {
    const auto t0 = std::chrono::steady_clock::now();

    std::size_t rest = cell;
    std::vector<std::pair<std::string, double>> assignment(cfg.axes.size());
    for (std::size_t a = cfg.axes.size(); a-- > 0;) {
      const auto& axis = cfg.axes[a];
      assignment[a] = {axis.param, axis.values[rest % axis.values.size()]};
      rest /= axis.values.size();
    }

    std::string cell_key;
    for (const auto& [name, value] : assignment) {
      if (!cell_key.empty()) cell_key += ';';
      cell_key += name + "=" + detail::format_double(value);
    }
    const std::uint64_t cell_hash = fnv1a64(cell_key);

    std::string error;
    std::optional<ModelSpec> spec;
    std::optional<ThresholdReport> threshold;
    std::optional<double> exact_rate, exact_lo, exact_hi, flip_rate, flip_lo, flip_hi;
    std::optional<double> indeg_mean, indeg_se;
    std::optional<double> mi_value, mi_upper;

    try {
      ModelSpec concrete = cfg.model;
      for (const auto& [name, value] : assignment) {
        concrete = detail::with_param(concrete, name, value);
      }
      validate_spec(concrete, cfg.n);
      spec = concrete;
      threshold = threshold_for(concrete, cfg.n);

      if (want_recovery || want_indegree) {
        std::size_t exact_errors = 0;
        std::size_t flip_errors = 0;
        std::vector<double> per_trial_indegree;
        LikelihoodOptions opts;
        opts.lsm_mode = cfg.recovery_mode;
        opts.mc_latent_draws = cfg.mc_latent_draws;
        opts.tau = tau;
        for (std::size_t t = 0; t < cfg.trials; ++t) {
          const std::uint64_t stream = cell_hash ^ static_cast<std::uint64_t>(t);
          Rng rng(Seed{cfg.seed, stream});
          const LabelVector labels = sample_labels(cfg.n, rng);
          const Graph g = sample_graph(concrete, cfg.n, labels, rng, nullptr, nullptr, tau);
          if (want_indegree) {
            const std::size_t m = concrete.kind() == ModelKind::Dpam
                                      ? concrete.get<DpamParams>().m
                                      : concrete.get<DswmParams>().m;
            double sum = 0.0;
            for (std::size_t i = m; i < cfg.n; ++i) sum += static_cast<double>(g.in_degree(i));
            per_trial_indegree.push_back(sum / static_cast<double>(cfg.n - m));
          }
          if (want_recovery) {
            opts.mc_seed = Seed{cfg.seed, stream ^ 0x6d636c6174656e74ull};
            const RecoveryResult r = map_recover(concrete, g, opts);
            exact_errors += static_cast<std::size_t>(exact_error(r.y_hat, labels));
            flip_errors += static_cast<std::size_t>(flip_error(r.y_hat, labels));
          }
        }
        if (want_recovery) {
          const double nT = static_cast<double>(cfg.trials);
          exact_rate = static_cast<double>(exact_errors) / nT;
          flip_rate = static_cast<double>(flip_errors) / nT;
          const auto we = wilson_interval(exact_errors, cfg.trials);
          const auto wf = wilson_interval(flip_errors, cfg.trials);
          exact_lo = we.lo;
          exact_hi = we.hi;
          flip_lo = wf.lo;
          flip_hi = wf.hi;
        }
        if (want_indegree) {
          double mean = 0.0;
          for (double v : per_trial_indegree) mean += v;
          mean /= static_cast<double>(per_trial_indegree.size());
          double var = 0.0;
          for (double v : per_trial_indegree) var += (v - mean) * (v - mean);
          var = per_trial_indegree.size() > 1
                    ? var / static_cast<double>(per_trial_indegree.size() - 1)
                    : 0.0;
          indeg_mean = mean;
          indeg_se = std::sqrt(var / static_cast<double>(per_trial_indegree.size()));
        }
      }

      if (want_mi) {
        mi_value = mi_plugin(concrete, cfg.n, tau).value;
        try {
          mi_upper = mi_pairwise_upper(concrete, cfg.n);
        } catch (const UnsupportedSpecError&) {
          // directed models carry no closed-form bound; leave the column empty
        }
      }
    } catch (const Error& e) {
      error = e.what();
      any_error = true;
    }

    const auto t1 = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(t1 - t0).count();

    // Assemble the row; the column list is fixed by the first row.
    std::vector<std::pair<std::string, SweepValue>> row;
    const ModelSpec& for_params = spec ? *spec : cfg.model;
    for (auto& pc : detail::param_columns(for_params)) row.push_back(std::move(pc));
    // Echo swept values even when the concrete spec failed to construct.
    if (!spec) {
      for (const auto& [name, value] : assignment) {
        for (auto& [col, val] : row) {
          if (col == name) val = value;
        }
      }
    }
    row.emplace_back("n", static_cast<std::int64_t>(cfg.n));
    row.emplace_back("lhs", threshold ? SweepValue{threshold->lhs} : SweepValue{});
    row.emplace_back("rhs", threshold ? SweepValue{threshold->rhs} : SweepValue{});
    row.emplace_back("nonrecoverable",
                     threshold ? SweepValue{threshold->nonrecoverable} : SweepValue{});
    if (want_recovery) {
      row.emplace_back("exact_err", exact_rate ? SweepValue{*exact_rate} : SweepValue{});
      row.emplace_back("exact_err_lo", exact_lo ? SweepValue{*exact_lo} : SweepValue{});
      row.emplace_back("exact_err_hi", exact_hi ? SweepValue{*exact_hi} : SweepValue{});
      row.emplace_back("flip_err", flip_rate ? SweepValue{*flip_rate} : SweepValue{});
      row.emplace_back("flip_err_lo", flip_lo ? SweepValue{*flip_lo} : SweepValue{});
      row.emplace_back("flip_err_hi", flip_hi ? SweepValue{*flip_hi} : SweepValue{});
    }
    if (want_indegree) {
      row.emplace_back("mean_in_degree", indeg_mean ? SweepValue{*indeg_mean} : SweepValue{});
      row.emplace_back("mean_in_degree_se", indeg_se ? SweepValue{*indeg_se} : SweepValue{});
    }
    if (want_mi) {
      row.emplace_back("mi", mi_value ? SweepValue{*mi_value} : SweepValue{});
      row.emplace_back("mi_upper", mi_upper ? SweepValue{*mi_upper} : SweepValue{});
    }
    row.emplace_back("trials", static_cast<std::int64_t>(cfg.trials));
    row.emplace_back("seconds", seconds);

    if (result.columns.empty()) {
      for (const auto& [col, _] : row) result.columns.push_back(col);
    }
    std::vector<SweepValue> values;
    values.reserve(row.size());
    for (auto& [_, val] : row) values.push_back(std::move(val));
    result.rows.push_back(std::move(values));
    errors.push_back(std::move(error));
  }

  if (any_error) {
    result.columns.emplace_back("error");
    for (std::size_t r = 0; r < result.rows.size(); ++r) {
      result.rows[r].push_back(errors[r].empty() ? SweepValue{} : SweepValue{errors[r]});
    }
  }
  return result;
}

namespace detail {

// Floats print with 9 significant digits.
inline std::string sweep_value_string(const SweepValue& v) {
  if (std::holds_alternative<std::monostate>(v)) return "";
  if (std::holds_alternative<double>(v)) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", std::get<double>(v));
    return buf;
  }
  if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
  return std::get<std::string>(v);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline std::string sweep_to_csv(const SweepResult& r) {
  std::string out;
  for (std::size_t c = 0; c < r.columns.size(); ++c) {
    if (c) out += ',';
    out += detail::csv_escape(r.columns[c]);
  }
  out += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += detail::csv_escape(detail::sweep_value_string(row[c]));
    }
    out += '\n';
  }
  return out;
}

inline OrderedJson sweep_to_json(const SweepResult& r) {
  auto rows = OrderedJson::array();
  for (const auto& row : r.rows) {
    OrderedJson obj;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto& v = row[c];
      if (std::holds_alternative<std::monostate>(v)) {
        obj[r.columns[c]] = nullptr;
      } else if (std::holds_alternative<double>(v)) {
        obj[r.columns[c]] = std::get<double>(v);
      } else if (std::holds_alternative<std::int64_t>(v)) {
        obj[r.columns[c]] = std::get<std::int64_t>(v);
      } else if (std::holds_alternative<bool>(v)) {
        obj[r.columns[c]] = std::get<bool>(v);
      } else {
        obj[r.columns[c]] = std::get<std::string>(v);
      }
    }
    rows.push_back(std::move(obj));
  }
  return rows;
}

inline void emit_csv(const SweepResult& r, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IOError("cannot open '" + path + "' for writing");
  f << sweep_to_csv(r);
  if (!f) throw IOError("write to '" + path + "' failed");
}

inline void emit_json(const SweepResult& r, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IOError("cannot open '" + path + "' for writing");
  f << sweep_to_json(r).dump() << '\n';
  if (!f) throw IOError("write to '" + path + "' failed");
}

// Strict config parser: unknown keys are rejected everywhere.
inline ExperimentConfig config_from_json(const OrderedJson& j) {
  static const std::vector<std::string> keys = {"model", "n",       "sweep",        "trials",
                                                "seed",  "metrics", "recovery_mode", "mc_latent_draws",
                                                "tau",   "out",     "format"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ParseError("config: unknown key '" + key + "'");
  }
  for (const char* req : {"model", "n", "sweep", "trials", "seed"}) {
    if (!j.contains(req)) throw ParseError(std::string("config: missing key '") + req + "'");
  }
  ExperimentConfig cfg{spec_from_json(j.at("model")),
                       j.at("n").get<std::size_t>(),
                       {},
                       j.at("trials").get<std::size_t>(),
                       j.at("seed").get<std::uint64_t>(),
                       {SweepMetric::Recovery},
                       LsmLikelihoodMode::surrogate,
                       512,
                       std::nullopt,
                       "",
                       ""};
  for (const auto& axis : j.at("sweep")) {
    for (const auto& [key, _] : axis.items()) {
      if (key != "param" && key != "values") throw ParseError("config: unknown key '" + key + "' in sweep axis");
    }
    cfg.axes.push_back({axis.at("param").get<std::string>(),
                        axis.at("values").get<std::vector<double>>()});
  }
  if (j.contains("metrics")) {
    cfg.metrics.clear();
    for (const auto& m : j.at("metrics")) {
      const std::string name = m.get<std::string>();
      if (name == "recovery") {
        cfg.metrics.push_back(SweepMetric::Recovery);
      } else if (name == "mean_in_degree") {
        cfg.metrics.push_back(SweepMetric::MeanInDegree);
      } else if (name == "mi") {
        cfg.metrics.push_back(SweepMetric::MutualInformation);
      } else {
        throw ParseError("config: unknown metric '" + name + "'");
      }
    }
  }
  if (j.contains("recovery_mode")) {
    const std::string mode = j.at("recovery_mode").get<std::string>();
    if (mode == "surrogate") {
      cfg.recovery_mode = LsmLikelihoodMode::surrogate;
    } else if (mode == "mc") {
      cfg.recovery_mode = LsmLikelihoodMode::mc_marginal;
    } else {
      throw ParseError("config: recovery_mode must be surrogate or mc");
    }
  }
  if (j.contains("mc_latent_draws")) cfg.mc_latent_draws = j.at("mc_latent_draws").get<std::size_t>();
  if (j.contains("tau")) {
    const auto& t = j.at("tau");
    for (const auto& [key, _] : t.items()) {
      if (key != "kind" && key != "w") throw ParseError("config: unknown key '" + key + "' in tau");
    }
    const std::string kind = t.at("kind").get<std::string>();
    if (kind == "full") {
      cfg.tau = TauConfig{false, 0};
    } else if (kind == "window") {
      cfg.tau = TauConfig{true, t.at("w").get<std::size_t>()};
    } else {
      throw ParseError("config: tau kind must be full or window");
    }
  }
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
  validate_config(cfg);
  return cfg;
}

}  // namespace netlimits
