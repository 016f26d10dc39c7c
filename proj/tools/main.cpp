// netlimits CLI: sample the network models, evaluate non-recoverability
// thresholds, compute KL/MI quantities, run MAP recovery, and drive sweeps.
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netlimits/netlimits.hpp"

namespace nl = netlimits;

namespace {

struct ModelFlags {
  std::string model;
  double p = 0.6;
  double q = 0.4;
  double beta = 1.0;
  std::size_t d = 2;
  std::string mu = "1,0";
  double sigma = 0.5;
  std::size_t m = 2;
  double s = 1.0;
  double p_mix = 0.5;
  std::string modifier = "ones";
  double mod_c = 1.0;
  double gamma = 0.5;
  double f_min = 0.05;
  std::string tau = "full";
  std::size_t window = 1;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--model", f.model, "sbm|ergm|lsm|dsbm|dlsm|dpam|dswm")->required();
  cmd->add_option("--p", f.p, "within-community edge probability");
  cmd->add_option("--q", f.q, "cross-community edge probability");
  cmd->add_option("--beta", f.beta, "ERGM potential strength");
  cmd->add_option("--d", f.d, "latent dimension");
  cmd->add_option("--mu", f.mu, "latent mean, comma separated");
  cmd->add_option("--sigma", f.sigma, "latent standard deviation");
  cmd->add_option("--m", f.m, "expected in-neighbors");
  cmd->add_option("--s", f.s, "homophily parameter");
  cmd->add_option("--p-mix", f.p_mix, "small-world mixture parameter");
  cmd->add_option("--modifier", f.modifier, "ones|constant|geometric|inverse_count");
  cmd->add_option("--mod-c", f.mod_c, "constant modifier value");
  cmd->add_option("--gamma", f.gamma, "geometric modifier decay");
  cmd->add_option("--f-min", f.f_min, "geometric modifier floor");
  cmd->add_option("--tau", f.tau, "predecessor set: full|window");
  cmd->add_option("--window", f.window, "window width for --tau window");
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

nl::LabelVector parse_labels(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return nl::LabelVector::of_ints(out);
}

nl::Modifier build_modifier(const ModelFlags& f) {
  if (f.modifier == "ones") return nl::Modifier::ones();
  if (f.modifier == "constant") return nl::Modifier::constant(f.mod_c);
  if (f.modifier == "geometric") return nl::Modifier::geometric(f.gamma, f.f_min);
  if (f.modifier == "inverse_count") return nl::Modifier::inverse_count();
  throw nl::RangeError("unknown modifier '" + f.modifier + "'");
}

nl::ModelSpec build_spec(const ModelFlags& f) {
  if (f.model == "sbm") return nl::ModelSpec::sbm(f.p, f.q);
  if (f.model == "ergm") return nl::ModelSpec::ergm(f.beta);
  if (f.model == "lsm") return nl::ModelSpec::lsm(f.d, parse_doubles(f.mu), f.sigma);
  if (f.model == "dsbm") return nl::ModelSpec::dsbm(f.p, f.q, build_modifier(f));
  if (f.model == "dlsm") return nl::ModelSpec::dlsm(f.d, parse_doubles(f.mu), f.sigma, build_modifier(f));
  if (f.model == "dpam") return nl::ModelSpec::dpam(f.m, f.s);
  if (f.model == "dswm") return nl::ModelSpec::dswm(f.m, f.s, f.p_mix);
  throw nl::RangeError("unknown model '" + f.model + "'");
}

std::optional<nl::PredecessorSet> build_tau(const ModelFlags& f, std::size_t n) {
  if (f.tau == "full") return std::nullopt;  // samplers default to full
  if (f.tau == "window") return nl::PredecessorSet::window(n, f.window);
  throw nl::RangeError("unknown tau '" + f.tau + "'");
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw nl::IOError("cannot open '" + out_path + "' for writing");
  file << text;
  if (!file) throw nl::IOError("write to '" + out_path + "' failed");
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::stringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  std::ifstream file(path, std::ios::binary);
  if (!file) throw nl::IOError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

void require_json_format(const std::string& format) {
  if (!format.empty() && format != "json")
    throw nl::RangeError("this subcommand only emits json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulator and verification toolkit for generative network models and their "
               "information-theoretic recovery limits"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::uint64_t seed = 0;
  std::string out_path;
  std::string format;
  app.add_option("--seed", seed, "master seed")->capture_default_str();
  app.add_option("--out", out_path, "output path (default: stdout)");
  app.add_option("--format", format, "csv|json (sweep only; others emit json)");

  ModelFlags flags;
  std::size_t n = 10;
  std::string labels_arg;
  std::string yprime_arg;
  std::string graph_path;
  std::string latent_out;
  std::string config_path;
  std::string mode = "surrogate";
  std::size_t mc_draws = 512;
  std::size_t samples = 1000000;

  auto* sample = app.add_subcommand("sample", "sample labels and a graph, emit graph json");
  add_model_flags(sample, flags);
  sample->add_option("--n", n, "node count")->required();
  sample->add_option("--labels", labels_arg, "fixed labels, e.g. 1,1,-1 (default: sampled)");
  sample->add_option("--latent-out", latent_out, "write the latent matrix sidecar here");

  auto* threshold = app.add_subcommand("threshold", "evaluate the non-recoverability condition");
  add_model_flags(threshold, flags);
  threshold->add_option("--n", n, "node count")->required();

  auto* kl = app.add_subcommand("kl", "KL divergence between two labelings' graph laws");
  add_model_flags(kl, flags);
  kl->add_option("--y", labels_arg, "first labeling")->required();
  kl->add_option("--yprime", yprime_arg, "second labeling")->required();

  auto* mi = app.add_subcommand("mi", "plug-in mutual information and pairwise-KL bound");
  add_model_flags(mi, flags);
  mi->add_option("--n", n, "node count")->required();

  auto* moment = app.add_subcommand("moment-check", "Monte-Carlo check of the latent edge moments");
  moment->add_option("--d", flags.d, "latent dimension")->required();
  moment->add_option("--mu", flags.mu, "latent mean, comma separated")->required();
  moment->add_option("--sigma", flags.sigma, "latent standard deviation")->required();
  moment->add_option("--samples", samples, "Monte-Carlo sample count")->capture_default_str();

  auto* recover = app.add_subcommand("recover", "brute-force MAP label recovery from a graph json");
  add_model_flags(recover, flags);
  recover->add_option("--graph", graph_path, "graph json path, or - for stdin")->required();
  recover->add_option("--mode", mode, "latent likelihood: surrogate|mc")->capture_default_str();
  recover->add_option("--mc-draws", mc_draws, "latent draws for --mode mc")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "run a config-driven parameter sweep");
  sweep->add_option("--config", config_path, "experiment config json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*sample) {
      require_json_format(format);
      const nl::ModelSpec spec = build_spec(flags);
      const auto tau = build_tau(flags, n);
      nl::Rng rng(nl::Seed{seed, 0});
      const nl::LabelVector y =
          labels_arg.empty() ? nl::sample_labels(n, rng) : parse_labels(labels_arg);
      nl::LatentMatrix latent;
      const nl::Graph g = nl::sample_graph(spec, n, y, rng, &latent, nullptr,
                                           tau ? &*tau : nullptr);
      write_output(nl::serialize_graph(g, y) + "\n", out_path);
      if (!latent_out.empty()) {
        if (!spec.latent()) throw nl::RangeError("--latent-out needs a latent model");
        std::ofstream file(latent_out, std::ios::binary);
        if (!file) throw nl::IOError("cannot open '" + latent_out + "' for writing");
        file << nl::latent_to_json(latent).dump() << '\n';
      }
    } else if (*threshold) {
      require_json_format(format);
      const auto report = nl::threshold_for(build_spec(flags), n);
      nl::OrderedJson j;
      j["model"] = report.model;
      j["lhs"] = report.lhs;
      j["rhs"] = report.rhs;
      j["nonrecoverable"] = report.nonrecoverable;
      j["nonrecoverable_strict"] = report.nonrecoverable_strict;
      write_output(j.dump() + "\n", out_path);
    } else if (*kl) {
      require_json_format(format);
      const nl::LabelVector y = parse_labels(labels_arg);
      const nl::LabelVector yp = parse_labels(yprime_arg);
      const auto tau = build_tau(flags, y.size());
      const double v = nl::kl_graph(build_spec(flags), y, yp, tau ? &*tau : nullptr);
      nl::OrderedJson j;
      j["kl"] = v;
      write_output(j.dump() + "\n", out_path);
    } else if (*mi) {
      require_json_format(format);
      const nl::ModelSpec spec = build_spec(flags);
      const auto tau = build_tau(flags, n);
      const auto est = nl::mi_plugin(spec, n, tau ? &*tau : nullptr);
      nl::OrderedJson j;
      j["value"] = est.value;
      j["method"] = est.method;
      j["std_error"] = est.std_error;
      try {
        j["pairwise_upper"] = nl::mi_pairwise_upper(spec, n);
      } catch (const nl::UnsupportedSpecError&) {
        j["pairwise_upper"] = nullptr;
      }
      j["fano_lower_bound"] = nl::fano_lower_bound(std::max(0.0, est.value), n);
      write_output(j.dump() + "\n", out_path);
    } else if (*moment) {
      require_json_format(format);
      const auto mu = parse_doubles(flags.mu);
      nl::OrderedJson j;
      const char* names[2] = {"same", "cross"};
      for (int same = 1; same >= 0; --same) {
        const auto est = nl::mc_moment_check(flags.d, mu, flags.sigma, same != 0, samples,
                                             nl::Seed{seed, same ? 1u : 2u});
        nl::OrderedJson entry;
        entry["estimate"] = est.estimate;
        entry["std_error"] = est.std_error;
        entry["closed_form"] = nl::lsm_edge_moment(flags.d, mu, flags.sigma, same != 0);
        j[names[same ? 0 : 1]] = entry;
      }
      write_output(j.dump() + "\n", out_path);
    } else if (*recover) {
      require_json_format(format);
      const nl::ModelSpec spec = build_spec(flags);
      const auto parsed = nl::deserialize_graph(read_input(graph_path));
      const auto tau = build_tau(flags, parsed.graph.node_count());
      nl::LikelihoodOptions opts;
      if (mode == "mc") {
        opts.lsm_mode = nl::LsmLikelihoodMode::mc_marginal;
      } else if (mode != "surrogate") {
        throw nl::RangeError("--mode must be surrogate or mc");
      }
      opts.mc_latent_draws = mc_draws;
      opts.mc_seed = nl::Seed{seed, 0x6d636c6174656e74ull};
      opts.tau = tau ? &*tau : nullptr;
      const auto result = nl::map_recover(spec, parsed.graph, opts);
      nl::OrderedJson j;
      auto y_hat = nl::OrderedJson::array();
      for (auto v : result.y_hat.data()) y_hat.push_back(static_cast<int>(v));
      j["y_hat"] = y_hat;
      j["log_posterior"] = result.log_posterior;
      j["ties"] = result.ties;
      j["mode"] = result.mode;
      write_output(j.dump() + "\n", out_path);
    } else if (*sweep) {
      nl::OrderedJson cfg_json;
      try {
        cfg_json = nl::OrderedJson::parse(read_input(config_path));
      } catch (const nlohmann::json::exception& e) {
        throw nl::ParseError(std::string("config: ") + e.what());
      }
      nl::ExperimentConfig cfg = nl::config_from_json(cfg_json);
      if (!out_path.empty()) cfg.out = out_path;
      if (!format.empty()) cfg.format = format;
      const nl::SweepResult result = nl::run_sweep(cfg);
      const bool json = cfg.format == "json";
      const std::string text = json ? nl::sweep_to_json(result).dump() + "\n" : nl::sweep_to_csv(result);
      write_output(text, cfg.out);
    }
  } catch (const nl::IOError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
