#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "netlimits/core.hpp"
#include "netlimits/model_spec.hpp"
#include "netlimits/samplers.hpp"

namespace netlimits {

using OrderedJson = nlohmann::ordered_json;

// Graph wire format:
//   {"n": int, "directed": bool, "edges": [[i,j],...], "labels": [+-1,...] | null}
// Undirected edges appear once with i < j; a directed entry [j,i] is the edge
// j -> i. Edge lists are emitted lexicographically sorted.
inline OrderedJson graph_to_json(const Graph& g, const std::optional<LabelVector>& labels = std::nullopt) {
  g.validate();
  if (labels && labels->size() != g.node_count())
    throw LengthMismatchError("labels length != node count");
  OrderedJson j;
  j["n"] = g.node_count();
  j["directed"] = g.directed();
  auto edges = OrderedJson::array();
  for (const auto& [from, to] : g.edge_list()) edges.push_back({from, to});
  j["edges"] = std::move(edges);
  if (labels) {
    auto arr = OrderedJson::array();
    for (auto v : labels->data()) arr.push_back(static_cast<int>(v));
    j["labels"] = std::move(arr);
  } else {
    j["labels"] = nullptr;
  }
  return j;
}

inline std::string serialize_graph(const Graph& g, const std::optional<LabelVector>& labels = std::nullopt) {
  return graph_to_json(g, labels).dump();
}

struct DeserializedGraph {
  Graph graph;
  std::optional<LabelVector> labels;
};

inline DeserializedGraph graph_from_json(const OrderedJson& j) {
  for (const auto& [key, _] : j.items()) {
    if (key != "n" && key != "directed" && key != "edges" && key != "labels")
      throw ParseError("graph json: unknown key '" + key + "'");
  }
  if (!j.contains("n") || !j.contains("directed") || !j.contains("edges"))
    throw ParseError("graph json: required keys n, directed, edges");
  const std::size_t n = j.at("n").get<std::size_t>();
  Graph g(n, j.at("directed").get<bool>());
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw ParseError("graph json: edge must be a pair");
    const auto from = e.at(0).get<std::size_t>();
    const auto to = e.at(1).get<std::size_t>();
    if (!g.directed() && from >= to) throw ParseError("graph json: undirected edges need i < j");
    g.set_edge(from, to, true);
  }
  g.validate();
  std::optional<LabelVector> labels;
  if (j.contains("labels") && !j.at("labels").is_null()) {
    const auto raw = j.at("labels").get<std::vector<int>>();
    if (raw.size() != n) throw ParseError("graph json: labels length != n");
    try {
      labels = LabelVector::of_ints(raw);
    } catch (const RangeError& e) {
      throw ParseError(std::string("graph json: ") + e.what());
    }
  }
  return {std::move(g), std::move(labels)};
}

inline DeserializedGraph deserialize_graph(const std::string& text) {
  OrderedJson j;
  try {
    j = OrderedJson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("graph json: ") + e.what());
  }
  return graph_from_json(j);
}

// Latent sidecar: {"d": int, "z": [[...], ...]}
inline OrderedJson latent_to_json(const LatentMatrix& lat) {
  OrderedJson j;
  j["d"] = lat.d;
  auto rows = OrderedJson::array();
  for (std::size_t i = 0; i < lat.n; ++i) {
    auto row = OrderedJson::array();
    for (std::size_t k = 0; k < lat.d; ++k) row.push_back(lat.at(i, k));
    rows.push_back(std::move(row));
  }
  j["z"] = std::move(rows);
  return j;
}

// Model spec wire format, e.g. {"kind":"sbm","p":0.6,"q":0.4}; dynamic models
// add {"modifier":{"kind":"geometric","gamma":g,"f_min":f}}.
inline OrderedJson modifier_to_json(const Modifier& m) {
  // built-ins round-trip; custom modifiers are code-only
  OrderedJson j;
  switch (m.kind()) {
    case Modifier::Kind::Ones:
      j["kind"] = "ones";
      break;
    case Modifier::Kind::InverseCount:
      j["kind"] = "inverse_count";
      break;
    case Modifier::Kind::Constant:
      j["kind"] = "constant";
      j["c"] = m.constant_value();
      break;
    case Modifier::Kind::Geometric:
      j["kind"] = "geometric";
      j["gamma"] = m.gamma();
      j["f_min"] = m.f_min();
      break;
    case Modifier::Kind::Custom:
      throw UnsupportedSpecError("modifier '" + m.name() + "' has no json form");
  }
  return j;
}

inline Modifier modifier_from_json(const OrderedJson& j) {
  static const std::vector<std::string> keys = {"kind", "c", "gamma", "f_min"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ParseError("modifier json: unknown key '" + key + "'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "ones") return Modifier::ones();
  if (kind == "inverse_count") return Modifier::inverse_count();
  if (kind == "constant") return Modifier::constant(j.at("c").get<double>());
  if (kind == "geometric")
    return Modifier::geometric(j.at("gamma").get<double>(), j.at("f_min").get<double>());
  throw ParseError("modifier json: unknown kind '" + kind + "'");
}

inline OrderedJson spec_to_json(const ModelSpec& spec) {
  OrderedJson j;
  j["kind"] = spec.name();
  switch (spec.kind()) {
    case ModelKind::Sbm: {
      const auto& p = spec.get<SbmParams>();
      j["p"] = p.p;
      j["q"] = p.q;
      break;
    }
    case ModelKind::Ergm:
      j["beta"] = spec.get<ErgmParams>().beta;
      break;
    case ModelKind::Lsm: {
      const auto& p = spec.get<LsmParams>();
      j["d"] = p.d;
      j["mu"] = p.mu;
      j["sigma"] = p.sigma;
      break;
    }
    case ModelKind::Dsbm: {
      const auto& p = spec.get<DsbmParams>();
      j["p"] = p.p;
      j["q"] = p.q;
      j["modifier"] = modifier_to_json(p.modifier);
      break;
    }
    case ModelKind::Dlsm: {
      const auto& p = spec.get<DlsmParams>();
      j["d"] = p.d;
      j["mu"] = p.mu;
      j["sigma"] = p.sigma;
      j["modifier"] = modifier_to_json(p.modifier);
      break;
    }
    case ModelKind::Dpam: {
      const auto& p = spec.get<DpamParams>();
      j["m"] = p.m;
      j["s"] = p.s;
      break;
    }
    case ModelKind::Dswm: {
      const auto& p = spec.get<DswmParams>();
      j["m"] = p.m;
      j["s"] = p.s;
      j["p_mix"] = p.p_mix;
      break;
    }
  }
  return j;
}

inline ModelSpec spec_from_json(const OrderedJson& j) {
  auto require_keys = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : j.items()) {
      bool ok = key == "kind";
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) throw ParseError("model json: unknown key '" + key + "'");
    }
  };
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sbm") {
    require_keys({"p", "q"});
    return ModelSpec::sbm(j.at("p").get<double>(), j.at("q").get<double>());
  }
  if (kind == "ergm") {
    require_keys({"beta"});
    return ModelSpec::ergm(j.at("beta").get<double>());
  }
  if (kind == "lsm") {
    require_keys({"d", "mu", "sigma"});
    return ModelSpec::lsm(j.at("d").get<std::size_t>(), j.at("mu").get<std::vector<double>>(),
                          j.at("sigma").get<double>());
  }
  if (kind == "dsbm") {
    require_keys({"p", "q", "modifier"});
    return ModelSpec::dsbm(j.at("p").get<double>(), j.at("q").get<double>(),
                           modifier_from_json(j.at("modifier")));
  }
  if (kind == "dlsm") {
    require_keys({"d", "mu", "sigma", "modifier"});
    return ModelSpec::dlsm(j.at("d").get<std::size_t>(), j.at("mu").get<std::vector<double>>(),
                           j.at("sigma").get<double>(), modifier_from_json(j.at("modifier")));
  }
  if (kind == "dpam") {
    require_keys({"m", "s"});
    return ModelSpec::dpam(j.at("m").get<std::size_t>(), j.at("s").get<double>());
  }
  if (kind == "dswm") {
    require_keys({"m", "s", "p_mix"});
    return ModelSpec::dswm(j.at("m").get<std::size_t>(), j.at("s").get<double>(),
                           j.at("p_mix").get<double>());
  }
  throw ParseError("model json: unknown kind '" + kind + "'");
}

}  // namespace netlimits
