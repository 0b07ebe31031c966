#ifndef NETLEARN_CONFIG_HPP
#define NETLEARN_CONFIG_HPP

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "netlearn/experiment.hpp"

namespace netlearn {

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                                const std::string& where) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw std::runtime_error("config: unknown key '" + item.key() + "' in " + where);
}

inline TopologySpec parse_topology(const nlohmann::json& j) {
  reject_unknown_keys(j, {"kind", "p", "m_attach", "seed"}, "topology");
  TopologySpec spec;
  const std::string kind = j.value("kind", std::string("fc"));
  if (kind == "fc")
    spec.kind = TopologySpec::Kind::FullyConnected;
  else if (kind == "er")
    spec.kind = TopologySpec::Kind::ErdosRenyi;
  else if (kind == "ba")
    spec.kind = TopologySpec::Kind::BarabasiAlbert;
  else
    throw std::runtime_error("config: topology.kind must be fc|er|ba");
  spec.p = j.value("p", spec.p);
  spec.m_attach = j.value("m_attach", spec.m_attach);
  spec.seed = j.value("seed", spec.seed);
  return spec;
}

inline Hyperparams parse_hyperparams(const nlohmann::json& j, Hyperparams hp) {
  reject_unknown_keys(j,
                      {"lambda1", "lambda2", "lambda3", "m", "b_smooth", "newton_iters",
                       "jacobi_iters", "tol_dual", "tol_jacobi"},
                      "hyperparams");
  hp.lambda1 = j.value("lambda1", hp.lambda1);
  hp.lambda2 = j.value("lambda2", hp.lambda2);
  hp.lambda3 = j.value("lambda3", hp.lambda3);
  hp.m = j.value("m", hp.m);
  hp.b_smooth = j.value("b_smooth", hp.b_smooth);
  hp.newton_iters = j.value("newton_iters", hp.newton_iters);
  hp.jacobi_iters = j.value("jacobi_iters", hp.jacobi_iters);
  hp.tol_dual = j.value("tol_dual", hp.tol_dual);
  hp.tol_jacobi = j.value("tol_jacobi", hp.tol_jacobi);
  return hp;
}

}  // namespace detail

/// Parse an experiment config from JSON. Every key is optional (defaults
/// documented in the README); unknown keys are rejected.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(j,
                              {"scenario", "agents", "timestamps", "alternations", "variant",
                               "scenario_seed", "run_seed", "output", "topology", "hyperparams"},
                              "config root");
  ExperimentConfig cfg;
  cfg.scenario = j.value("scenario", cfg.scenario);
  cfg.n_agents = j.value("agents", cfg.n_agents);
  cfg.t_max = j.value("timestamps", cfg.t_max);
  cfg.alternations = j.value("alternations", cfg.alternations);
  if (j.contains("variant")) cfg.variant = parse_variant(j.at("variant").get<std::string>());
  cfg.scenario_seed = j.value("scenario_seed", cfg.scenario_seed);
  cfg.run_seed = j.value("run_seed", cfg.run_seed);
  cfg.output_path = j.value("output", cfg.output_path);
  if (j.contains("topology")) cfg.topology = detail::parse_topology(j.at("topology"));
  if (j.contains("hyperparams")) cfg.hp = detail::parse_hyperparams(j.at("hyperparams"), cfg.hp);
  validate_config(cfg);
  return cfg;
}

inline ExperimentConfig config_from_string(const std::string& text) {
  return config_from_json(nlohmann::json::parse(text));
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_string(buf.str());
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg0) {
  const ExperimentConfig cfg = resolve_config(cfg0);
  nlohmann::json j;
  j["scenario"] = cfg.scenario;
  j["agents"] = cfg.n_agents;
  j["timestamps"] = cfg.t_max;
  j["alternations"] = cfg.alternations;
  j["variant"] = variant_name(cfg.variant);
  j["scenario_seed"] = cfg.scenario_seed;
  j["run_seed"] = cfg.run_seed;
  if (!cfg.output_path.empty()) j["output"] = cfg.output_path;
  nlohmann::json topo;
  switch (cfg.topology.kind) {
    case TopologySpec::Kind::FullyConnected: topo["kind"] = "fc"; break;
    case TopologySpec::Kind::ErdosRenyi:
      topo["kind"] = "er";
      topo["p"] = cfg.topology.p;
      break;
    case TopologySpec::Kind::BarabasiAlbert:
      topo["kind"] = "ba";
      topo["m_attach"] = cfg.topology.m_attach;
      break;
  }
  topo["seed"] = cfg.topology.seed;
  j["topology"] = topo;
  j["hyperparams"] = {{"lambda1", cfg.hp.lambda1},       {"lambda2", cfg.hp.lambda2},
                      {"lambda3", cfg.hp.lambda3},       {"m", cfg.hp.m},
                      {"b_smooth", cfg.hp.b_smooth},     {"newton_iters", cfg.hp.newton_iters},
                      {"jacobi_iters", cfg.hp.jacobi_iters}, {"tol_dual", cfg.hp.tol_dual},
                      {"tol_jacobi", cfg.hp.tol_jacobi}};
  return j;
}

}  // namespace netlearn

#endif  // NETLEARN_CONFIG_HPP
