// Command line front end: run experiments from a JSON config, tune the
// regularization weights, or run the solver-vs-oracle diagnostic suites.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netlearn/config.hpp"
#include "netlearn/diagnostics.hpp"
#include "netlearn/experiment.hpp"

namespace {

int run_simulate(const std::string& config_path, const std::string& variant,
                 std::int64_t seed, const std::string& out) {
  netlearn::ExperimentConfig cfg = netlearn::load_config(config_path);
  if (!variant.empty()) cfg.variant = netlearn::parse_variant(variant);
  if (seed >= 0) cfg.run_seed = static_cast<std::uint64_t>(seed);
  if (!out.empty()) cfg.output_path = out;
  const netlearn::ExperimentResult res = netlearn::run_experiment(cfg);

  std::printf("variant=%s agents=%d timestamps=%d run_seed=%llu\n",
              netlearn::variant_name(cfg.variant), cfg.n_agents, cfg.t_max,
              static_cast<unsigned long long>(cfg.run_seed));
  for (const auto& rec : res.records) {
    std::printf("t=%d %s=%.6g cumulative=%.6g gmse=%.6g messages=%lld\n", rec.t,
                rec.metric_kind.c_str(), rec.system_mean, rec.cumulative_value,
                rec.gmse_value, static_cast<long long>(rec.messages));
  }
  if (!cfg.output_path.empty())
    std::printf("wrote %s\n", cfg.output_path.c_str());
  return 0;
}

int run_tune(const std::string& config_path, int budget, const std::string& out) {
  netlearn::ExperimentConfig cfg = netlearn::load_config(config_path);
  const std::vector<std::uint64_t> train_seeds{1, 2, 3};
  const std::vector<std::uint64_t> val_seeds{101, 102, 103};
  const netlearn::TuneResult tr = netlearn::meta_tune(cfg, budget, train_seeds, val_seeds);

  std::printf("budget=%d train_loss=%.6g val_loss=%.6g default_val_loss=%.6g\n",
              budget, tr.train_loss, tr.val_loss, tr.default_val_loss);
  std::printf("lambda1=%.6g lambda2=%.6g lambda3=%.6g\n", tr.hp.lambda1,
              tr.hp.lambda2, tr.hp.lambda3);
  if (!out.empty()) {
    netlearn::ExperimentConfig tuned = cfg;
    tuned.hp = tr.hp;
    const std::string text = netlearn::config_to_json(tuned).dump(2) + "\n";
    FILE* f = std::fopen(out.c_str(), "wb");
    if (!f) throw std::runtime_error("tune: cannot open output file " + out);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
    std::printf("wrote %s\n", out.c_str());
  }
  return 0;
}

int run_oracle_check(const std::string& suite) {
  if (suite == "graph") {
    const auto r = netlearn::run_graph_suite(100, 0xd1a6ULL);
    std::printf("graph: instances=%d max_frobenius_err=%.3e max_mass_residual=%.3e "
                "max_asymmetry=%.3e max_newton_iters=%d\n",
                r.instances, r.max_frobenius_err, r.max_mass_residual,
                r.max_asymmetry, r.max_newton_iters);
  } else if (suite == "jacobi") {
    const auto r = netlearn::run_jacobi_suite(100, 0xd1a6ULL);
    std::printf("jacobi: instances=%d max_rel_err=%.3e\n", r.instances, r.max_rel_err);
  } else if (suite == "memory") {
    const auto r = netlearn::run_memory_suite(100, 0xd1a6ULL);
    std::printf("memory: instances=%d max_rel_err=%.3e\n", r.instances, r.max_rel_err);
  } else {
    std::fprintf(stderr, "unknown suite: %s\n", suite.c_str());
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized lifelong collaborative learning simulator"};
  app.require_subcommand(1);

  std::string config_path, variant, out, suite;
  std::int64_t seed = -1;
  int budget = 16;

  CLI::App* sim = app.add_subcommand("simulate", "run one experiment from a config file");
  sim->add_option("--config", config_path, "path to JSON config")->required();
  sim->add_option("--variant", variant, "delama|wc|wm|local|avg (overrides config)");
  sim->add_option("--seed", seed, "run seed (overrides config)");
  sim->add_option("--out", out, "CSV output path (overrides config)");

  CLI::App* tune = app.add_subcommand("tune", "random search over regularization weights");
  tune->add_option("--config", config_path, "path to JSON config template")->required();
  tune->add_option("--budget", budget, "number of sampled configurations")->required();
  tune->add_option("--out", out, "write the tuned config as JSON");

  CLI::App* oracle = app.add_subcommand("oracle-check", "solver-vs-oracle diagnostics");
  oracle->add_option("--suite", suite, "graph|jacobi|memory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate(config_path, variant, seed, out);
    if (tune->parsed()) return run_tune(config_path, budget, out);
    if (oracle->parsed()) return run_oracle_check(suite);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
