// Acceptance gate for the decentralized lifelong collaborative learning
// stack. Each numbered check prints one [PASS]/[FAIL] line with its measured
// values; the process exits nonzero if any check fails. All tolerances and
// seeds are pinned here.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "netlearn/diagnostics.hpp"
#include "netlearn/netlearn.hpp"

using namespace netlearn;
using clk = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(clk::time_point t0) {
  return std::chrono::duration<double>(clk::now() - t0).count();
}

void report(int id, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------- criterion 2

struct SmoothingScan {
  double max_ratio = 0.0;
  bool monotone = true;
  double max_asymmetry = 0.0;
  double max_mass_residual = 0.0;
};

SmoothingScan scan_smoothing(int instances, std::uint64_t seed) {
  SmoothingScan out;
  auto rng = make_rng(seed);
  const std::vector<double> bs{1e-2, 1e-4, 1e-6, 1e-8};
  for (int k = 0; k < instances; ++k) {
    const int n = 4 + k % 4;
    const DistanceField df = random_distance_field(n, rng);
    Hyperparams hp;
    hp.m = static_cast<double>(n);
    const CollaborationGraph ref = brute_force_oracle(df, hp);

    double prev = -1.0;
    for (double b : bs) {
      Hyperparams hb = hp;
      hb.b_smooth = b;
      Network net(full_graph(n));
      const DualState dual = solve_dual(df, hb, net);
      const CollaborationGraph g = recover_weights(df, dual.value(), hb);
      validate_collab_graph(g, net.comm());
      out.max_asymmetry =
          std::max(out.max_asymmetry, (g.W - g.W.transpose()).cwiseAbs().maxCoeff());
      out.max_mass_residual = std::max(out.max_mass_residual, std::abs(g.W.sum() - hb.m));
      const double err = (g.W - ref.W).norm();
      if (prev >= 0.0) {
        const double ratio = err / std::max(prev, 1e-300);
        out.max_ratio = std::max(out.max_ratio, ratio);
        if (ratio > 0.5) out.monotone = false;
      }
      prev = err;
    }
  }
  return out;
}

// ---------------------------------------------------------------- criterion 3

double fit_r2(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
    syy += y[k] * y[k];
  }
  const double cov = sxy - sx * sy / n;
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  return cov * cov / (vx * vy);
}

void criterion_jacobi_oracle() {
  const auto t0 = clk::now();
  const JacobiSuiteResult r = run_jacobi_suite(100, 0xd1a6ULL);

  std::vector<double> xs, ys;
  auto rng = make_rng(0x10ceULL);
  std::vector<JacobiInstance> insts;
  for (int k = 0; k < 5; ++k) insts.push_back(random_jacobi_instance(4 + k % 3, 6 + k, rng));
  for (int e = 2; e <= 10; ++e) {
    double mean_rounds = 0.0;
    for (const JacobiInstance& inst : insts) {
      Hyperparams hp;
      hp.lambda1 = 0.01;
      hp.lambda2 = 0.25;
      hp.tol_jacobi = std::pow(10.0, -e);
      hp.jacobi_iters = 50000;
      Network net(full_graph(static_cast<int>(inst.mems.size())));
      UpdateState st = init_update_state(inst.init, inst.mems, inst.graph, hp);
      solve_models(st, inst.graph, inst.mems, hp, net);
      mean_rounds += static_cast<double>(st.rounds) / static_cast<double>(insts.size());
    }
    xs.push_back(static_cast<double>(e));
    ys.push_back(mean_rounds);
  }
  const double r2 = fit_r2(xs, ys);
  const double secs = seconds_since(t0);
  const bool pass =
      r.instances == 100 && r.max_rel_err <= 1e-8 && r2 >= 0.95 && secs < 10.0;
  report(3, pass,
         fmt("Jacobi vs direct solve, 100 instances: max rel err %.3g (<= 1e-8); "
             "rounds vs log10(1/tol) R^2 %.4f (>= 0.95), %.2fs (< 10s)",
             r.max_rel_err, r2, secs));
}

// ---------------------------------------------------------------- criterion 4

void criterion_memory_exactness() {
  const auto t0 = clk::now();
  const MemorySuiteResult r = run_memory_suite(30, 0xd1a6ULL, 10);
  const double secs = seconds_since(t0);
  const bool pass = r.instances == 30 && r.max_rel_err <= 1e-10 && secs < 1.0;
  report(4, pass,
         fmt("local solve vs pooled ridge after 10 batches, 30 instances: "
             "max rel err %.3g (<= 1e-10), %.2fs (< 1s)",
             r.max_rel_err, secs));
}

// ---------------------------------------------------------------- criterion 5

Vec newton_reference(const TaskBatch& batch, const LossSpec& loss, double l1) {
  Vec theta = Vec::Zero(loss.param_dim(batch.inputs.cols()));
  for (int it = 0; it < 200; ++it) {
    const HessianGradient hg = hessian_gradient(batch, loss, theta);
    Mat H = hg.H;
    H.diagonal().array() += 2.0 * l1;
    const Vec grad = hg.g + 2.0 * l1 * theta;
    if (grad.norm() <= 1e-12) break;
    const Vec step = H.ldlt().solve(grad);
    double s = 1.0;
    const double f0 = batch_loss(batch, loss, theta) + l1 * theta.squaredNorm();
    for (int bt = 0; bt < 40; ++bt) {
      const Vec cand = theta - s * step;
      if (batch_loss(batch, loss, cand) + l1 * cand.squaredNorm() <= f0) {
        theta = cand;
        break;
      }
      s *= 0.5;
    }
  }
  return theta;
}

Vec surrogate_estimate(const TaskBatch& batch, const LossSpec& loss, const Vec& alpha,
                       double l1) {
  const HessianGradient hg = hessian_gradient(batch, loss, alpha);
  Mat A = hg.H;
  A.diagonal().array() += 2.0 * l1;
  return Eigen::LDLT<Mat>(A).solve(hg.H * alpha - hg.g);
}

void criterion_expansion_point() {
  const auto t0 = clk::now();
  const LossSpec loss{LossKind::CrossEntropy, 3};
  const double l1 = 0.1;
  auto rng = make_rng(0x5ca1eULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> lab(0, 2);

  double err_origin = 0.0, err_random = 0.0;
  for (int k = 0; k < 30; ++k) {
    TaskBatch batch;
    batch.inputs.resize(24, 2);
    batch.targets.resize(24);
    for (int j = 0; j < 24; ++j) {
      batch.inputs(j, 0) = gauss(rng);
      batch.inputs(j, 1) = gauss(rng);
      batch.targets(j) = lab(rng);
    }
    const Vec ref = newton_reference(batch, loss, l1);
    Vec alpha = Vec::NullaryExpr(6, [&](Eigen::Index) { return gauss(rng); });
    alpha.normalize();
    err_origin += (surrogate_estimate(batch, loss, Vec::Zero(6), l1) - ref).norm() / 30.0;
    err_random += (surrogate_estimate(batch, loss, alpha, l1) - ref).norm() / 30.0;
  }
  const double secs = seconds_since(t0);
  const bool pass = err_origin <= err_random && secs < 30.0;
  report(5, pass,
         fmt("expansion at origin vs random unit point, 30 CE tasks: "
             "mean err %.4f <= %.4f, %.2fs (< 30s)",
             err_origin, err_random, secs));
}

// ---------------------------------------------------------------- criterion 6

struct FeasibilityAudit {
  int graphs = 0;
  double max_asymmetry = 0.0;
  double max_mass_residual = 0.0;
  double min_entry = 0.0;
  double max_diag = 0.0;
  bool support_ok = true;

  void absorb(const CollaborationGraph& g, const CommGraph& c) {
    ++graphs;
    max_asymmetry = std::max(max_asymmetry, (g.W - g.W.transpose()).cwiseAbs().maxCoeff());
    max_mass_residual = std::max(max_mass_residual, std::abs(g.W.cwiseAbs().sum() - g.mass));
    min_entry = std::min(min_entry, g.W.minCoeff());
    max_diag = std::max(max_diag, g.W.diagonal().cwiseAbs().maxCoeff());
    for (int i = 0; i < g.n() && support_ok; ++i)
      for (int j = 0; j < g.n(); ++j)
        if (i != j && c.C(i, j) == 0 && g.W(i, j) != 0.0) {
          support_ok = false;
          break;
        }
  }
};

void criterion_feasibility(const GraphSuiteResult& suite1, const SmoothingScan& suite2) {
  FeasibilityAudit audit;
  // graphs inferred through the full pipeline on sparse topologies, where the
  // support constraint actually binds
  for (int k = 0; k < 20; ++k) {
    const std::uint64_t seed = 3000 + static_cast<std::uint64_t>(k);
    const RegressionTaskSpec spec = sample_regression_scenario(6, seed);
    TopologySpec topo;
    if (k % 2 == 0) {
      topo.kind = TopologySpec::Kind::ErdosRenyi;
      topo.p = 0.5;
    } else {
      topo.kind = TopologySpec::Kind::BarabasiAlbert;
      topo.m_attach = 2;
    }
    topo.n = 6;
    topo.seed = seed;
    const CommGraph comm = make_comm_graph(topo);
    Network net(comm);

    std::vector<AgentMemory> mems(6, AgentMemory::empty(feature_dim(3)));
    std::vector<ModelParams> thetas(6);
    Hyperparams hp;
    hp.m = 6.0;
    for (int t = 1; t <= 2; ++t)
      for (int i = 0; i < 6; ++i) {
        const TaskBatch raw = next_batch(spec, i, t, seed);
        const TaskBatch fb{featurize(raw.inputs.col(0), 3), raw.targets};
        const HessianGradient hg =
            hessian_gradient(fb, LossSpec{LossKind::MSE, 0}, Vec::Zero(feature_dim(3)));
        mems[i] = update_memory(mems[i], hg.H, hg.g, Vec::Zero(feature_dim(3)));
        thetas[i] = local_init(mems[i], hp.lambda1);
      }
    const GraphInferenceResult gi = infer_graph(thetas, hp, net);
    audit.absorb(gi.graph, comm);
  }

  const bool pass = suite1.max_asymmetry <= 1e-10 && suite2.max_asymmetry <= 1e-10 &&
                    suite1.max_mass_residual <= 1e-9 && suite2.max_mass_residual <= 1e-9 &&
                    audit.max_asymmetry <= 1e-10 && audit.max_mass_residual <= 1e-9 &&
                    audit.min_entry >= 0.0 && audit.max_diag == 0.0 && audit.support_ok;
  report(6, pass,
         fmt("feasibility of every inferred graph (100 + 40 + %d instances): "
             "max asymmetry %.3g (<= 1e-10), max mass residual %.3g (<= 1e-9), "
             "min entry %.3g (>= 0), max diagonal %.3g (= 0), support in C: %s",
             audit.graphs,
             std::max(std::max(suite1.max_asymmetry, suite2.max_asymmetry), audit.max_asymmetry),
             std::max(std::max(suite1.max_mass_residual, suite2.max_mass_residual),
                      audit.max_mass_residual),
             audit.min_entry, audit.max_diag, audit.support_ok ? "yes" : "NO"));
}

// ------------------------------------------------------- criteria 7, 8 and 10

struct RegressionSweep {
  double dla_t1 = 0.0, dla_t10 = 0.0;
  double wc_t1 = 0.0, wc_t10 = 0.0;
  double wm_t10 = 0.0;
  double gmse_t1 = 0.0, gmse_t10 = 0.0;
  long illegal_events = 0;
  std::string first_csv;
  ExperimentConfig first_cfg;
  double secs = 0.0;
};

RegressionSweep run_regression_sweep() {
  const auto t0 = clk::now();
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; seeds.size() < 50; ++s)
    if (sample_regression_scenario(6, s).n_groups() == 2) seeds.push_back(s);

  RegressionSweep out;
  const double k = static_cast<double>(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    ExperimentConfig cfg;
    cfg.scenario = "regression";
    cfg.n_agents = 6;
    cfg.t_max = 10;
    cfg.alternations = 2;
    cfg.scenario_seed = seeds[i];
    cfg.run_seed = fold_seed(seeds[i], 99);

    cfg.variant = Variant::DeLAMA;
    const ExperimentResult dla = run_experiment(cfg);
    if (i == 0) {
      out.first_csv = dla.csv;
      out.first_cfg = cfg;
    }
    cfg.variant = Variant::WC;
    const ExperimentResult wc = run_experiment(cfg);
    cfg.variant = Variant::WM;
    const ExperimentResult wm = run_experiment(cfg);

    out.dla_t1 += dla.records.front().system_mean / k;
    out.dla_t10 += dla.records.back().system_mean / k;
    out.wc_t1 += wc.records.front().system_mean / k;
    out.wc_t10 += wc.records.back().system_mean / k;
    out.wm_t10 += wm.records.back().system_mean / k;
    out.gmse_t1 += dla.records.front().gmse_value / k;
    out.gmse_t10 += dla.records.back().gmse_value / k;
    out.illegal_events +=
        dla.illegal_edge_events + wc.illegal_edge_events + wm.illegal_edge_events;
  }
  out.secs = seconds_since(t0);
  return out;
}

void criterion_ablation_ordering(const RegressionSweep& s) {
  const bool pass = s.dla_t1 <= 0.8 * s.wc_t1 && s.dla_t10 <= 0.2 * s.wm_t10 && s.secs < 120.0;
  report(7, pass,
         fmt("regression ablations over 50 two-group seeds: mean MSE t=1 %.4f vs WC %.4f "
             "(ratio %.3f <= 0.8); t=10 %.4f vs WM %.4f (ratio %.3f <= 0.2), %.1fs (< 2min)",
             s.dla_t1, s.wc_t1, s.dla_t1 / s.wc_t1, s.dla_t10, s.wm_t10, s.dla_t10 / s.wm_t10,
             s.secs));
}

void criterion_graph_quality(const RegressionSweep& s) {
  const bool pass = s.gmse_t10 <= 0.5 * s.gmse_t1;
  report(8, pass,
         fmt("graph quality over the same 50 seeds: mean GMSE t=1 %.4f -> t=10 %.4f "
             "(ratio %.3f <= 0.5)",
             s.gmse_t1, s.gmse_t10, s.gmse_t10 / s.gmse_t1));
}

// ------------------------------------------------------------ criteria 9, 10

struct ClassificationSweep {
  double dla_t5 = 0.0, wm_t5 = 0.0, wc_t1 = 0.0, oracle_t5 = 0.0;
  long illegal_events = 0;
  std::string first_csv;
  ExperimentConfig first_cfg;
};

double pooled_group_oracle(const ClassIncrementalSpec& spec, std::uint64_t run_seed, int t_max,
                           double l1) {
  const int n = spec.n_agents;
  const LossSpec loss{LossKind::CrossEntropy, spec.cls};
  const Eigen::Index p = loss.param_dim(3);
  std::vector<AgentMemory> mems(n, AgentMemory::empty(p));
  for (int t = 1; t <= t_max; ++t)
    for (int i = 0; i < n; ++i) {
      const TaskBatch raw = next_class_batch(spec, i, t, run_seed);
      const TaskBatch fb{class_features(raw.inputs), raw.targets};
      const HessianGradient hg = hessian_gradient(fb, loss, Vec::Zero(p));
      mems[i] = update_memory(mems[i], hg.H, hg.g, Vec::Zero(p));
    }

  double acc = 0.0;
  for (int g = 0; g < 2; ++g) {
    AgentMemory pooled = AgentMemory::empty(p);
    int members = 0;
    for (int i = 0; i < n; ++i) {
      if (spec.group[i] != g) continue;
      pooled.A += mems[i].A;
      pooled.b += mems[i].b;
      ++members;
    }
    pooled.A /= members;
    pooled.b /= members;
    pooled.t = t_max;
    const Vec theta = local_init(pooled, l1);
    const double group_acc =
        eval_accuracy(theta, class_features(spec.test_inputs[g]), spec.test_labels[g], spec.cls);
    acc += group_acc * members / n;
  }
  return acc;
}

ClassificationSweep run_classification_sweep() {
  ClassificationSweep out;
  const double k = 30.0;
  for (std::uint64_t s = 1; s <= 30; ++s) {
    ExperimentConfig cfg;
    cfg.scenario = "classification";
    cfg.n_agents = 6;
    cfg.t_max = 5;
    cfg.scenario_seed = s;
    cfg.run_seed = fold_seed(s, 7);

    cfg.variant = Variant::DeLAMA;
    const ExperimentResult dla = run_experiment(cfg);
    if (s == 1) {
      out.first_csv = dla.csv;
      out.first_cfg = cfg;
    }
    cfg.variant = Variant::WM;
    const ExperimentResult wm = run_experiment(cfg);
    cfg.variant = Variant::WC;
    const ExperimentResult wc = run_experiment(cfg);

    out.dla_t5 += dla.records.back().system_mean / k;
    out.wm_t5 += wm.records.back().system_mean / k;
    out.wc_t1 += wc.records.front().system_mean / k;
    out.illegal_events +=
        dla.illegal_edge_events + wm.illegal_edge_events + wc.illegal_edge_events;

    const ClassIncrementalSpec spec = sample_classification_scenario(6, s);
    out.oracle_t5 += pooled_group_oracle(spec, cfg.run_seed, 5, cfg.hp.lambda1) / k;
  }
  return out;
}

void criterion_class_incremental(const ClassificationSweep& s) {
  const double gap = s.dla_t5 - s.oracle_t5;
  const bool pass = s.dla_t5 > s.wm_t5 && s.dla_t5 > s.wc_t1 && std::abs(gap) <= 0.05;
  report(9, pass,
         fmt("class-incremental over 30 seeds: accuracy t=5 %.4f > WM %.4f and > WC t=1 %.4f; "
             "pooled-oracle gap %+.4f (|gap| <= 0.05)",
             s.dla_t5, s.wm_t5, s.wc_t1, gap));
}

void criterion_audit(const RegressionSweep& reg, const ClassificationSweep& cls) {
  const ExperimentResult rerun_reg = run_experiment(reg.first_cfg);
  const ExperimentResult rerun_cls = run_experiment(cls.first_cfg);
  const bool identical =
      rerun_reg.csv == reg.first_csv && rerun_cls.csv == cls.first_csv;
  const long illegal = reg.illegal_events + cls.illegal_events;
  const bool pass = illegal == 0 && identical;
  report(10, pass,
         fmt("decentralization audit: %ld illegal-edge events (= 0); "
             "seed-identical reruns byte-identical: %s",
             illegal, identical ? "yes" : "NO"));
}

}  // namespace

int main() {
  std::printf("acceptance suite: decentralized lifelong collaborative learning\n");

  const auto t0 = clk::now();
  const GraphSuiteResult suite1 = run_graph_suite(100, 0xd1a6ULL, 1e-8);
  const double suite1_secs = seconds_since(t0);
  {
    const bool pass = suite1.instances == 100 && suite1.max_frobenius_err <= 1e-4 &&
                      suite1.max_mass_residual <= 1e-9 && suite1.max_newton_iters <= 30 &&
                      suite1_secs < 5.0;
    report(1, pass,
           fmt("graph solver vs brute force, 100 instances: max ||dW||_F %.3g (<= 1e-4), "
               "max mass residual %.3g (<= 1e-9), max Newton iters %d (<= 30), %.2fs (< 5s)",
               suite1.max_frobenius_err, suite1.max_mass_residual, suite1.max_newton_iters,
               suite1_secs));
  }

  const SmoothingScan suite2 = scan_smoothing(10, 2002ULL);
  report(2, suite2.monotone,
         fmt("oracle error shrinks over b = 1e-2..1e-8 on 10 fixed instances: "
             "max successive ratio %.3g (<= 0.5)",
             suite2.max_ratio));

  criterion_jacobi_oracle();
  criterion_memory_exactness();
  criterion_expansion_point();
  criterion_feasibility(suite1, suite2);

  const RegressionSweep reg = run_regression_sweep();
  criterion_ablation_ordering(reg);
  criterion_graph_quality(reg);

  const ClassificationSweep cls = run_classification_sweep();
  criterion_class_incremental(cls);
  criterion_audit(reg, cls);

  if (g_failures == 0) {
    std::printf("acceptance: all 10 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return 1;
}
