#ifndef NETLEARN_DIAGNOSTICS_HPP
#define NETLEARN_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "netlearn/graph_inference.hpp"
#include "netlearn/local_learning.hpp"
#include "netlearn/model_update.hpp"
#include "netlearn/network.hpp"
#include "netlearn/rng.hpp"
#include "netlearn/types.hpp"

namespace netlearn {

/// Random symmetric distance field with full off-diagonal support.
inline DistanceField random_distance_field(int n, std::mt19937_64& rng, double scale = 4.0) {
  const double inf = std::numeric_limits<double>::infinity();
  DistanceField df{Mat::Constant(n, n, inf)};
  std::uniform_real_distribution<double> u(0.0, scale);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) df.d(i, j) = df.d(j, i) = u(rng);
  return df;
}

inline CommGraph full_graph(int n) {
  return CommGraph{Eigen::MatrixXi::Ones(n, n)};
}

struct GraphSuiteResult {
  int instances = 0;
  double max_frobenius_err = 0.0;
  double max_mass_residual = 0.0;
  double max_asymmetry = 0.0;
  int max_newton_iters = 0;
};

/// Newton-vs-projected-gradient equivalence on random dense instances
/// (lambda2 = lambda3 = 1, m = N). Every solver output is validated against
/// the communication graph.
inline GraphSuiteResult run_graph_suite(int instances, std::uint64_t seed,
                                        double b_smooth = 1e-8) {
  GraphSuiteResult res;
  res.instances = instances;
  auto rng = make_rng(fold_seed(seed, 0x96a9ULL));
  for (int k = 0; k < instances; ++k) {
    const int n = 3 + k % 6;
    const DistanceField df = random_distance_field(n, rng);
    Hyperparams hp;
    hp.lambda2 = 1.0;
    hp.lambda3 = 1.0;
    hp.m = static_cast<double>(n);
    hp.b_smooth = b_smooth;
    Network net(full_graph(n));
    const DualState dual = solve_dual(df, hp, net);
    const CollaborationGraph W = recover_weights(df, dual.value(), hp);
    validate_collab_graph(W, net.comm());
    const CollaborationGraph Wbf = brute_force_oracle(df, hp);

    res.max_frobenius_err = std::max(res.max_frobenius_err, (W.W - Wbf.W).norm());
    res.max_mass_residual =
        std::max(res.max_mass_residual, std::abs(W.W.cwiseAbs().sum() - hp.m));
    res.max_asymmetry =
        std::max(res.max_asymmetry, (W.W - W.W.transpose()).cwiseAbs().maxCoeff());
    res.max_newton_iters = std::max(res.max_newton_iters, dual.iterations);
  }
  return res;
}

/// Random refinement instance: PSD memories with a controlled spectral
/// floor, plus a symmetric collaboration graph of mass n.
struct JacobiInstance {
  std::vector<AgentMemory> mems;
  CollaborationGraph graph;
  std::vector<ModelParams> init;
};

inline JacobiInstance random_jacobi_instance(int n, int p, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  JacobiInstance inst;
  for (int i = 0; i < n; ++i) {
    Mat G(p, p);
    for (int r = 0; r < p; ++r)
      for (int c = 0; c < p; ++c) G(r, c) = gauss(rng);
    AgentMemory mem;
    mem.A = G * G.transpose() / static_cast<double>(p);
    mem.A.diagonal().array() += 0.5;  // spectral floor keeps the contraction moderate
    mem.b = Vec::NullaryExpr(p, [&](Eigen::Index) { return gauss(rng); });
    mem.t = 1;
    inst.mems.push_back(std::move(mem));
  }
  Mat W = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) W(i, j) = W(j, i) = 0.2 + 0.8 * u(rng);
  const double total = W.sum();
  if (total > 0.0) W *= static_cast<double>(n) / total;
  inst.graph = CollaborationGraph{std::move(W), static_cast<double>(n)};
  inst.init.assign(n, Vec::Zero(p));
  return inst;
}

struct JacobiSuiteResult {
  int instances = 0;
  double max_rel_err = 0.0;
};

/// Jacobi-vs-stacked-direct-solve equivalence on random instances.
inline JacobiSuiteResult run_jacobi_suite(int instances, std::uint64_t seed) {
  JacobiSuiteResult res;
  res.instances = instances;
  auto rng = make_rng(fold_seed(seed, 0x1ac0b1ULL));
  for (int k = 0; k < instances; ++k) {
    const int n = 2 + k % 5;
    const int p = 3 + k % 18;
    JacobiInstance inst = random_jacobi_instance(n, p, rng);
    Hyperparams hp;
    hp.lambda1 = 0.01;
    hp.lambda2 = 0.25;
    hp.m = static_cast<double>(n);
    hp.tol_jacobi = 1e-12;
    hp.jacobi_iters = 5000;
    Network net(full_graph(n));
    UpdateState st = init_update_state(inst.init, inst.mems, inst.graph, hp);
    const std::vector<ModelParams> iterative =
        solve_models(st, inst.graph, inst.mems, hp, net);
    const std::vector<ModelParams> direct = direct_solve_oracle(inst.mems, inst.graph, hp);
    for (int i = 0; i < n; ++i) {
      const double rel =
          (iterative[i] - direct[i]).norm() / std::max(1.0, direct[i].norm());
      res.max_rel_err = std::max(res.max_rel_err, rel);
    }
  }
  return res;
}

struct MemorySuiteResult {
  int instances = 0;
  double max_rel_err = 0.0;
};

/// Quadratic-exactness check: local_init after T MSE batches (absorbed at
/// arbitrary expansion points) against a direct pooled ridge solve with
/// per-batch mean weighting.
inline MemorySuiteResult run_memory_suite(int instances, std::uint64_t seed, int batches = 10) {
  MemorySuiteResult res;
  res.instances = instances;
  auto rng = make_rng(fold_seed(seed, 0x3e3034ULL));
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < instances; ++k) {
    const int p = 3 + k % 8;
    const double lambda1 = 1e-3;
    AgentMemory mem = AgentMemory::empty(p);
    Mat pooled_A = Mat::Zero(p, p);
    Vec pooled_b = Vec::Zero(p);
    for (int t = 0; t < batches; ++t) {
      const int nk = 2 + (k + t) % 7;
      TaskBatch batch;
      batch.inputs.resize(nk, p);
      batch.targets.resize(nk);
      for (int r = 0; r < nk; ++r) {
        for (int c = 0; c < p; ++c) batch.inputs(r, c) = gauss(rng);
        batch.targets(r) = gauss(rng);
      }
      Vec alpha = Vec::NullaryExpr(p, [&](Eigen::Index) { return gauss(rng); });
      const HessianGradient hg = hessian_gradient(batch, LossSpec{LossKind::MSE, 0}, alpha);
      mem = update_memory(mem, hg.H, hg.g, alpha);
      const double w = 2.0 / (static_cast<double>(batches) * nk);
      pooled_A += w * batch.inputs.transpose() * batch.inputs;
      pooled_b += w * batch.inputs.transpose() * batch.targets;
    }
    const Vec theta = local_init(mem, lambda1);
    pooled_A.diagonal().array() += 2.0 * lambda1;
    const Vec ridge = pooled_A.ldlt().solve(pooled_b);
    const double rel = (theta - ridge).norm() / std::max(1e-12, ridge.norm());
    res.max_rel_err = std::max(res.max_rel_err, rel);
  }
  return res;
}

}  // namespace netlearn

#endif  // NETLEARN_DIAGNOSTICS_HPP
