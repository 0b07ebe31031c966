#ifndef NETLEARN_GRAPH_INFERENCE_HPP
#define NETLEARN_GRAPH_INFERENCE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "netlearn/network.hpp"
#include "netlearn/types.hpp"

namespace netlearn {

/// Squared pairwise model distances, extended with +infinity off the
/// communication graph's support and on the diagonal (self-distances carry
/// no weight).
struct DistanceField {
  Mat d;

  int n() const { return static_cast<int>(d.rows()); }
};

inline void validate_distance_field(const DistanceField& df) {
  const int n = df.n();
  if (df.d.cols() != n) throw std::invalid_argument("DistanceField: not square");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = df.d(i, j);
      if (std::isnan(v) || v < 0.0) throw std::invalid_argument("DistanceField: nonnegative");
      if (v != df.d(j, i)) throw std::invalid_argument("DistanceField: symmetric");
    }
}

/// Centralized reference form of the distance field (used by the oracles and
/// as each agent's local row computation once neighbor models are in hand).
inline DistanceField pairwise_distances(const std::vector<ModelParams>& thetas,
                                        const CommGraph& c) {
  const int n = c.n();
  if (static_cast<int>(thetas.size()) != n)
    throw std::invalid_argument("pairwise_distances: theta count mismatch");
  const double inf = std::numeric_limits<double>::infinity();
  DistanceField df{Mat::Constant(n, n, inf)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || !c.edge(i, j)) continue;
      if (thetas[i].size() != thetas[j].size())
        throw std::invalid_argument("pairwise_distances: theta length mismatch");
      df.d(i, j) = (thetas[i] - thetas[j]).squaredNorm();
    }
  return df;
}

/// Decentralized distance computation: every agent ships its model to its
/// C-neighbors and fills its own row from received payloads only.
inline DistanceField pairwise_distances(const std::vector<ModelParams>& thetas, Network& net) {
  const CommGraph& c = net.comm();
  const int n = c.n();
  if (static_cast<int>(thetas.size()) != n)
    throw std::invalid_argument("pairwise_distances: theta count mismatch");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && c.edge(i, j)) net.send_along(i, j, thetas[i]);
  net.barrier();
  const double inf = std::numeric_limits<double>::infinity();
  DistanceField df{Mat::Constant(n, n, inf)};
  for (int i = 0; i < n; ++i)
    for (const auto& [sender, payload] : net.inbox(i))
      df.d(i, sender) = (thetas[i] - payload).squaredNorm();
  return df;
}

struct SmoothedRelu {
  double h;
  double dh;
  double ddh;
};

/// Twice differentiable ReLU surrogate h_b(x) = (sqrt(x^2 + b) + x) / 2.
inline SmoothedRelu smoothed_relu(double x, double b) {
  if (!(b > 0.0)) throw std::invalid_argument("smoothed_relu: b must be positive");
  const double r = std::sqrt(x * x + b);
  return SmoothedRelu{0.5 * (r + x), 0.5 * (x / r + 1.0), 0.5 * b / (r * r * r)};
}

/// Dual variable of the global mass constraint, one local copy per agent.
struct DualState {
  std::vector<double> z;
  int iterations = 0;

  double value() const { return z.empty() ? 0.0 : z.front(); }
};

/// Decentralized Newton solve of the scalar dual equation
///   phi(z) = sum_{i,j: C_ij=1, i != j} h_b(-(lambda2 d_ij + z) / (2 lambda3)) = m.
/// Per round every agent reduces its own distance row to (phi_i, phi_i');
/// the global sums are formed by flooding aggregation, after which all
/// agents apply the identical update to their local z copies. phi is convex
/// and strictly decreasing, so a bracketing safeguard (bisection fallback)
/// makes the iteration globally convergent; infinite distances contribute
/// nothing to either sum.
inline DualState solve_dual(const DistanceField& df, const Hyperparams& hp, Network& net) {
  const int n = net.comm().n();
  if (df.n() != n) throw std::invalid_argument("solve_dual: dimension mismatch");
  const double l2 = hp.lambda2, l3 = hp.lambda3;
  const double inv2l3 = 1.0 / (2.0 * l3);

  // One aggregation round to establish the bisection bracket: the summed
  // row maxima upper-bound the global max finite distance.
  std::vector<Vec> stats(n);
  for (int i = 0; i < n; ++i) {
    double rowmax = 0.0, finite = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j || !std::isfinite(df.d(i, j))) continue;
      rowmax = std::max(rowmax, df.d(i, j));
      finite += 1.0;
    }
    stats[i] = (Vec(2) << rowmax, finite).finished();
  }
  const Vec global_stats = net.aggregate_sum(stats).front();
  if (global_stats(1) < 1.0)
    throw std::invalid_argument("solve_dual: no finite off-diagonal distance");

  double lo = -(l2 * global_stats(0) + 2.0 * l3 * hp.m);  // phi(lo) >= m
  double hi = std::numeric_limits<double>::infinity();    // phi(hi) < m once set
  std::vector<double> z(n, 0.0);
  int rounds = 0;

  while (rounds < hp.newton_iters) {
    ++rounds;
    std::vector<Vec> local(n);
    for (int i = 0; i < n; ++i) {
      double s = 0.0, ds = 0.0;
      for (int j = 0; j < n; ++j) {
        const double dij = df.d(i, j);
        if (i == j || !std::isfinite(dij)) continue;
        const SmoothedRelu sr = smoothed_relu(-(l2 * dij + z[i]) * inv2l3, hp.b_smooth);
        s += sr.h;
        ds += -inv2l3 * sr.dh;
      }
      local[i] = (Vec(2) << s, ds).finished();
    }
    const std::vector<Vec> agg = net.aggregate_sum(local);

    bool converged = false;
    for (int i = 0; i < n; ++i) {
      const double phi = agg[i](0), dphi = agg[i](1);
      const double r = phi - hp.m;
      if (std::abs(r) <= hp.tol_dual) {
        converged = true;
        continue;
      }
      if (r > 0.0)
        lo = std::max(lo, z[i]);
      else
        hi = std::min(hi, z[i]);
      double next = z[i] - r / dphi;
      const bool inside = std::isfinite(next) && next > lo && next < hi;
      if (!inside) {
        if (std::isfinite(hi))
          next = 0.5 * (lo + hi);
        else if (dphi == 0.0)
          throw std::runtime_error("solve_dual: degenerate dual derivative");
        else
          next = z[i] + std::max(1.0, std::abs(z[i]));  // expand toward phi < m
      }
      z[i] = next;
    }
    if (converged) return DualState{std::move(z), rounds};
  }
  throw std::runtime_error("solve_dual: no convergence");
}

/// KKT recovery: W_ij = max(0, -(lambda2 d_ij + z) / (2 lambda3)) on the
/// support, then one global rescale pinning ||W||_1 = m exactly. Smoothing
/// is used only inside the Newton solve; the recovered weights use the exact
/// ReLU so clipped entries are identically zero.
inline CollaborationGraph recover_weights(const DistanceField& df, double z,
                                          const Hyperparams& hp) {
  const int n = df.n();
  Mat W = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || !std::isfinite(df.d(i, j))) continue;
      W(i, j) = std::max(0.0, -(hp.lambda2 * df.d(i, j) + z) / (2.0 * hp.lambda3));
    }
  const double total = W.sum();
  if (total <= 0.0) throw std::runtime_error("recover_weights: all-zero graph");
  W *= hp.m / total;
  return CollaborationGraph{std::move(W), hp.m};
}

struct GraphInferenceResult {
  CollaborationGraph graph;
  DualState dual;
};

/// Full graph-inference step: decentralized distance exchange, dual Newton
/// solve, weight recovery, validation against the communication graph.
inline GraphInferenceResult infer_graph(const std::vector<ModelParams>& thetas,
                                        const Hyperparams& hp, Network& net) {
  const DistanceField df = pairwise_distances(thetas, net);
  DualState dual = solve_dual(df, hp, net);
  CollaborationGraph graph = recover_weights(df, dual.value(), hp);
  validate_collab_graph(graph, net.comm());
  return GraphInferenceResult{std::move(graph), std::move(dual)};
}

/// Objective of the graph QP over the finite support:
/// sum_i lambda2 w_i . d_i + lambda3 ||w_i||^2.
inline double graph_objective(const DistanceField& df, const Mat& W, const Hyperparams& hp) {
  double obj = 0.0;
  for (int i = 0; i < df.n(); ++i)
    for (int j = 0; j < df.n(); ++j) {
      if (i == j || !std::isfinite(df.d(i, j))) continue;
      obj += hp.lambda2 * W(i, j) * df.d(i, j) + hp.lambda3 * W(i, j) * W(i, j);
    }
  return obj;
}

/// Euclidean projection onto the scaled simplex {w >= 0, sum w = mass}.
inline Vec project_simplex(const Vec& y, double mass) {
  const Eigen::Index k = y.size();
  std::vector<double> u(y.data(), y.data() + k);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double csum = 0.0, tau = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    csum += u[j];
    const double cand = (csum - mass) / static_cast<double>(j + 1);
    if (u[j] - cand > 0.0) tau = cand;
  }
  return (y.array() - tau).cwiseMax(0.0);
}

/// Centralized verification solver for the graph QP
///   min sum_i lambda2 w_i . d_i + lambda3 ||w_i||^2  s.t. w >= 0, sum = m,
/// by projected gradient descent with simplex projection, run to a
/// gradient-mapping norm of 1e-10. Independent route from the dual Newton
/// solver (sorting-based projection vs. root finding).
inline CollaborationGraph brute_force_oracle(const DistanceField& df, const Hyperparams& hp) {
  const int n = df.n();
  if (n > 12) throw std::invalid_argument("brute_force_oracle: N too large");
  std::vector<std::pair<int, int>> support;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && std::isfinite(df.d(i, j))) support.emplace_back(i, j);
  const Eigen::Index k = static_cast<Eigen::Index>(support.size());
  if (k == 0) throw std::invalid_argument("brute_force_oracle: empty support");

  Vec d(k);
  for (Eigen::Index e = 0; e < k; ++e) d(e) = df.d(support[e].first, support[e].second);

  const double step = 1.0 / (2.0 * hp.lambda3);
  Vec w = Vec::Constant(k, hp.m / static_cast<double>(k));
  for (int it = 0; it < 1000; ++it) {
    const Vec grad = hp.lambda2 * d + 2.0 * hp.lambda3 * w;
    const Vec w_next = project_simplex(w - step * grad, hp.m);
    const double mapping = (w - w_next).norm() / step;
    w = w_next;
    if (mapping <= 1e-10) break;
  }

  Mat W = Mat::Zero(n, n);
  for (Eigen::Index e = 0; e < k; ++e) W(support[e].first, support[e].second) = w(e);
  return CollaborationGraph{std::move(W), hp.m};
}

}  // namespace netlearn

#endif  // NETLEARN_GRAPH_INFERENCE_HPP
