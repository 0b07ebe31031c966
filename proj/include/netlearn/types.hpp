#ifndef NETLEARN_TYPES_HPP
#define NETLEARN_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace netlearn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Model parameters of one agent. For regression P equals the feature
/// dimension F; for classification P = F*CLS, flattened class-major
/// (theta = [theta_class_0; theta_class_1; ...]).
using ModelParams = Vec;

inline void validate_model_params(const ModelParams& theta, Eigen::Index expected_p) {
  if (theta.size() != expected_p)
    throw std::invalid_argument("ModelParams: length mismatch");
  if (!theta.allFinite())
    throw std::invalid_argument("ModelParams: non-finite entry");
}

/// Constant-size sufficient statistics of all past local losses.
/// A is the running mean of batch Hessians, b the running mean of
/// H*alpha - g, t the number of absorbed batches. Storage never grows
/// with t.
struct AgentMemory {
  Mat A;
  Vec b;
  long t = 0;

  static AgentMemory empty(Eigen::Index p) {
    return AgentMemory{Mat::Zero(p, p), Vec::Zero(p), 0};
  }
};

inline void validate_memory(const AgentMemory& mem) {
  if (mem.A.rows() != mem.A.cols())
    throw std::invalid_argument("AgentMemory: A not square");
  if (mem.b.size() != mem.A.rows())
    throw std::invalid_argument("AgentMemory: b length mismatch");
  if (mem.t < 0)
    throw std::invalid_argument("AgentMemory: negative t");
  if ((mem.A - mem.A.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("AgentMemory: A asymmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(mem.A, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8)
    throw std::invalid_argument("AgentMemory: A not positive semidefinite");
  if (mem.t == 0 && (mem.A.cwiseAbs().maxCoeff() > 0.0 || mem.b.cwiseAbs().maxCoeff() > 0.0))
    throw std::invalid_argument("AgentMemory: nonzero memory at t = 0");
}

/// Binary communication topology. Unit diagonal by convention so the
/// connectivity level ||C||_1 / N^2 equals 1 for the fully connected graph.
struct CommGraph {
  Eigen::MatrixXi C;

  int n() const { return static_cast<int>(C.rows()); }
  bool edge(int i, int j) const { return C(i, j) != 0; }
};

inline bool comm_graph_connected(const Eigen::MatrixXi& C) {
  const int n = static_cast<int>(C.rows());
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      if (j != v && C(v, j) != 0 && !seen[j]) {
        seen[j] = 1;
        ++count;
        stack.push_back(j);
      }
    }
  }
  return count == n;
}

inline void validate_comm_graph(const CommGraph& g) {
  const int n = g.n();
  if (n < 1 || g.C.cols() != n)
    throw std::invalid_argument("CommGraph: not square");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (g.C(i, j) != 0 && g.C(i, j) != 1)
        throw std::invalid_argument("CommGraph: binary entries");
  if (g.C != g.C.transpose().eval())
    throw std::invalid_argument("CommGraph: asymmetric");
  for (int i = 0; i < n; ++i)
    if (g.C(i, i) != 1)
      throw std::invalid_argument("CommGraph: diagonal");
  if (!comm_graph_connected(g.C))
    throw std::invalid_argument("CommGraph: disconnected");
}

/// Learned collaboration graph: symmetric nonnegative weights with a fixed
/// total L1 mass m. Entries may only sit where the communication graph has
/// an edge.
struct CollaborationGraph {
  Mat W;
  double mass = 0.0;

  int n() const { return static_cast<int>(W.rows()); }
};

inline void validate_collab_graph(const CollaborationGraph& wg, const CommGraph& c) {
  const int n = wg.n();
  if (n != c.n() || wg.W.cols() != n)
    throw std::invalid_argument("CollaborationGraph: dimension mismatch");
  if (wg.W.minCoeff() < 0.0)
    throw std::invalid_argument("CollaborationGraph: nonnegativity");
  for (int i = 0; i < n; ++i)
    if (wg.W(i, i) != 0.0)
      throw std::invalid_argument("CollaborationGraph: diagonal");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (c.C(i, j) == 0 && i != j && wg.W(i, j) != 0.0)
        throw std::invalid_argument("CollaborationGraph: support");
  if ((wg.W - wg.W.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("CollaborationGraph: symmetry");
  if (std::abs(wg.W.cwiseAbs().sum() - wg.mass) > 1e-9)
    throw std::invalid_argument("CollaborationGraph: L1 mass");
}

/// One training batch. inputs holds raw inputs row-wise (d = 1 scalars for
/// regression, feature vectors otherwise); targets holds regression values
/// or integral class labels in [0, CLS).
struct TaskBatch {
  Mat inputs;
  Vec targets;

  Eigen::Index n() const { return inputs.rows(); }
};

struct Hyperparams {
  double lambda1 = 1e-2;  // ridge weight
  double lambda2 = 1.0;   // graph-smoothness weight
  double lambda3 = 1.0;   // graph L2 regularizer
  double m = 1.0;         // total L1 mass of W; experiment configs default it to N
  double b_smooth = 1e-6; // ReLU smoothing constant for the dual Newton solve
  int newton_iters = 100;
  int jacobi_iters = 500;
  double tol_dual = 1e-10;
  double tol_jacobi = 1e-9;
};

inline void validate_hyperparams(const Hyperparams& hp) {
  if (!(hp.lambda1 > 0.0)) throw std::invalid_argument("Hyperparams: lambda1");
  if (!(hp.lambda2 > 0.0)) throw std::invalid_argument("Hyperparams: lambda2");
  if (!(hp.lambda3 > 0.0)) throw std::invalid_argument("Hyperparams: lambda3");
  if (!(hp.m > 0.0)) throw std::invalid_argument("Hyperparams: m");
  if (!(hp.b_smooth > 0.0)) throw std::invalid_argument("Hyperparams: b_smooth");
  if (hp.newton_iters < 1) throw std::invalid_argument("Hyperparams: newton_iters");
  if (hp.jacobi_iters < 1) throw std::invalid_argument("Hyperparams: jacobi_iters");
  if (!(hp.tol_dual > 0.0)) throw std::invalid_argument("Hyperparams: tol_dual");
  if (!(hp.tol_jacobi > 0.0)) throw std::invalid_argument("Hyperparams: tol_jacobi");
}

}  // namespace netlearn

#endif  // NETLEARN_TYPES_HPP
