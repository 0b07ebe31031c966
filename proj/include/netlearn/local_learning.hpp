#ifndef NETLEARN_LOCAL_LEARNING_HPP
#define NETLEARN_LOCAL_LEARNING_HPP

#include <cmath>
#include <stdexcept>

#include "netlearn/types.hpp"

namespace netlearn {

enum class LossKind { MSE, CrossEntropy };

struct LossSpec {
  LossKind kind = LossKind::MSE;
  int cls = 0;  // class count, CrossEntropy only

  /// Parameter dimension for feature dimension f.
  Eigen::Index param_dim(Eigen::Index f) const {
    return kind == LossKind::CrossEntropy ? f * cls : f;
  }
};

inline void validate_loss_spec(const LossSpec& loss) {
  if (loss.kind == LossKind::CrossEntropy) {
    if (loss.cls < 2) throw std::invalid_argument("LossSpec: CLS must be >= 2");
  } else if (loss.cls != 0) {
    throw std::invalid_argument("LossSpec: CLS only valid for CrossEntropy");
  }
}

/// Expansion point of the second-order Taylor surrogate. Fixed at the
/// origin by the pipeline; kept explicit so the memory update stays exact
/// for quadratic losses at any alpha.
using ExpansionPoint = Vec;

struct HessianGradient {
  Mat H;
  Vec g;
};

/// Mean per-sample loss of a batch at theta. Reference implementation used
/// by the finite-difference checks and the direct minimizers; the solvers
/// themselves only consume hessian_gradient.
inline double batch_loss(const TaskBatch& batch, const LossSpec& loss, const Vec& theta) {
  const Eigen::Index n = batch.n();
  if (n < 1) throw std::invalid_argument("TaskBatch: empty");
  const Eigen::Index f = batch.inputs.cols();
  if (theta.size() != loss.param_dim(f))
    throw std::invalid_argument("batch_loss: theta dimension mismatch");
  if (loss.kind == LossKind::MSE) {
    return (batch.inputs * theta - batch.targets).squaredNorm() / static_cast<double>(n);
  }
  const int cls = loss.cls;
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vec x = batch.inputs.row(j).transpose();
    Vec logits(cls);
    for (int c = 0; c < cls; ++c) logits(c) = theta.segment(c * f, f).dot(x);
    const double mx = logits.maxCoeff();
    const double lse = mx + std::log((logits.array() - mx).exp().sum());
    const int y = static_cast<int>(batch.targets(j));
    total += lse - logits(y);
  }
  return total / static_cast<double>(n);
}

/// Exact Hessian and gradient of the mean per-sample loss at alpha.
/// MSE: H = (2/n) X^T X (alpha-independent), g = (2/n) X^T (X alpha - y).
/// CrossEntropy (softmax): H = (1/n) sum_j M_j kron x_j x_j^T with
/// M_j = diag(p_j) - p_j p_j^T, g = (1/n) sum_j (p_j - onehot(y_j)) kron x_j,
/// parameters flattened class-major.
inline HessianGradient hessian_gradient(const TaskBatch& batch, const LossSpec& loss,
                                        const ExpansionPoint& alpha) {
  validate_loss_spec(loss);
  const Eigen::Index n = batch.n();
  if (n < 1) throw std::invalid_argument("TaskBatch: empty");
  if (batch.targets.size() != n)
    throw std::invalid_argument("TaskBatch: target length mismatch");
  const Eigen::Index f = batch.inputs.cols();
  const Eigen::Index p = loss.param_dim(f);
  if (alpha.size() != p)
    throw std::invalid_argument("hessian_gradient: alpha dimension mismatch");

  if (loss.kind == LossKind::MSE) {
    const double s = 2.0 / static_cast<double>(n);
    HessianGradient out;
    out.H = s * (batch.inputs.transpose() * batch.inputs);
    out.g = s * (batch.inputs.transpose() * (batch.inputs * alpha - batch.targets));
    return out;
  }

  const int cls = loss.cls;
  HessianGradient out{Mat::Zero(p, p), Vec::Zero(p)};
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double yraw = batch.targets(j);
    const int y = static_cast<int>(yraw);
    if (static_cast<double>(y) != yraw || y < 0 || y >= cls)
      throw std::invalid_argument("TaskBatch: label out of range");
    const Vec x = batch.inputs.row(j).transpose();
    Vec logits(cls);
    for (int c = 0; c < cls; ++c) logits(c) = alpha.segment(c * f, f).dot(x);
    Vec prob = (logits.array() - logits.maxCoeff()).exp();
    prob /= prob.sum();
    const Mat xx = x * x.transpose();
    for (int c = 0; c < cls; ++c) {
      out.g.segment(c * f, f) += inv_n * (prob(c) - (c == y ? 1.0 : 0.0)) * x;
      for (int c2 = 0; c2 < cls; ++c2) {
        const double mcc = (c == c2 ? prob(c) : 0.0) - prob(c) * prob(c2);
        out.H.block(c * f, c2 * f, f, f) += inv_n * mcc * xx;
      }
    }
  }
  return out;
}

/// Online memory update: A' = (t A + H) / (t+1), b' = (t b + H alpha - g) / (t+1),
/// t' = t + 1. Equal weight for every absorbed batch.
inline AgentMemory update_memory(const AgentMemory& mem, const Mat& H, const Vec& g,
                                 const ExpansionPoint& alpha) {
  if (mem.t < 0) throw std::invalid_argument("update_memory: negative t");
  const Eigen::Index p = mem.A.rows();
  if (H.rows() != p || H.cols() != p || g.size() != p || alpha.size() != p ||
      mem.b.size() != p)
    throw std::invalid_argument("update_memory: shape mismatch");
  const double t = static_cast<double>(mem.t);
  AgentMemory out;
  out.A = (t * mem.A + H) / (t + 1.0);
  out.b = (t * mem.b + H * alpha - g) / (t + 1.0);
  out.t = mem.t + 1;
  return out;
}

/// Local model initialization: solve (A + 2 lambda1 I) theta = b.
inline ModelParams local_init(const AgentMemory& mem, double lambda1) {
  if (mem.t < 1) throw std::invalid_argument("local_init: empty memory");
  if (lambda1 < 0.0) throw std::invalid_argument("local_init: negative lambda1");
  Mat sys = mem.A;
  sys.diagonal().array() += 2.0 * lambda1;
  Eigen::LDLT<Mat> ldlt(sys);
  const Vec theta = ldlt.solve(mem.b);
  const double scale = mem.A.norm() + 2.0 * lambda1;
  const double resid = (sys * theta - mem.b).norm();
  if (!theta.allFinite() || resid > 1e-10 * scale * std::max(1.0, theta.norm()))
    throw std::runtime_error("local_init: singular local system");
  return theta;
}

/// Fixed regression feature basis: [1, x, x^2, sin x, cos x, ..., sin Kx, cos Kx].
inline Mat featurize(const Vec& raw, int k_basis = 3) {
  if (k_basis < 0) throw std::invalid_argument("featurize: negative K");
  const Eigen::Index n = raw.size();
  const Eigen::Index f = 3 + 2 * static_cast<Eigen::Index>(k_basis);
  Mat out(n, f);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double x = raw(j);
    out(j, 0) = 1.0;
    out(j, 1) = x;
    out(j, 2) = x * x;
    for (int k = 1; k <= k_basis; ++k) {
      out(j, 1 + 2 * k) = std::sin(k * x);
      out(j, 2 + 2 * k) = std::cos(k * x);
    }
  }
  return out;
}

inline Eigen::Index feature_dim(int k_basis = 3) { return 3 + 2 * static_cast<Eigen::Index>(k_basis); }

}  // namespace netlearn

#endif  // NETLEARN_LOCAL_LEARNING_HPP
