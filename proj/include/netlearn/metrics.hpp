#ifndef NETLEARN_METRICS_HPP
#define NETLEARN_METRICS_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "netlearn/local_learning.hpp"
#include "netlearn/task_gen.hpp"
#include "netlearn/types.hpp"

namespace netlearn {

/// Dense noiseless evaluation grid: featurized inputs plus the true function
/// values, so regression error is measured against the ground-truth function
/// rather than noisy samples.
struct TestGrid {
  Mat X;
  Vec y;
};

inline TestGrid regression_test_grid(const RegressionTaskSpec& spec, int group,
                                     int points = 1001) {
  if (points < 2) throw std::invalid_argument("regression_test_grid: points");
  Vec xs(points);
  const double lo = RegressionTaskSpec::kDomainLo, hi = RegressionTaskSpec::kDomainHi;
  for (int j = 0; j < points; ++j)
    xs(j) = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(points - 1);
  TestGrid grid;
  grid.X = featurize(xs, spec.k_basis);
  grid.y = grid.X * spec.group_coeff.at(group);
  return grid;
}

inline double eval_regression(const ModelParams& theta, const TestGrid& grid) {
  if (grid.X.cols() != theta.size())
    throw std::invalid_argument("eval_regression: dimension mismatch");
  return (grid.X * theta - grid.y).squaredNorm() / static_cast<double>(grid.X.rows());
}

/// Argmax-class accuracy over a featurized test set; ties break toward the
/// lower class index.
inline double eval_accuracy(const ModelParams& theta, const Mat& features,
                            const Eigen::VectorXi& labels, int cls) {
  const Eigen::Index n = features.rows();
  const Eigen::Index f = features.cols();
  if (theta.size() != f * cls) throw std::invalid_argument("eval_accuracy: dimension mismatch");
  if (labels.size() != n) throw std::invalid_argument("eval_accuracy: label count mismatch");
  long hits = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    int best = 0;
    double best_score = theta.segment(0, f).dot(features.row(j));
    for (int c = 1; c < cls; ++c) {
      const double s = theta.segment(c * f, f).dot(features.row(j));
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    if (best == labels(j)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

/// Normalized graph error ||W - W_oracle||_F / ||W_oracle||_F.
inline double gmse(const Mat& W, const Mat& W_oracle) {
  if (W.rows() != W_oracle.rows() || W.cols() != W_oracle.cols())
    throw std::invalid_argument("gmse: shape mismatch");
  const double denom = W_oracle.norm();
  if (denom == 0.0) throw std::invalid_argument("gmse: zero oracle graph");
  return (W - W_oracle).norm() / denom;
}

/// Lifelong cumulative metric L^(t): running mean of per-timestamp system
/// means (which are themselves means over agents).
inline double cumulative(const std::vector<double>& system_means) {
  if (system_means.empty()) throw std::invalid_argument("cumulative: no records");
  double total = 0.0;
  for (double v : system_means) total += v;
  return total / static_cast<double>(system_means.size());
}

struct MetricRecord {
  int t = 0;
  std::string metric_kind;           // "mse" or "accuracy"
  std::vector<double> agent_metric;  // per-agent task metric
  double system_mean = 0.0;
  double gmse_value = 0.0;
  double cumulative_value = 0.0;
  long messages = 0;         // ledger totals accumulated during this timestep
  long payload_scalars = 0;
  int rounds_graph = 0;
  int rounds_jacobi = 0;
};

}  // namespace netlearn

#endif  // NETLEARN_METRICS_HPP
