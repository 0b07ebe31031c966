#ifndef NETLEARN_TASK_GEN_HPP
#define NETLEARN_TASK_GEN_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "netlearn/local_learning.hpp"
#include "netlearn/rng.hpp"
#include "netlearn/types.hpp"

namespace netlearn {

/// Data-quality profile of an agent type: how many samples per batch, how
/// wide the sampled subinterval is, and the label noise level. Type 1 sees
/// the full domain with low noise; types 2 and 3 see a unit-length window
/// with medium/high noise and fewer samples.
struct AgentTypeProfile {
  int batch_size;
  double interval_len;
  double sigma;
};

inline AgentTypeProfile type_profile(int type) {
  switch (type) {
    case 1: return AgentTypeProfile{20, 10.0, 0.1};
    case 2: return AgentTypeProfile{6, 1.0, 0.5};
    case 3: return AgentTypeProfile{3, 1.0, 1.0};
    default: throw std::invalid_argument("type_profile: agent type must be 1..3");
  }
}

/// Grouped regression stream: agents in the same group share a target
/// function built from the fixed feature basis (quadratic + sinusoids), so
/// every target is exactly representable and graph recovery has a ground
/// truth.
struct RegressionTaskSpec {
  static constexpr double kDomainLo = -5.0;
  static constexpr double kDomainHi = 5.0;

  int n_agents = 0;
  int k_basis = 3;
  std::vector<int> group;        // group id per agent
  std::vector<Vec> group_coeff;  // per-group coefficients in the feature basis
  std::vector<int> type;         // agent type, 1..3
  std::uint64_t seed = 0;

  int n_groups() const { return static_cast<int>(group_coeff.size()); }
};

inline RegressionTaskSpec sample_regression_scenario(int n, std::uint64_t seed, int k_basis = 3) {
  if (n < 4) throw std::invalid_argument("sample_regression_scenario: need N >= 4");
  RegressionTaskSpec spec;
  spec.n_agents = n;
  spec.k_basis = k_basis;
  spec.seed = seed;

  auto rng = make_rng(fold_seed(seed, 0x5ce9a51dULL));
  std::uniform_int_distribution<int> gdist(1, 3);
  int groups;
  do {
    groups = gdist(rng);
  } while (2 * groups > n);

  spec.group.resize(n);
  std::uniform_int_distribution<int> pick(0, groups - 1);
  for (int i = 0; i < n; ++i)
    spec.group[i] = i < 2 * groups ? i % groups : pick(rng);  // first 2G round-robin: >= 2 per group

  std::uniform_real_distribution<double> quad(-0.5, 0.5);
  std::uniform_real_distribution<double> sinw(-2.0, 2.0);
  const Eigen::Index f = feature_dim(k_basis);
  for (int g = 0; g < groups; ++g) {
    Vec coeff = Vec::Zero(f);
    coeff(2) = quad(rng);
    for (int k = 1; k <= k_basis; ++k) {
      coeff(1 + 2 * k) = sinw(rng);
      coeff(2 + 2 * k) = sinw(rng);
    }
    spec.group_coeff.push_back(coeff);
  }

  spec.type.resize(n);
  for (int i = 0; i < n; ++i) spec.type[i] = i % 3 + 1;
  return spec;
}

inline double true_function(const RegressionTaskSpec& spec, int group, double x) {
  const Mat row = featurize((Vec(1) << x).finished(), spec.k_basis);
  return row.row(0) * spec.group_coeff.at(group);
}

/// Draw agent `agent`'s batch for timestamp t. (seed, agent, t) fully
/// determine the batch. sigma_override >= 0 replaces the type's noise level
/// (used by noiseless diagnostics).
inline TaskBatch next_batch(const RegressionTaskSpec& spec, int agent, int t, std::uint64_t seed,
                            double sigma_override = -1.0) {
  if (agent < 0 || agent >= spec.n_agents) throw std::invalid_argument("next_batch: bad agent");
  const AgentTypeProfile prof = type_profile(spec.type.at(agent));
  const double sigma = sigma_override >= 0.0 ? sigma_override : prof.sigma;
  auto rng = make_rng(fold_seed(fold_seed(seed, 0xba7c4e5d00ULL + static_cast<std::uint64_t>(agent)),
                                static_cast<std::uint64_t>(t)));

  double lo = RegressionTaskSpec::kDomainLo, hi = RegressionTaskSpec::kDomainHi;
  if (prof.interval_len < hi - lo) {
    std::uniform_real_distribution<double> start(lo, hi - prof.interval_len);
    lo = start(rng);
    hi = lo + prof.interval_len;
  }
  std::uniform_real_distribution<double> xdist(lo, hi);
  std::normal_distribution<double> noise(0.0, 1.0);

  TaskBatch batch;
  batch.inputs.resize(prof.batch_size, 1);
  batch.targets.resize(prof.batch_size);
  for (int j = 0; j < prof.batch_size; ++j) {
    const double x = xdist(rng);
    batch.inputs(j, 0) = x;
    batch.targets(j) = true_function(spec, spec.group.at(agent), x) + sigma * noise(rng);
  }
  return batch;
}

/// Class-incremental blobs: two agent groups, each with its own set of five
/// 2-D Gaussian classes (disjoint across groups). Every timestamp delivers a
/// single-class batch; the class index cycles so all five classes have been
/// seen by t = 5. A fixed all-class test set per group is drawn at scenario
/// creation.
struct ClassIncrementalSpec {
  static constexpr int kTrainPerBatch = 10;
  static constexpr int kTestPerClass = 10;

  int n_agents = 0;
  int cls = 5;
  double sigma = 0.8;
  std::vector<int> group;                   // 0 or 1
  std::vector<Mat> centers;                 // per group: cls x 2
  std::vector<Mat> test_inputs;             // per group: 50 x 2 raw inputs
  std::vector<Eigen::VectorXi> test_labels; // per group: 50 labels
  std::vector<int> phase;                   // per agent: class-cycle offset
  std::uint64_t seed = 0;
};

inline ClassIncrementalSpec sample_classification_scenario(int n, std::uint64_t seed,
                                                           double sigma = 0.8) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("sample_classification_scenario: need even N >= 2");
  ClassIncrementalSpec spec;
  spec.n_agents = n;
  spec.sigma = sigma;
  spec.seed = seed;
  spec.group.resize(n);
  for (int i = 0; i < n; ++i) spec.group[i] = i < n / 2 ? 0 : 1;

  auto rng = make_rng(fold_seed(seed, 0xc1a55e5ULL));
  std::uniform_real_distribution<double> coord(-8.0, 8.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double min_sep = 5.0 * sigma;

  for (int g = 0; g < 2; ++g) {
    Mat centers(spec.cls, 2);
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 100000)
        throw std::runtime_error("sample_classification_scenario: could not separate blobs");
      for (int c = 0; c < spec.cls; ++c) {
        centers(c, 0) = coord(rng);
        centers(c, 1) = coord(rng);
      }
      bool ok = true;
      for (int a = 0; a < spec.cls && ok; ++a)
        for (int b = a + 1; b < spec.cls && ok; ++b)
          ok = (centers.row(a) - centers.row(b)).norm() >= min_sep;
      if (ok) break;
    }
    spec.centers.push_back(centers);

    Mat tin(spec.cls * ClassIncrementalSpec::kTestPerClass, 2);
    Eigen::VectorXi tlab(tin.rows());
    Eigen::Index r = 0;
    for (int c = 0; c < spec.cls; ++c)
      for (int j = 0; j < ClassIncrementalSpec::kTestPerClass; ++j, ++r) {
        tin(r, 0) = centers(c, 0) + sigma * gauss(rng);
        tin(r, 1) = centers(c, 1) + sigma * gauss(rng);
        tlab(r) = c;
      }
    spec.test_inputs.push_back(tin);
    spec.test_labels.push_back(tlab);
  }

  spec.phase.resize(n);
  std::uniform_int_distribution<int> ph(0, spec.cls - 1);
  for (int i = 0; i < n; ++i) spec.phase[i] = ph(rng);
  return spec;
}

inline TaskBatch next_class_batch(const ClassIncrementalSpec& spec, int agent, int t,
                                  std::uint64_t seed) {
  if (agent < 0 || agent >= spec.n_agents)
    throw std::invalid_argument("next_class_batch: bad agent");
  if (t < 1) throw std::invalid_argument("next_class_batch: t starts at 1");
  const int g = spec.group.at(agent);
  const int c = (t - 1 + spec.phase.at(agent)) % spec.cls;
  auto rng = make_rng(fold_seed(fold_seed(seed, 0xcba7c4e5dULL + static_cast<std::uint64_t>(agent)),
                                static_cast<std::uint64_t>(t)));
  std::normal_distribution<double> gauss(0.0, 1.0);
  TaskBatch batch;
  batch.inputs.resize(ClassIncrementalSpec::kTrainPerBatch, 2);
  batch.targets.resize(ClassIncrementalSpec::kTrainPerBatch);
  for (int j = 0; j < ClassIncrementalSpec::kTrainPerBatch; ++j) {
    batch.inputs(j, 0) = spec.centers[g](c, 0) + spec.sigma * gauss(rng);
    batch.inputs(j, 1) = spec.centers[g](c, 1) + spec.sigma * gauss(rng);
    batch.targets(j) = static_cast<double>(c);
  }
  return batch;
}

/// Fixed feature map for the classification task: raw 2-D input plus a bias
/// term, so class boundaries are affine.
inline Mat class_features(const Mat& raw) {
  Mat out(raw.rows(), raw.cols() + 1);
  out.leftCols(raw.cols()) = raw;
  out.col(raw.cols()).setOnes();
  return out;
}

/// Ground-truth collaboration graph: unit weights on same-group pairs,
/// rescaled to total mass m.
inline CollaborationGraph oracle_collaboration_graph(const std::vector<int>& group, double m) {
  const int n = static_cast<int>(group.size());
  Mat W = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && group[i] == group[j]) W(i, j) = 1.0;
  const double total = W.sum();
  if (total <= 0.0)
    throw std::invalid_argument("oracle_collaboration_graph: no same-group pair");
  W *= m / total;
  return CollaborationGraph{std::move(W), m};
}

inline CollaborationGraph oracle_collaboration_graph(const RegressionTaskSpec& spec, double m) {
  return oracle_collaboration_graph(spec.group, m);
}

inline CollaborationGraph oracle_collaboration_graph(const ClassIncrementalSpec& spec, double m) {
  return oracle_collaboration_graph(spec.group, m);
}

}  // namespace netlearn

#endif  // NETLEARN_TASK_GEN_HPP
