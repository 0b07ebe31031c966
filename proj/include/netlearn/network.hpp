#ifndef NETLEARN_NETWORK_HPP
#define NETLEARN_NETWORK_HPP

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netlearn/rng.hpp"
#include "netlearn/types.hpp"

namespace netlearn {

struct TopologySpec {
  enum class Kind { FullyConnected, ErdosRenyi, BarabasiAlbert };

  Kind kind = Kind::FullyConnected;
  int n = 0;
  double p = 0.5;     // ErdosRenyi edge probability, (0,1]
  int m_attach = 1;   // BarabasiAlbert attachments per new node, < n
  std::uint64_t seed = 0;
};

inline void validate_topology_spec(const TopologySpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("TopologySpec: n");
  if (spec.kind == TopologySpec::Kind::ErdosRenyi && !(spec.p > 0.0 && spec.p <= 1.0))
    throw std::invalid_argument("TopologySpec: p must lie in (0,1]");
  if (spec.kind == TopologySpec::Kind::BarabasiAlbert &&
      (spec.m_attach < 1 || spec.m_attach >= spec.n))
    throw std::invalid_argument("TopologySpec: m_attach must lie in [1, n)");
}

namespace detail {

inline Eigen::MatrixXi sample_adjacency(const TopologySpec& spec, std::mt19937_64& rng) {
  const int n = spec.n;
  Eigen::MatrixXi C = Eigen::MatrixXi::Identity(n, n);
  switch (spec.kind) {
    case TopologySpec::Kind::FullyConnected:
      C.setOnes();
      break;
    case TopologySpec::Kind::ErdosRenyi: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (u(rng) < spec.p) C(i, j) = C(j, i) = 1;
      break;
    }
    case TopologySpec::Kind::BarabasiAlbert: {
      const int m = spec.m_attach;
      std::vector<int> endpoints;  // one entry per edge endpoint: degree-biased urn
      for (int i = 0; i <= m; ++i)
        for (int j = i + 1; j <= m; ++j) {
          C(i, j) = C(j, i) = 1;
          endpoints.push_back(i);
          endpoints.push_back(j);
        }
      for (int v = m + 1; v < n; ++v) {
        std::vector<int> targets;
        while (static_cast<int>(targets.size()) < m) {
          std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
          const int t = endpoints[pick(rng)];
          if (std::find(targets.begin(), targets.end(), t) == targets.end())
            targets.push_back(t);
        }
        for (int t : targets) {
          C(v, t) = C(t, v) = 1;
          endpoints.push_back(v);
          endpoints.push_back(t);
        }
      }
      break;
    }
  }
  return C;
}

}  // namespace detail

/// Generate a connected communication graph; ER/BA are resampled (bounded
/// retries) until connected. Deterministic for a fixed seed.
inline CommGraph make_comm_graph(const TopologySpec& spec) {
  validate_topology_spec(spec);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    auto rng = make_rng(fold_seed(spec.seed, static_cast<std::uint64_t>(attempt)));
    CommGraph g{detail::sample_adjacency(spec, rng)};
    if (comm_graph_connected(g.C)) {
      validate_comm_graph(g);
      return g;
    }
  }
  throw std::runtime_error("make_comm_graph: could not generate connected graph");
}

/// Connectivity level c(G) = ||C||_1 / N^2 (unit diagonal included).
inline double connectivity(const CommGraph& g) {
  const double n = static_cast<double>(g.n());
  return g.C.cast<double>().sum() / (n * n);
}

/// Communication accounting. Rows are cumulative totals at each round
/// barrier, so counts are nondecreasing within a run by construction.
class MessageLedger {
 public:
  struct Row {
    long round;
    long messages;
    long scalars;
    long hops;
  };

  void add(long messages, long scalars, long hops) {
    messages_ += messages;
    scalars_ += scalars;
    hops_ += hops;
  }

  void end_round() {
    ++round_;
    rows_.push_back(Row{round_, messages_, scalars_, hops_});
  }

  long rounds() const { return round_; }
  long total_messages() const { return messages_; }
  long total_scalars() const { return scalars_; }
  long total_hops() const { return hops_; }
  const std::vector<Row>& rows() const { return rows_; }

  std::string to_csv() const {
    std::ostringstream os;
    os << "round, messages, scalars, hops\n";
    for (const Row& r : rows_)
      os << r.round << ", " << r.messages << ", " << r.scalars << ", " << r.hops << "\n";
    return os.str();
  }

 private:
  long round_ = 0;
  long messages_ = 0;
  long scalars_ = 0;
  long hops_ = 0;
  std::vector<Row> rows_;
};

/// Simulated peer-to-peer layer. All cross-agent data flow goes through
/// send_along/aggregate_sum; any attempted send off the permitted support is
/// a hard failure. Channels are lossless and round-synchronized: payloads
/// staged with send_along become visible only after the next barrier.
class Network {
 public:
  using Delivery = std::pair<int, Vec>;  // (sender, payload)

  explicit Network(CommGraph comm) : comm_(std::move(comm)) {
    validate_comm_graph(comm_);
    staged_.resize(comm_.n());
    inbox_.resize(comm_.n());
  }

  const CommGraph& comm() const { return comm_; }
  MessageLedger& ledger() { return ledger_; }
  const MessageLedger& ledger() const { return ledger_; }
  long illegal_edge_events() const { return illegal_edge_events_; }

  /// Stage a payload along an edge of the communication graph.
  void send_along(int sender, int receiver, const Vec& payload) {
    require_edge(sender, receiver, comm_.edge(sender, receiver));
    stage(sender, receiver, payload);
  }

  /// Stage a payload along the support of a collaboration graph (which is
  /// itself constrained to live inside the communication graph).
  void send_along(int sender, int receiver, const Vec& payload,
                  const CollaborationGraph& support) {
    require_edge(sender, receiver,
                 comm_.edge(sender, receiver) && support.W(sender, receiver) > 0.0);
    stage(sender, receiver, payload);
  }

  /// Deliver staged payloads; one synchronous communication round.
  void barrier() {
    long delivered = 0;
    for (int i = 0; i < comm_.n(); ++i) {
      inbox_[i] = std::move(staged_[i]);
      staged_[i].clear();
      std::stable_sort(inbox_[i].begin(), inbox_[i].end(),
                       [](const Delivery& a, const Delivery& b) { return a.first < b.first; });
      delivered += static_cast<long>(inbox_[i].size());
    }
    ledger_.add(0, 0, delivered > 0 ? 1 : 0);
    ledger_.end_round();
  }

  const std::vector<Delivery>& inbox(int agent) const { return inbox_.at(agent); }

  /// Flooding all-reduce along C: every agent ends up holding the exact
  /// global sum. Each flooding step forwards an agent's currently known set
  /// of (origin, value) pairs to all neighbors; every agent then sums the
  /// collected values in origin-index order, so all copies are bit-identical.
  std::vector<Vec> aggregate_sum(const std::vector<Vec>& values) {
    const int n = comm_.n();
    if (static_cast<int>(values.size()) != n)
      throw std::invalid_argument("aggregate_sum: value count mismatch");
    const Eigen::Index len = values.empty() ? 0 : values[0].size();
    for (const Vec& v : values)
      if (v.size() != len) throw std::invalid_argument("aggregate_sum: ragged values");

    std::vector<std::vector<char>> have(n, std::vector<char>(n, 0));
    std::vector<std::vector<Vec>> known(n, std::vector<Vec>(n));
    for (int i = 0; i < n; ++i) {
      have[i][i] = 1;
      known[i][i] = values[i];
    }
    auto complete = [&] {
      for (int i = 0; i < n; ++i)
        for (int o = 0; o < n; ++o)
          if (!have[i][o]) return false;
      return true;
    };
    long hops = 0, messages = 0, scalars = 0;
    while (!complete()) {
      if (hops >= n) throw std::runtime_error("aggregate_sum: disconnected");
      ++hops;
      auto have_next = have;
      auto known_next = known;
      for (int i = 0; i < n; ++i) {
        long cnt = 0;
        for (int o = 0; o < n; ++o) cnt += have[i][o];
        for (int j = 0; j < n; ++j) {
          if (i == j || !comm_.edge(i, j)) continue;
          ++messages;
          scalars += cnt * static_cast<long>(len);
          for (int o = 0; o < n; ++o)
            if (have[i][o] && !have_next[j][o]) {
              have_next[j][o] = 1;
              known_next[j][o] = known[i][o];
            }
        }
      }
      have.swap(have_next);
      known.swap(known_next);
    }
    ledger_.add(messages, scalars, hops);
    ledger_.end_round();

    std::vector<Vec> out(n);
    for (int i = 0; i < n; ++i) {
      Vec sum = Vec::Zero(len);
      for (int o = 0; o < n; ++o) sum += known[i][o];
      out[i] = std::move(sum);
    }
    return out;
  }

 private:
  void require_edge(int sender, int receiver, bool legal) {
    const int n = comm_.n();
    if (sender < 0 || sender >= n || receiver < 0 || receiver >= n || sender == receiver)
      throw std::invalid_argument("send_along: bad endpoints");
    if (!legal) {
      ++illegal_edge_events_;
      throw std::runtime_error("send_along: illegal edge");
    }
  }

  void stage(int sender, int receiver, const Vec& payload) {
    staged_[receiver].emplace_back(sender, payload);
    ledger_.add(1, static_cast<long>(payload.size()), 0);
  }

  CommGraph comm_;
  std::vector<std::vector<Delivery>> staged_;
  std::vector<std::vector<Delivery>> inbox_;
  MessageLedger ledger_;
  long illegal_edge_events_ = 0;
};

}  // namespace netlearn

#endif  // NETLEARN_NETWORK_HPP
