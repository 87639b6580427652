#include "pucut/flownet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

#include "pucut/error.hpp"

namespace pucut::flownet {

namespace {

const double kInfinity = std::numeric_limits<double>::infinity();

std::string describe(double lambda) { return std::to_string(lambda); }

// Residual graph over n + 2 nodes (s = n, t = n + 1) with Dinic augmentation.
// Nodes committed to a terminal are merged into it: committed-source nodes
// act as additional roots, committed-sink nodes as additional sinks.
class ParametricSolver {
 public:
  ParametricSolver(const ParametricNetwork& net, double lambda_max);

  CutPartition advance(double lambda);

 private:
  enum State : std::uint8_t { kFree, kAtSource, kAtSink };

  struct ParametricArc {
    int half_arc;
    int node;
    double capacity;
  };

  void add_pair(int u, int v, double cap_uv, double cap_vu);
  void finalize();
  bool sinkish(int v) const { return v == sink_ || state_[v] == kAtSink; }
  bool build_levels();
  double augment(int u, double pushed);
  void max_flow();

  const ParametricNetwork& net_;
  int n_;
  int source_;
  int sink_;
  double lambda_max_;
  double inf_;
  double tol_;
  double last_lambda_ = -kInfinity;

  // Staging lists before CSR conversion.
  std::vector<int> pair_tail_;
  std::vector<int> pair_head_;
  std::vector<double> pair_cap_;
  std::vector<double> pair_rev_cap_;

  std::vector<int> first_;
  std::vector<int> to_;
  std::vector<int> reverse_;
  std::vector<double> residual_;
  std::vector<int> pair_position_;

  std::vector<ParametricArc> parametric_;
  std::vector<State> state_;
  std::vector<int> level_;
  std::vector<int> current_;
  std::vector<int> queue_;
};

ParametricSolver::ParametricSolver(const ParametricNetwork& net,
                                   double lambda_max)
    : net_(net),
      n_(net.node_count()),
      source_(net.node_count()),
      sink_(net.node_count() + 1),
      lambda_max_(lambda_max),
      inf_(net.infinite_capacity(lambda_max)) {
  net.check_capacities(lambda_max);
  double scale = 1.0;
  const auto arcs = net.arcs();
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    scale = std::max(scale, arcs[a].capacity);
    // Consecutive antiparallel arcs share one residual pair.
    if (a + 1 < arcs.size() && arcs[a + 1].tail == arcs[a].head &&
        arcs[a + 1].head == arcs[a].tail) {
      add_pair(arcs[a].tail, arcs[a].head, arcs[a].capacity,
               arcs[a + 1].capacity);
      ++a;
      scale = std::max(scale, arcs[a].capacity);
    } else {
      add_pair(arcs[a].tail, arcs[a].head, arcs[a].capacity, 0.0);
    }
  }
  const bool source_parametric = net.side() == ParametricSide::Source;
  std::vector<std::pair<std::size_t, int>> pending;
  for (int i = 0; i < n_; ++i) {
    for (const bool is_source : {true, false}) {
      const TerminalCapacity& c =
          is_source ? net.source_capacity(i) : net.sink_capacity(i);
      if (c.is_zero()) continue;
      double cap = c.infinite ? inf_ : c.constant;
      const bool parametric = !c.infinite && is_source == source_parametric;
      if (!c.infinite) scale = std::max(scale, c.at(lambda_max));
      // Parametric arcs start at zero and are raised by advance().
      if (parametric) cap = 0.0;
      if (is_source) {
        add_pair(source_, i, cap, 0.0);
      } else {
        add_pair(i, sink_, cap, 0.0);
      }
      if (parametric) pending.emplace_back(pair_tail_.size() - 1, i);
    }
  }
  tol_ = scale * 1e-12;
  finalize();
  for (const auto& [pair, node] : pending) {
    parametric_.push_back({pair_position_[pair], node, 0.0});
  }
  state_.assign(static_cast<std::size_t>(n_ + 2), kFree);
  level_.assign(static_cast<std::size_t>(n_ + 2), -1);
  current_.assign(static_cast<std::size_t>(n_ + 2), 0);
  queue_.reserve(static_cast<std::size_t>(n_ + 2));
}

void ParametricSolver::add_pair(int u, int v, double cap_uv, double cap_vu) {
  pair_tail_.push_back(u);
  pair_head_.push_back(v);
  pair_cap_.push_back(cap_uv);
  pair_rev_cap_.push_back(cap_vu);
}

void ParametricSolver::finalize() {
  const int total = n_ + 2;
  const std::size_t pairs = pair_tail_.size();
  first_.assign(static_cast<std::size_t>(total + 1), 0);
  for (std::size_t p = 0; p < pairs; ++p) {
    ++first_[static_cast<std::size_t>(pair_tail_[p] + 1)];
    ++first_[static_cast<std::size_t>(pair_head_[p] + 1)];
  }
  for (int v = 0; v < total; ++v) first_[v + 1] += first_[v];
  std::vector<int> fill(first_.begin(), first_.end() - 1);
  to_.resize(2 * pairs);
  reverse_.resize(2 * pairs);
  residual_.resize(2 * pairs);
  pair_position_.resize(pairs);
  for (std::size_t p = 0; p < pairs; ++p) {
    const int fwd = fill[pair_tail_[p]]++;
    const int bwd = fill[pair_head_[p]]++;
    to_[fwd] = pair_head_[p];
    to_[bwd] = pair_tail_[p];
    reverse_[fwd] = bwd;
    reverse_[bwd] = fwd;
    residual_[fwd] = pair_cap_[p];
    residual_[bwd] = pair_rev_cap_[p];
    pair_position_[p] = fwd;
  }
  pair_tail_.clear();
  pair_head_.clear();
  pair_cap_.clear();
  pair_rev_cap_.clear();
}

bool ParametricSolver::build_levels() {
  std::fill(level_.begin(), level_.end(), -1);
  queue_.clear();
  level_[source_] = 0;
  queue_.push_back(source_);
  for (int i = 0; i < n_; ++i) {
    if (state_[i] == kAtSource) {
      level_[i] = 0;
      queue_.push_back(i);
    }
  }
  int sink_level = -1;
  for (std::size_t head = 0; head < queue_.size(); ++head) {
    const int u = queue_[head];
    if (sink_level >= 0 && level_[u] >= sink_level) break;
    for (int e = first_[u]; e < first_[u + 1]; ++e) {
      const int v = to_[e];
      if (level_[v] >= 0 || residual_[e] <= tol_) continue;
      if (sinkish(v)) {
        sink_level = level_[u] + 1;
        continue;
      }
      level_[v] = level_[u] + 1;
      queue_.push_back(v);
    }
  }
  return sink_level >= 0;
}

double ParametricSolver::augment(int u, double pushed) {
  for (int& e = current_[u]; e < first_[u + 1]; ++e) {
    if (residual_[e] <= tol_) continue;
    const int v = to_[e];
    double delivered = 0.0;
    if (sinkish(v)) {
      delivered = std::min(pushed, residual_[e]);
    } else if (level_[v] == level_[u] + 1) {
      delivered = augment(v, std::min(pushed, residual_[e]));
    }
    if (delivered > 0.0) {
      residual_[e] -= delivered;
      residual_[reverse_[e]] += delivered;
      return delivered;
    }
  }
  return 0.0;
}

void ParametricSolver::max_flow() {
  while (build_levels()) {
    for (int v = 0; v < n_ + 2; ++v) current_[v] = first_[v];
    for (int root = 0; root <= n_; ++root) {
      if (root != source_ && state_[root] != kAtSource) continue;
      while (augment(root, kInfinity) > 0.0) {
      }
    }
  }
}

CutPartition ParametricSolver::advance(double lambda) {
  if (!(lambda > last_lambda_)) {
    throw InputError("lambda values must be strictly increasing (got " +
                     describe(lambda) + " after " + describe(last_lambda_) +
                     ")");
  }
  if (lambda > lambda_max_) {
    throw InputError("lambda " + describe(lambda) +
                     " exceeds the solver range " + describe(lambda_max_));
  }
  net_.check_capacities(lambda);
  last_lambda_ = lambda;

  for (ParametricArc& arc : parametric_) {
    const TerminalCapacity& c = net_.side() == ParametricSide::Source
                                    ? net_.source_capacity(arc.node)
                                    : net_.sink_capacity(arc.node);
    const double capacity = c.at(lambda);
    residual_[arc.half_arc] += capacity - arc.capacity;
    arc.capacity = capacity;
  }

  max_flow();

  CutPartition cut;
  cut.lambda = lambda;
  cut.source_side.assign(static_cast<std::size_t>(n_), 0);
  for (int i = 0; i < n_; ++i) {
    const bool reachable = level_[i] >= 0;
    cut.source_side[i] = reachable ? 1 : 0;
    if (state_[i] != kFree) continue;
    if (net_.side() == ParametricSide::Sink && !reachable) {
      state_[i] = kAtSink;
    } else if (net_.side() == ParametricSide::Source && reachable) {
      state_[i] = kAtSource;
    }
  }
  cut.cut_value = cut_capacity(net_, cut.source_side, lambda);
  return cut;
}

}  // namespace

ParametricNetwork::ParametricNetwork(int node_count, ParametricSide side)
    : node_count_(node_count), side_(side) {
  if (node_count < 0) throw InputError("node count must be nonnegative");
  source_.resize(static_cast<std::size_t>(node_count));
  sink_.resize(static_cast<std::size_t>(node_count));
}

void ParametricNetwork::check_node(int node) const {
  if (node < 0 || node >= node_count_) {
    throw InputError("node index " + std::to_string(node) +
                     " out of range [0, " + std::to_string(node_count_) + ")");
  }
}

void ParametricNetwork::add_edge(int i, int j, double weight) {
  add_arc(i, j, weight);
  add_arc(j, i, weight);
}

void ParametricNetwork::add_arc(int tail, int head, double capacity) {
  check_node(tail);
  check_node(head);
  if (tail == head) throw InputError("self-loop arcs are not allowed");
  if (!(capacity >= 0.0) || !std::isfinite(capacity)) {
    throw InputError("internal arc capacity must be finite and nonnegative");
  }
  arcs_.push_back({tail, head, capacity});
}

void ParametricNetwork::set_source_capacity(int node,
                                            TerminalCapacity capacity) {
  check_node(node);
  if (!capacity.infinite && capacity.slope != 0.0) {
    if (side_ != ParametricSide::Source) {
      throw InputError("source arcs are not parametric in this network");
    }
    if (capacity.slope < 0.0) throw InputError("negative lambda coefficient");
  }
  source_[static_cast<std::size_t>(node)] = capacity;
}

void ParametricNetwork::set_sink_capacity(int node, TerminalCapacity capacity) {
  check_node(node);
  if (!capacity.infinite && capacity.slope != 0.0) {
    if (side_ != ParametricSide::Sink) {
      throw InputError("sink arcs are not parametric in this network");
    }
    if (capacity.slope < 0.0) throw InputError("negative lambda coefficient");
  }
  sink_[static_cast<std::size_t>(node)] = capacity;
}

double ParametricNetwork::infinite_capacity(double lambda_max) const {
  double total = 1.0;
  for (const Arc& a : arcs_) total += a.capacity;
  for (int i = 0; i < node_count_; ++i) {
    if (!source_[i].infinite) total += std::max(0.0, source_[i].at(lambda_max));
    if (!sink_[i].infinite) total += std::max(0.0, sink_[i].at(lambda_max));
  }
  return total;
}

void ParametricNetwork::check_capacities(double lambda) const {
  for (int i = 0; i < node_count_; ++i) {
    for (const TerminalCapacity* c : {&source_[i], &sink_[i]}) {
      if (c->infinite) continue;
      const double value = c->at(lambda);
      if (!(value >= 0.0) || !std::isfinite(value)) {
        throw InputError("terminal capacity of node " + std::to_string(i) +
                         " is negative or non-finite at lambda " +
                         describe(lambda));
      }
    }
  }
}

std::size_t CutPartition::source_size() const {
  return static_cast<std::size_t>(
      std::count(source_side.begin(), source_side.end(), char{1}));
}

bool PartitionSequence::is_nested() const {
  for (std::size_t p = 1; p < partitions.size(); ++p) {
    const auto& before = partitions[p - 1].source_side;
    const auto& after = partitions[p].source_side;
    for (std::size_t i = 0; i < before.size(); ++i) {
      // Source growth: once in S, stays in S. Sink growth: once out, stays out.
      if (side == ParametricSide::Source && before[i] && !after[i]) {
        return false;
      }
      if (side == ParametricSide::Sink && !before[i] && after[i]) return false;
    }
  }
  return true;
}

double cut_capacity(const ParametricNetwork& net,
                    std::span<const char> source_side, double lambda) {
  const int n = net.node_count();
  if (source_side.size() != static_cast<std::size_t>(n)) {
    throw InputError("source set indicator has wrong length");
  }
  double total = 0.0;
  for (const Arc& a : net.arcs()) {
    if (source_side[a.tail] && !source_side[a.head]) total += a.capacity;
  }
  for (int i = 0; i < n; ++i) {
    // s -> i crosses when i is on the sink side, i -> t when i is with s.
    const TerminalCapacity& c =
        source_side[i] ? net.sink_capacity(i) : net.source_capacity(i);
    if (c.is_zero()) continue;
    if (c.infinite) return kInfinity;
    total += c.at(lambda);
  }
  return total;
}

CutPartition min_cut(const ParametricNetwork& net, double lambda) {
  ParametricSolver solver(net, lambda);
  return solver.advance(lambda);
}

PartitionSequence parametric_min_cut(const ParametricNetwork& net,
                                     std::span<const double> lambdas) {
  PartitionSequence sequence;
  sequence.side = net.side();
  if (lambdas.empty()) return sequence;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] >= 0.0)) throw InputError("lambda values must be >= 0");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) {
      throw InputError("lambda values must be strictly increasing");
    }
  }
  ParametricSolver solver(net, lambdas.back());
  sequence.lambdas.assign(lambdas.begin(), lambdas.end());
  sequence.partitions.reserve(lambdas.size());
  for (const double lambda : lambdas) {
    sequence.partitions.push_back(solver.advance(lambda));
  }
  return sequence;
}

void write_dimacs(std::ostream& out, const ParametricNetwork& net,
                  double lambda) {
  const int n = net.node_count();
  const double inf = net.infinite_capacity(lambda);
  std::size_t terminal_arcs = 0;
  for (int i = 0; i < n; ++i) {
    if (net.source_capacity(i).infinite || net.source_capacity(i).at(lambda) > 0)
      ++terminal_arcs;
    if (net.sink_capacity(i).infinite || net.sink_capacity(i).at(lambda) > 0)
      ++terminal_arcs;
  }
  const auto value = [&](const TerminalCapacity& c) {
    return c.infinite ? inf : c.at(lambda);
  };
  out << "c parametric network at lambda " << std::setprecision(17) << lambda
      << "\n";
  out << "p max " << n + 2 << " " << net.arcs().size() + terminal_arcs << "\n";
  out << "n " << n + 1 << " s\n";
  out << "n " << n + 2 << " t\n";
  for (int i = 0; i < n; ++i) {
    const double cap = value(net.source_capacity(i));
    if (cap > 0) out << "a " << n + 1 << " " << i + 1 << " " << cap << "\n";
  }
  for (const Arc& a : net.arcs()) {
    out << "a " << a.tail + 1 << " " << a.head + 1 << " " << a.capacity << "\n";
  }
  for (int i = 0; i < n; ++i) {
    const double cap = value(net.sink_capacity(i));
    if (cap > 0) out << "a " << i + 1 << " " << n + 2 << " " << cap << "\n";
  }
}

}  // namespace pucut::flownet
