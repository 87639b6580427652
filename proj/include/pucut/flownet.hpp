#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace pucut::flownet {

// Which terminal's arcs carry the lambda-dependent capacities. The other
// side has constant capacities.
//   Sink:   sink arcs grow with lambda, sink sets grow along a sweep.
//   Source: source arcs grow with lambda, source sets grow along a sweep.
enum class ParametricSide { Source, Sink };

// Capacity of a terminal-adjacent arc: constant + slope * lambda, or infinite.
struct TerminalCapacity {
  double constant = 0.0;
  double slope = 0.0;
  bool infinite = false;

  static TerminalCapacity Infinite() { return {0.0, 0.0, true}; }
  static TerminalCapacity Affine(double constant, double slope) {
    return {constant, slope, false};
  }

  double at(double lambda) const { return constant + slope * lambda; }
  bool is_zero() const { return !infinite && constant == 0.0 && slope == 0.0; }
};

struct Arc {
  int tail;
  int head;
  double capacity;
};

// (s,t)-graph over node_count non-terminal nodes. Terminals are implicit:
// every node has one source arc and one sink arc (zero capacity = absent).
class ParametricNetwork {
 public:
  ParametricNetwork(int node_count, ParametricSide side);

  // Internal arcs (i,j) and (j,i), both with capacity `weight`.
  void add_edge(int i, int j, double weight);
  void add_arc(int tail, int head, double capacity);
  void set_source_capacity(int node, TerminalCapacity capacity);
  void set_sink_capacity(int node, TerminalCapacity capacity);

  int node_count() const { return node_count_; }
  ParametricSide side() const { return side_; }
  std::span<const Arc> arcs() const { return arcs_; }
  const TerminalCapacity& source_capacity(int node) const {
    return source_[static_cast<std::size_t>(node)];
  }
  const TerminalCapacity& sink_capacity(int node) const {
    return sink_[static_cast<std::size_t>(node)];
  }

  // Finite surrogate for infinite arcs: 1 + sum of every finite capacity
  // evaluated at lambda_max. Strictly larger than any cut avoiding INF arcs.
  double infinite_capacity(double lambda_max) const;

  // Throws InputError if a finite capacity is negative at lambda.
  void check_capacities(double lambda) const;

 private:
  void check_node(int node) const;

  int node_count_;
  ParametricSide side_;
  std::vector<Arc> arcs_;
  std::vector<TerminalCapacity> source_;
  std::vector<TerminalCapacity> sink_;
};

// One minimum cut. source_side[i] != 0 iff node i lies with s.
struct CutPartition {
  double lambda = 0.0;
  std::vector<char> source_side;
  double cut_value = 0.0;

  bool in_source(int node) const {
    return source_side[static_cast<std::size_t>(node)] != 0;
  }
  std::size_t source_size() const;
};

struct PartitionSequence {
  ParametricSide side = ParametricSide::Sink;
  std::vector<double> lambdas;
  std::vector<CutPartition> partitions;

  // The growing side (sink sets for Sink, source sets for Source) forms an
  // inclusion chain along the sequence.
  bool is_nested() const;
};

// Capacity of arcs leaving {s} u source_side, evaluated at lambda. Returns
// +infinity when an infinite arc crosses the cut.
double cut_capacity(const ParametricNetwork& net,
                    std::span<const char> source_side, double lambda);

// Minimum cut at lambda with the minimal source set (nodes reachable from s
// in the residual graph of a maximum flow).
CutPartition min_cut(const ParametricNetwork& net, double lambda);

// Minimal minimum cuts for a strictly increasing lambda list. The flow of the
// previous solve is kept and nodes already committed to the growing side are
// merged into their terminal before the next solve.
PartitionSequence parametric_min_cut(const ParametricNetwork& net,
                                     std::span<const double> lambdas);

// DIMACS max-flow text for one lambda instantiation. Nodes are 1..n, s=n+1,
// t=n+2; infinite arcs use infinite_capacity(lambda).
void write_dimacs(std::ostream& out, const ParametricNetwork& net,
                  double lambda);

}  // namespace pucut::flownet
