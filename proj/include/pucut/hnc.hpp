#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pucut/flownet.hpp"
#include "pucut/simgraph.hpp"

namespace pucut {

// Positive labeled samples and unlabeled samples, as sorted sample indices.
struct PUSplit {
  std::vector<int> positives;
  std::vector<int> unlabeled;

  // Disjoint, covering 0..n-1, both nonempty.
  void validate(int n) const;
};

// Stage-1 negativity ranking of the unlabeled samples.
struct Ranking {
  std::vector<int> nodes;               // unlabeled sample indices
  std::vector<int> first_sink_index;    // 1-based lambda index, per node
  std::vector<double> tie_key;          // similarity to the positive seeds
  flownet::PartitionSequence sweep;     // the stage-1 partitions
};

struct CandidatePartition {
  int stage = 1;
  std::size_t k = 0;
  double lambda = 0.0;
  double cut_value = 0.0;
  std::vector<char> positive;  // over all samples
  std::size_t positive_count = 0;
  double positive_fraction = 0.0;
};

struct SweepPoint {
  double lambda;
  std::size_t positive_count;
  double positive_fraction;
  double cut_value;
};

namespace hnc {

inline constexpr double kDefaultLambdaStop = 0.5;
inline constexpr double kDefaultLambdaStep = 0.001;
inline constexpr double kPriorWindow = 0.02;

// lambda = mu / (mu + 2).
double mu_to_lambda(double mu);

// Evenly spaced start, start+step, ..., up to stop (inclusive when it lands
// on the grid within rounding).
std::vector<double> lambda_grid(double start, double stop, double step);

// Seeded networks for
//   HNC-: min C(S, S') + lambda * sum_{i in S, i unseeded} d_i  (sink side)
//   HNC+: min C(S, S') + lambda * sum_{i in S', i unseeded} d_i (source side)
// subject to positives in S and negatives in S'.
flownet::ParametricNetwork build_hnc_minus_network(const SimilarityGraph& graph,
                                                   std::span<const int> positives,
                                                   std::span<const int> negatives);
flownet::ParametricNetwork build_hnc_plus_network(const SimilarityGraph& graph,
                                                  std::span<const int> positives,
                                                  std::span<const int> negatives);

flownet::ParametricNetwork build_stage1_network(const SimilarityGraph& graph,
                                                const PUSplit& split);
flownet::ParametricNetwork build_stage2_network(const SimilarityGraph& graph,
                                                const PUSplit& split,
                                                std::span<const int> likely_negative);

// HNC- sweep with positive seeds. The grid is extended by doubling its upper
// end until every unlabeled sample has joined the sink set.
Ranking stage1_rank(const SimilarityGraph& graph, const PUSplit& split,
                    std::span<const double> lambdas);

// round(((1 - pi) / pi) * positive_count) unlabeled samples (capped at |U|)
// with the smallest (first_sink_index, tie_key, sample index), most likely
// negative first.
std::vector<int> select_negative(const Ranking& ranking, double pi,
                                 std::size_t positive_count);

// HNC+ sweep seeded with the positives and the likely negatives.
flownet::PartitionSequence stage2_sweep(const SimilarityGraph& graph,
                                        const PUSplit& split,
                                        std::span<const int> likely_negative,
                                        std::span<const double> lambdas);

std::vector<SweepPoint> summarize(const flownet::PartitionSequence& sequence);

struct Config {
  double pi = 0.0;
  std::vector<std::size_t> k_list;  // empty: {5,10,15} below 10000 samples, else {5}
  std::optional<double> sigma;      // empty: 0.75 below 10000 samples, else 0.25
  double lambda_start = 0.0;
  double lambda_stop = kDefaultLambdaStop;
  double lambda_step = kDefaultLambdaStep;
  std::optional<FeatureWeights> rho;  // empty: uniform
  bool standardize = true;
  bool complete_graph_degrees = false;
  unsigned threads = 1;
};

std::vector<std::size_t> default_k_list(std::size_t samples);

struct KDiagnostics {
  std::size_t k = 0;
  std::size_t edge_count = 0;
  std::vector<double> stage1_lambdas;
  std::vector<SweepPoint> stage1;
  std::vector<SweepPoint> stage2;
  std::vector<int> ranking_nodes;
  std::vector<int> first_sink_index;
  std::vector<int> likely_negative;
  CandidatePartition candidate;
};

struct Result {
  std::vector<int> unlabeled;    // sample indices, as in the split
  std::vector<int> predictions;  // +1 / -1, aligned with unlabeled
  CandidatePartition chosen;
  std::vector<KDiagnostics> per_k;
};

// Picks the partition closest to pi; ties prefer stage 2, then larger k,
// then larger lambda.
const CandidatePartition& closest_to_prior(std::span<const CandidatePartition> candidates,
                                           double pi);

// Largest-k candidate within kPriorWindow of pi, else the closest overall.
const CandidatePartition& select_final(std::span<const CandidatePartition> candidates,
                                       double pi);

Result run_2hnc(const SampleSet& samples, const PUSplit& split, const Config& config);

}  // namespace hnc
}  // namespace pucut
