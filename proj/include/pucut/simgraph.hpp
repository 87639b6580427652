#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pucut {

// N x H feature matrix (row-major), sample ids and optional ground truth
// labels in {+1, -1}.
struct SampleSet {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> features;
  std::vector<std::string> ids;
  std::optional<std::vector<int>> truth;

  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * cols, cols};
  }
  double at(std::size_t i, std::size_t h) const { return features[i * cols + h]; }

  // Throws InputError on ragged data, non-finite values, duplicate ids or
  // labels outside {+1, -1}.
  void validate() const;
};

// Nonnegative per-feature weights, normalized so they sum to the number of
// features.
class FeatureWeights {
 public:
  static FeatureWeights uniform(std::size_t features);
  // Throws InputError on negative, non-finite or all-zero input.
  static FeatureWeights normalized(std::vector<double> raw);
  // One number per line; blank lines are ignored. Throws DataError.
  static FeatureWeights load(const std::string& path);

  std::span<const double> values() const { return rho_; }
  std::size_t size() const { return rho_.size(); }

 private:
  explicit FeatureWeights(std::vector<double> rho) : rho_(std::move(rho)) {}
  std::vector<double> rho_;
};

struct Edge {
  int i;
  int j;
  double weight;
};

// Undirected weighted graph; edges are stored once with i < j, sorted.
struct SimilarityGraph {
  int node_count = 0;
  std::vector<Edge> edges;
  std::vector<double> degrees;

  // Per-node adjacency derived from edges: (neighbor, weight).
  std::vector<std::vector<std::pair<int, double>>> adjacency() const;
};

namespace simgraph {

inline constexpr double kDefaultSigmaSmall = 0.75;
inline constexpr double kDefaultSigmaLarge = 0.25;
inline constexpr std::size_t kLargeDatasetThreshold = 10000;

// sigma = 0.75 below 10000 samples, 0.25 otherwise.
double default_sigma(std::size_t samples);

// Column-wise z-scores with the population standard deviation. Constant
// columns become zero.
SampleSet standardize(const SampleSet& samples);

double weighted_distance(std::span<const double> x, std::span<const double> y,
                         const FeatureWeights& rho);

// exp(-d^2 / (2 sigma^2)), floored at the smallest normal double so that
// every kept edge has a strictly positive weight.
double gaussian_similarity(double distance, double sigma);

// Exact k nearest neighbours of every sample, nearest first. Distance ties
// go to the smaller sample index. Row i occupies index[i*k .. i*k+k).
struct NeighbourLists {
  std::size_t k = 0;
  std::vector<int> index;

  std::span<const int> of(std::size_t i) const { return {index.data() + i * k, k}; }
};

// Brute-force search; `threads` caps the worker count (0 = hardware).
NeighbourLists nearest_neighbours(const SampleSet& samples, std::size_t k,
                                  const FeatureWeights& rho,
                                  unsigned threads = 1);

// Symmetric union of the directed kNN relation as sorted (i, j), i < j.
// The list overload uses the first k entries of each row (k <= lists.k).
std::vector<std::pair<int, int>> knn_edges(const NeighbourLists& lists,
                                           std::size_t k);
std::vector<std::pair<int, int>> knn_edges(const SampleSet& samples,
                                           std::size_t k,
                                           const FeatureWeights& rho,
                                           unsigned threads = 1);

// Gaussian weights on kNN edges; degrees are sums over the kept edges only.
SimilarityGraph build_similarity_graph(const SampleSet& samples,
                                       const NeighbourLists& lists,
                                       std::size_t k, double sigma,
                                       const FeatureWeights& rho);
SimilarityGraph build_similarity_graph(const SampleSet& samples, std::size_t k,
                                       double sigma, const FeatureWeights& rho,
                                       unsigned threads = 1);

// d_i summed over every other sample instead of the kNN edges (O(N^2)).
std::vector<double> complete_graph_degrees(const SampleSet& samples, double sigma,
                                           const FeatureWeights& rho);

}  // namespace simgraph
}  // namespace pucut
