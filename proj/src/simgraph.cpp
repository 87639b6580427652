#include "pucut/simgraph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "pucut/error.hpp"

namespace pucut {

void SampleSet::validate() const {
  if (features.size() != rows * cols) {
    throw InputError("feature matrix size does not match rows x cols");
  }
  for (const double v : features) {
    if (!std::isfinite(v)) throw InputError("feature values must be finite");
  }
  if (ids.size() != rows) throw InputError("one id per sample is required");
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw InputError("duplicate sample id '" + id + "'");
  }
  if (truth) {
    if (truth->size() != rows) throw InputError("one label per sample is required");
    for (const int y : *truth) {
      if (y != 1 && y != -1) throw InputError("labels must be 1 or -1");
    }
  }
}

FeatureWeights FeatureWeights::uniform(std::size_t features) {
  return FeatureWeights(std::vector<double>(features, 1.0));
}

FeatureWeights FeatureWeights::normalized(std::vector<double> raw) {
  double total = 0.0;
  for (const double r : raw) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw InputError("feature weights must be finite and nonnegative");
    }
    total += r;
  }
  if (!(total > 0.0)) throw InputError("feature weights must not all be zero");
  const double scale = static_cast<double>(raw.size()) / total;
  for (double& r : raw) r *= scale;
  return FeatureWeights(std::move(raw));
}

FeatureWeights FeatureWeights::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open feature weights file '" + path + "'");
  std::vector<double> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream cell(line);
    double value = 0.0;
    std::string rest;
    if (!(cell >> value) || (cell >> rest)) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected one number per line");
    }
    raw.push_back(value);
  }
  try {
    return normalized(std::move(raw));
  } catch (const InputError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::vector<std::vector<std::pair<int, double>>> SimilarityGraph::adjacency() const {
  std::vector<std::vector<std::pair<int, double>>> adj(
      static_cast<std::size_t>(node_count));
  for (const Edge& e : edges) {
    adj[e.i].emplace_back(e.j, e.weight);
    adj[e.j].emplace_back(e.i, e.weight);
  }
  return adj;
}

namespace simgraph {

double default_sigma(std::size_t samples) {
  return samples < kLargeDatasetThreshold ? kDefaultSigmaSmall
                                          : kDefaultSigmaLarge;
}

SampleSet standardize(const SampleSet& samples) {
  SampleSet out = samples;
  const std::size_t n = samples.rows;
  if (n == 0) return out;
  for (std::size_t h = 0; h < samples.cols; ++h) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += samples.at(i, h);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = samples.at(i, h) - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      out.features[i * samples.cols + h] =
          sd > 0.0 ? (samples.at(i, h) - mean) / sd : 0.0;
    }
  }
  return out;
}

namespace {

double squared_distance(std::span<const double> x, std::span<const double> y,
                        std::span<const double> rho) {
  double total = 0.0;
  for (std::size_t h = 0; h < x.size(); ++h) {
    const double d = x[h] - y[h];
    total += rho[h] * d * d;
  }
  return total;
}

unsigned worker_count(unsigned requested, std::size_t rows) {
  unsigned threads = requested == 0 ? std::thread::hardware_concurrency() : requested;
  threads = std::max(1u, threads);
  return static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, rows / 256)));
}

}  // namespace

double weighted_distance(std::span<const double> x, std::span<const double> y,
                         const FeatureWeights& rho) {
  if (x.size() != y.size() || x.size() != rho.size()) {
    throw InputError("dimension mismatch in weighted distance");
  }
  return std::sqrt(squared_distance(x, y, rho.values()));
}

double gaussian_similarity(double distance, double sigma) {
  if (!(sigma > 0.0)) throw InputError("sigma must be positive");
  if (!(distance >= 0.0)) throw InputError("distance must be nonnegative");
  const double w = std::exp(-(distance * distance) / (2.0 * sigma * sigma));
  return std::max(w, std::numeric_limits<double>::min());
}

NeighbourLists nearest_neighbours(const SampleSet& samples, std::size_t k,
                                  const FeatureWeights& rho, unsigned threads) {
  const std::size_t n = samples.rows;
  if (k < 1 || k >= n) {
    throw InputError("k must satisfy 1 <= k < N (k=" + std::to_string(k) +
                     ", N=" + std::to_string(n) + ")");
  }
  if (rho.size() != samples.cols) {
    throw InputError("feature weight count does not match feature count");
  }
  NeighbourLists lists;
  lists.k = k;
  lists.index.resize(n * k);
  const auto search = [&](std::size_t begin, std::size_t end) {
    std::vector<std::pair<double, int>> candidates;
    candidates.reserve(n - 1);
    const auto middle = static_cast<std::ptrdiff_t>(k);
    for (std::size_t i = begin; i < end; ++i) {
      candidates.clear();
      const auto xi = samples.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        candidates.emplace_back(squared_distance(xi, samples.row(j), rho.values()),
                                static_cast<int>(j));
      }
      // Pair ordering breaks distance ties by index.
      std::nth_element(candidates.begin(), candidates.begin() + middle - 1,
                       candidates.end());
      std::sort(candidates.begin(), candidates.begin() + middle);
      for (std::size_t r = 0; r < k; ++r) lists.index[i * k + r] = candidates[r].second;
    }
  };

  const unsigned workers = worker_count(threads, n);
  if (workers <= 1) {
    search(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(n, w * chunk);
      const std::size_t end = std::min(n, begin + chunk);
      pool.emplace_back(search, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  return lists;
}

std::vector<std::pair<int, int>> knn_edges(const NeighbourLists& lists,
                                           std::size_t k) {
  if (k < 1 || k > lists.k) throw InputError("k exceeds the neighbour lists");
  const std::size_t n = lists.k == 0 ? 0 : lists.index.size() / lists.k;
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = lists.of(i);
    for (std::size_t r = 0; r < k; ++r) {
      const int a = static_cast<int>(i);
      edges.emplace_back(std::min(a, row[r]), std::max(a, row[r]));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<std::pair<int, int>> knn_edges(const SampleSet& samples,
                                           std::size_t k,
                                           const FeatureWeights& rho,
                                           unsigned threads) {
  return knn_edges(nearest_neighbours(samples, k, rho, threads), k);
}

SimilarityGraph build_similarity_graph(const SampleSet& samples,
                                       const NeighbourLists& lists,
                                       std::size_t k, double sigma,
                                       const FeatureWeights& rho) {
  if (!(sigma > 0.0)) throw InputError("sigma must be positive");
  SimilarityGraph graph;
  graph.node_count = static_cast<int>(samples.rows);
  graph.degrees.assign(samples.rows, 0.0);
  for (const auto& [i, j] : knn_edges(lists, k)) {
    const double w = gaussian_similarity(
        weighted_distance(samples.row(i), samples.row(j), rho), sigma);
    graph.edges.push_back({i, j, w});
    graph.degrees[i] += w;
    graph.degrees[j] += w;
  }
  return graph;
}

SimilarityGraph build_similarity_graph(const SampleSet& samples, std::size_t k,
                                       double sigma, const FeatureWeights& rho,
                                       unsigned threads) {
  if (!(sigma > 0.0)) throw InputError("sigma must be positive");
  return build_similarity_graph(samples, nearest_neighbours(samples, k, rho, threads),
                                k, sigma, rho);
}

std::vector<double> complete_graph_degrees(const SampleSet& samples, double sigma,
                                           const FeatureWeights& rho) {
  std::vector<double> degrees(samples.rows, 0.0);
  for (std::size_t i = 0; i < samples.rows; ++i) {
    for (std::size_t j = i + 1; j < samples.rows; ++j) {
      const double w = gaussian_similarity(
          weighted_distance(samples.row(i), samples.row(j), rho), sigma);
      degrees[i] += w;
      degrees[j] += w;
    }
  }
  return degrees;
}

}  // namespace simgraph
}  // namespace pucut
