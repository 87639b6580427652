#include "pucut/hnc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pucut/error.hpp"

namespace pucut {

void PUSplit::validate(int n) const {
  if (positives.empty()) throw InputError("the positive labeled set is empty");
  if (unlabeled.empty()) throw InputError("the unlabeled set is empty");
  std::vector<char> seen(static_cast<std::size_t>(std::max(n, 0)), 0);
  for (const auto* part : {&positives, &unlabeled}) {
    for (const int i : *part) {
      if (i < 0 || i >= n) throw InputError("split index out of range");
      if (seen[i]) throw InputError("split sets overlap or repeat an index");
      seen[i] = 1;
    }
  }
  if (positives.size() + unlabeled.size() != static_cast<std::size_t>(n)) {
    throw InputError("split does not cover every sample");
  }
}

namespace hnc {

namespace {

using flownet::ParametricNetwork;
using flownet::ParametricSide;
using flownet::TerminalCapacity;

constexpr double kTieTolerance = 1e-12;

std::vector<char> seed_mask(int n, std::span<const int> seeds, const char* what) {
  std::vector<char> mask(static_cast<std::size_t>(n), 0);
  for (const int i : seeds) {
    if (i < 0 || i >= n) throw InputError(std::string(what) + " index out of range");
    mask[i] = 1;
  }
  return mask;
}

ParametricNetwork build_seeded(const SimilarityGraph& graph,
                               std::span<const int> positives,
                               std::span<const int> negatives, ParametricSide side) {
  const int n = graph.node_count;
  if (positives.empty()) throw InputError("the positive seed set is empty");
  const auto pos = seed_mask(n, positives, "positive seed");
  const auto neg = seed_mask(n, negatives, "negative seed");
  for (int i = 0; i < n; ++i) {
    if (pos[i] && neg[i]) throw InputError("positive and negative seeds overlap");
  }
  ParametricNetwork net(n, side);
  for (const Edge& e : graph.edges) net.add_edge(e.i, e.j, e.weight);
  for (int i = 0; i < n; ++i) {
    if (pos[i]) {
      net.set_source_capacity(i, TerminalCapacity::Infinite());
    } else if (neg[i]) {
      net.set_sink_capacity(i, TerminalCapacity::Infinite());
    } else if (graph.degrees[i] > 0.0) {
      const auto cap = TerminalCapacity::Affine(0.0, graph.degrees[i]);
      if (side == ParametricSide::Sink) {
        net.set_sink_capacity(i, cap);
      } else {
        net.set_source_capacity(i, cap);
      }
    }
  }
  return net;
}

CandidatePartition to_candidate(const flownet::CutPartition& cut, int stage,
                                std::size_t k) {
  CandidatePartition c;
  c.stage = stage;
  c.k = k;
  c.lambda = cut.lambda;
  c.cut_value = cut.cut_value;
  c.positive = cut.source_side;
  c.positive_count = cut.source_size();
  c.positive_fraction =
      static_cast<double>(c.positive_count) / static_cast<double>(cut.source_side.size());
  return c;
}

// True when a should be preferred over b at equal distance from the prior.
bool preferred_on_tie(const CandidatePartition& a, const CandidatePartition& b) {
  if (a.stage != b.stage) return a.stage > b.stage;
  if (a.k != b.k) return a.k > b.k;
  return a.lambda > b.lambda;
}

void check_prior(double pi) {
  if (!(pi > 0.0 && pi < 1.0)) throw InputError("pi must lie in (0, 1)");
}

bool stage1_complete(const flownet::CutPartition& last, std::span<const int> unlabeled) {
  return std::none_of(unlabeled.begin(), unlabeled.end(),
                      [&](int u) { return last.in_source(u); });
}

std::vector<double> extend_grid(std::span<const double> lambdas) {
  const double last = lambdas.back();
  const double step = lambdas.size() >= 2 ? lambdas[lambdas.size() - 1] -
                                                lambdas[lambdas.size() - 2]
                                          : kDefaultLambdaStep;
  const double stop = last > 0.0 ? 2.0 * last : step;
  std::vector<double> out(lambdas.begin(), lambdas.end());
  const double first = lambdas.front();
  // Index-based continuation keeps the appended values on the original grid.
  const std::size_t base = lambdas.size() - 1;
  for (std::size_t i = 1;; ++i) {
    const double value = first + static_cast<double>(base + i) * step;
    if (value > stop * (1.0 + 1e-12)) break;
    if (value > out.back()) out.push_back(value);
  }
  if (out.size() == lambdas.size()) out.push_back(stop);
  return out;
}

struct KOutcome {
  KDiagnostics diagnostics;
  std::vector<CandidatePartition> candidates;
};

KOutcome run_single_k(const SampleSet& samples, const simgraph::NeighbourLists& lists,
                      std::size_t k, double sigma, const FeatureWeights& rho,
                      const std::vector<double>* complete_degrees, const PUSplit& split,
                      double pi, std::span<const double> grid) {
  SimilarityGraph graph = simgraph::build_similarity_graph(samples, lists, k, sigma, rho);
  if (complete_degrees != nullptr) graph.degrees = *complete_degrees;

  KOutcome out;
  KDiagnostics& diag = out.diagnostics;
  diag.k = k;
  diag.edge_count = graph.edges.size();

  Ranking ranking = stage1_rank(graph, split, grid);
  diag.stage1_lambdas = ranking.sweep.lambdas;
  diag.stage1 = summarize(ranking.sweep);
  diag.ranking_nodes = ranking.nodes;
  diag.first_sink_index = ranking.first_sink_index;
  for (const auto& cut : ranking.sweep.partitions) {
    out.candidates.push_back(to_candidate(cut, 1, k));
  }

  diag.likely_negative = select_negative(ranking, pi, split.positives.size());
  if (!diag.likely_negative.empty()) {
    const auto stage2 = stage2_sweep(graph, split, diag.likely_negative, grid);
    diag.stage2 = summarize(stage2);
    for (const auto& cut : stage2.partitions) {
      out.candidates.push_back(to_candidate(cut, 2, k));
    }
  }
  for (const auto& c : out.candidates) {
    for (const int p : split.positives) {
      if (!c.positive[p]) throw std::logic_error("positive seed left the source set");
    }
    if (c.stage == 2) {
      for (const int u : diag.likely_negative) {
        if (c.positive[u]) throw std::logic_error("likely negative joined the source set");
      }
    }
  }
  diag.candidate = closest_to_prior(out.candidates, pi);
  return out;
}

}  // namespace

double mu_to_lambda(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw InputError("mu must be finite and nonnegative");
  return mu / (mu + 2.0);
}

std::vector<double> lambda_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw InputError("lambda step must be positive");
  if (!(start >= 0.0) || !(stop >= start) || !std::isfinite(stop)) {
    throw InputError("lambda grid requires 0 <= start <= stop");
  }
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = start + static_cast<double>(i) * step;
  return grid;
}

ParametricNetwork build_hnc_minus_network(const SimilarityGraph& graph,
                                          std::span<const int> positives,
                                          std::span<const int> negatives) {
  return build_seeded(graph, positives, negatives, ParametricSide::Sink);
}

ParametricNetwork build_hnc_plus_network(const SimilarityGraph& graph,
                                         std::span<const int> positives,
                                         std::span<const int> negatives) {
  return build_seeded(graph, positives, negatives, ParametricSide::Source);
}

ParametricNetwork build_stage1_network(const SimilarityGraph& graph, const PUSplit& split) {
  return build_hnc_minus_network(graph, split.positives, {});
}

ParametricNetwork build_stage2_network(const SimilarityGraph& graph, const PUSplit& split,
                                       std::span<const int> likely_negative) {
  if (likely_negative.empty()) throw InputError("the likely-negative set is empty");
  return build_hnc_plus_network(graph, split.positives, likely_negative);
}

Ranking stage1_rank(const SimilarityGraph& graph, const PUSplit& split,
                    std::span<const double> lambdas) {
  split.validate(graph.node_count);
  if (lambdas.empty()) throw InputError("the lambda grid is empty");
  const ParametricNetwork net = build_stage1_network(graph, split);

  std::vector<double> grid(lambdas.begin(), lambdas.end());
  Ranking ranking;
  for (int attempt = 0;; ++attempt) {
    ranking.sweep = flownet::parametric_min_cut(net, grid);
    if (stage1_complete(ranking.sweep.partitions.back(), split.unlabeled)) break;
    if (attempt == 64) throw std::runtime_error("stage-1 sweep failed to empty the source set");
    grid = extend_grid(grid);
  }
  if (!ranking.sweep.is_nested()) throw std::logic_error("stage-1 sink sets are not nested");

  std::vector<char> positive(static_cast<std::size_t>(graph.node_count), 0);
  for (const int p : split.positives) positive[p] = 1;
  std::vector<double> to_positives(static_cast<std::size_t>(graph.node_count), 0.0);
  for (const Edge& e : graph.edges) {
    if (positive[e.j]) to_positives[e.i] += e.weight;
    if (positive[e.i]) to_positives[e.j] += e.weight;
  }

  const auto& parts = ranking.sweep.partitions;
  ranking.nodes = split.unlabeled;
  for (const int u : split.unlabeled) {
    int q = 1;
    if (graph.degrees[u] > 0.0) {
      while (parts[static_cast<std::size_t>(q - 1)].in_source(u)) ++q;
    }
    ranking.first_sink_index.push_back(q);
    ranking.tie_key.push_back(to_positives[u]);
  }
  return ranking;
}

std::vector<int> select_negative(const Ranking& ranking, double pi,
                                 std::size_t positive_count) {
  check_prior(pi);
  const double target = (1.0 - pi) / pi * static_cast<double>(positive_count);
  auto count = static_cast<std::size_t>(std::floor(target + 0.5 + 1e-9));
  count = std::min(count, ranking.nodes.size());

  std::vector<std::size_t> order(ranking.nodes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (ranking.first_sink_index[a] != ranking.first_sink_index[b]) {
      return ranking.first_sink_index[a] < ranking.first_sink_index[b];
    }
    if (ranking.tie_key[a] != ranking.tie_key[b]) return ranking.tie_key[a] < ranking.tie_key[b];
    return ranking.nodes[a] < ranking.nodes[b];
  });
  std::vector<int> chosen;
  chosen.reserve(count);
  for (std::size_t r = 0; r < count; ++r) chosen.push_back(ranking.nodes[order[r]]);
  return chosen;
}

flownet::PartitionSequence stage2_sweep(const SimilarityGraph& graph, const PUSplit& split,
                                        std::span<const int> likely_negative,
                                        std::span<const double> lambdas) {
  const ParametricNetwork net = build_stage2_network(graph, split, likely_negative);
  auto sequence = flownet::parametric_min_cut(net, lambdas);
  if (!sequence.is_nested()) throw std::logic_error("stage-2 source sets are not nested");
  return sequence;
}

std::vector<SweepPoint> summarize(const flownet::PartitionSequence& sequence) {
  std::vector<SweepPoint> points;
  points.reserve(sequence.partitions.size());
  for (const auto& cut : sequence.partitions) {
    const std::size_t count = cut.source_size();
    points.push_back({cut.lambda, count,
                      static_cast<double>(count) / static_cast<double>(cut.source_side.size()),
                      cut.cut_value});
  }
  return points;
}

std::vector<std::size_t> default_k_list(std::size_t samples) {
  if (samples < simgraph::kLargeDatasetThreshold) return {5, 10, 15};
  return {5};
}

const CandidatePartition& closest_to_prior(std::span<const CandidatePartition> candidates,
                                           double pi) {
  if (candidates.empty()) throw InputError("no candidate partitions");
  const CandidatePartition* best = &candidates.front();
  for (const auto& c : candidates.subspan(1)) {
    const double d = std::abs(c.positive_fraction - pi);
    const double best_d = std::abs(best->positive_fraction - pi);
    if (d < best_d - kTieTolerance ||
        (std::abs(d - best_d) <= kTieTolerance && preferred_on_tie(c, *best))) {
      best = &c;
    }
  }
  return *best;
}

const CandidatePartition& select_final(std::span<const CandidatePartition> candidates,
                                       double pi) {
  if (candidates.empty()) throw InputError("no candidate partitions");
  std::optional<std::size_t> largest_k;
  for (const auto& c : candidates) {
    if (std::abs(c.positive_fraction - pi) > kPriorWindow + kTieTolerance) continue;
    if (!largest_k || c.k > *largest_k) largest_k = c.k;
  }
  if (!largest_k) return closest_to_prior(candidates, pi);
  // Ordinarily a single candidate per k; closest_to_prior settles duplicates.
  std::vector<std::size_t> same_k;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].k == *largest_k &&
        std::abs(candidates[i].positive_fraction - pi) <= kPriorWindow + kTieTolerance) {
      same_k.push_back(i);
    }
  }
  std::size_t best = same_k.front();
  for (const std::size_t i : same_k) {
    const double d = std::abs(candidates[i].positive_fraction - pi);
    const double best_d = std::abs(candidates[best].positive_fraction - pi);
    if (d < best_d - kTieTolerance ||
        (std::abs(d - best_d) <= kTieTolerance && preferred_on_tie(candidates[i], candidates[best]))) {
      best = i;
    }
  }
  return candidates[best];
}

Result run_2hnc(const SampleSet& samples, const PUSplit& split, const Config& config) {
  samples.validate();
  const int n = static_cast<int>(samples.rows);
  split.validate(n);
  check_prior(config.pi);
  const auto grid = lambda_grid(config.lambda_start, config.lambda_stop, config.lambda_step);

  auto k_list = config.k_list.empty() ? default_k_list(samples.rows) : config.k_list;
  std::sort(k_list.begin(), k_list.end());
  k_list.erase(std::unique(k_list.begin(), k_list.end()), k_list.end());
  for (const std::size_t k : k_list) {
    if (k < 1 || k >= samples.rows) {
      throw InputError("k=" + std::to_string(k) + " must satisfy 1 <= k < N");
    }
  }
  const double sigma = config.sigma.value_or(simgraph::default_sigma(samples.rows));
  const FeatureWeights rho = config.rho.value_or(FeatureWeights::uniform(samples.cols));
  if (rho.size() != samples.cols) {
    throw InputError("feature weight count does not match feature count");
  }
  const SampleSet working = config.standardize ? simgraph::standardize(samples) : samples;

  const unsigned threads = std::max(1u, config.threads);
  const auto lists = simgraph::nearest_neighbours(working, k_list.back(), rho, threads);
  std::optional<std::vector<double>> complete_degrees;
  if (config.complete_graph_degrees) {
    complete_degrees = simgraph::complete_graph_degrees(working, sigma, rho);
  }
  const auto* degrees = complete_degrees ? &*complete_degrees : nullptr;

  std::vector<KOutcome> outcomes(k_list.size());
  const auto run = [&](std::size_t idx) {
    outcomes[idx] = run_single_k(working, lists, k_list[idx], sigma, rho, degrees, split,
                                 config.pi, grid);
  };
  if (threads <= 1 || k_list.size() <= 1) {
    for (std::size_t idx = 0; idx < k_list.size(); ++idx) run(idx);
  } else {
    for (std::size_t begin = 0; begin < k_list.size(); begin += threads) {
      std::vector<std::future<void>> batch;
      for (std::size_t idx = begin; idx < std::min(k_list.size(), begin + threads); ++idx) {
        batch.push_back(std::async(std::launch::async, run, idx));
      }
      for (auto& f : batch) f.get();
    }
  }

  Result result;
  std::vector<CandidatePartition> per_k;
  for (auto& outcome : outcomes) {
    per_k.push_back(outcome.diagnostics.candidate);
    result.per_k.push_back(std::move(outcome.diagnostics));
  }
  result.chosen = select_final(per_k, config.pi);
  result.unlabeled = split.unlabeled;
  for (const int u : split.unlabeled) {
    result.predictions.push_back(result.chosen.positive[u] ? 1 : -1);
  }
  return result;
}

}  // namespace hnc
}  // namespace pucut
