#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <random>

#include "oracles.hpp"
#include "pucut/data.hpp"
#include "pucut/error.hpp"
#include "pucut/hnc.hpp"
#include "reductions.hpp"

namespace {

using namespace pucut;

SimilarityGraph graph_from(int n, std::vector<Edge> edges) {
  SimilarityGraph g;
  g.node_count = n;
  g.edges = std::move(edges);
  g.degrees.assign(static_cast<std::size_t>(n), 0.0);
  for (const auto& e : g.edges) {
    g.degrees[e.i] += e.weight;
    g.degrees[e.j] += e.weight;
  }
  return g;
}

// Minimal minimizer of C(S,S') + lambda * sum_{i in S, i in U} d_i over
// S containing the positives, by enumeration.
std::uint32_t brute_stage1_set(const SimilarityGraph& g, std::uint32_t positives,
                               double lambda) {
  const std::uint32_t all = (1u << g.node_count) - 1u;
  std::vector<double> value(all + 1, oracle::kInf);
  double best = oracle::kInf;
  for (std::uint32_t s = 0; s <= all; ++s) {
    if ((s & positives) != positives) continue;
    double v = oracle::similarities(g, s).between;
    for (int i = 0; i < g.node_count; ++i) {
      if (((s >> i) & 1u) && !((positives >> i) & 1u)) v += lambda * g.degrees[i];
    }
    value[s] = v;
    best = std::min(best, v);
  }
  std::uint32_t minimal = all;
  for (std::uint32_t s = 0; s <= all; ++s) {
    if (value[s] <= best + 1e-12) minimal &= s;
  }
  return minimal;
}

// First 1-based lambda index at which u leaves every minimal optimum.
std::vector<int> brute_first_sink(const SimilarityGraph& g, const PUSplit& split,
                                  const std::vector<double>& lambdas) {
  const auto pos = oracle::mask_of(split.positives);
  std::vector<int> q;
  for (const int u : split.unlabeled) {
    int idx = 0;
    while (idx < static_cast<int>(lambdas.size()) &&
           ((brute_stage1_set(g, pos, lambdas[idx]) >> u) & 1u)) {
      ++idx;
    }
    q.push_back(idx + 1);
  }
  return q;
}

TEST(MuToLambda, Examples) {
  EXPECT_EQ(hnc::mu_to_lambda(0.0), 0.0);
  EXPECT_EQ(hnc::mu_to_lambda(2.0), 0.5);
  EXPECT_LT(hnc::mu_to_lambda(1e12), 1.0);
  EXPECT_LT(hnc::mu_to_lambda(1.0), hnc::mu_to_lambda(1.5));
  EXPECT_THROW(hnc::mu_to_lambda(-0.1), InputError);
}

TEST(LambdaGrid, DefaultHas501Points) {
  const auto grid = hnc::lambda_grid(0.0, 0.5, 0.001);
  ASSERT_EQ(grid.size(), 501u);
  EXPECT_EQ(grid.front(), 0.0);
  EXPECT_DOUBLE_EQ(grid.back(), 0.5);
  EXPECT_THROW(hnc::lambda_grid(0.0, 0.5, 0.0), InputError);
}

TEST(Stage1Network, Construction) {
  const auto g = graph_from(2, {{0, 1, 1.0}});
  const PUSplit split{{0}, {1}};
  const auto net = hnc::build_stage1_network(g, split);
  EXPECT_EQ(net.side(), flownet::ParametricSide::Sink);
  EXPECT_TRUE(net.source_capacity(0).infinite);
  EXPECT_TRUE(net.source_capacity(1).is_zero());
  EXPECT_EQ(net.sink_capacity(1).slope, 1.0);
  EXPECT_EQ(net.sink_capacity(1).constant, 0.0);
  ASSERT_EQ(net.arcs().size(), 2u);
  EXPECT_EQ(net.arcs()[0].capacity, 1.0);

  EXPECT_EQ(flownet::min_cut(net, 0.0).source_size(), 2u);
  const auto late = flownet::min_cut(net, 2.0);
  EXPECT_TRUE(late.in_source(0));
  EXPECT_FALSE(late.in_source(1));
  EXPECT_THROW(hnc::build_stage1_network(g, PUSplit{{}, {0, 1}}), InputError);
}

TEST(Stage2Network, ThreeNodeExample) {
  // a = 0 (positive), b = 1 (unlabeled), c = 2 (likely negative).
  const auto g = graph_from(3, {{0, 1, 1.0}, {1, 2, 2.0}});
  const PUSplit split{{0}, {1, 2}};
  const std::vector<int> negatives{2};
  const auto net = hnc::build_stage2_network(g, split, negatives);
  EXPECT_EQ(net.side(), flownet::ParametricSide::Source);
  EXPECT_TRUE(net.source_capacity(0).infinite);
  EXPECT_EQ(net.source_capacity(1).slope, 3.0);
  EXPECT_TRUE(net.sink_capacity(2).infinite);

  const auto at_zero = flownet::min_cut(net, 0.0);
  EXPECT_EQ(oracle::to_mask(at_zero.source_side), oracle::brute_min_cut(net, 0.0).minimal_source);
  EXPECT_EQ(oracle::to_mask(at_zero.source_side), 0b001u);
  const auto large = flownet::min_cut(net, 5.0);
  EXPECT_EQ(oracle::to_mask(large.source_side), 0b011u);

  const std::vector<int> overlap{0};
  EXPECT_THROW(hnc::build_stage2_network(g, split, overlap), InputError);
  EXPECT_THROW(hnc::build_stage2_network(g, split, {}), InputError);
}

TEST(Stage1Rank, LessSimilarNodeIsSelectedFirst) {
  // a = 0 positive; b = 1 close to a; c = 2 far from a. With every neighbour
  // of c on the source side, c cannot leave before b, so both join the sink
  // set at lambda = 1.1 / 1.3 and the similarity key separates them.
  const auto g = graph_from(3, {{0, 1, 1.0}, {0, 2, 0.1}, {1, 2, 0.1}});
  const PUSplit split{{0}, {1, 2}};
  const auto ranking = hnc::stage1_rank(g, split, hnc::lambda_grid(0.0, 0.5, 0.001));
  ASSERT_EQ(ranking.nodes, split.unlabeled);
  EXPECT_EQ(ranking.first_sink_index, brute_first_sink(g, split, ranking.sweep.lambdas));
  EXPECT_EQ(ranking.first_sink_index, (std::vector<int>{848, 848}));
  EXPECT_LT(ranking.tie_key[1], ranking.tie_key[0]);
  // pi = 0.5 with one positive selects a single sample.
  EXPECT_EQ(hnc::select_negative(ranking, 0.5, 1), (std::vector<int>{2}));
  EXPECT_TRUE(ranking.sweep.is_nested());
}

TEST(Stage1Rank, LessSimilarPairLeavesFirst) {
  // c = 2 and d = 3 are tied to each other and barely to the positive.
  const auto g = graph_from(4, {{0, 1, 1.0}, {0, 2, 0.1}, {2, 3, 1.0}, {1, 3, 0.05}});
  const PUSplit split{{0}, {1, 2, 3}};
  const auto ranking = hnc::stage1_rank(g, split, hnc::lambda_grid(0.0, 0.5, 0.001));
  const auto& q = ranking.first_sink_index;
  EXPECT_EQ(q, brute_first_sink(g, split, ranking.sweep.lambdas));
  EXPECT_EQ(q, (std::vector<int>{906, 71, 71}));
}

TEST(Stage1Rank, DuplicateOfPositiveRanksLast) {
  // Sample 1 duplicates the positive sample 0.
  SampleSet s;
  s.cols = 1;
  s.rows = 4;
  s.features = {0.0, 0.0, 0.6, 1.5};
  s.ids = {"a", "b", "c", "d"};
  const auto g = simgraph::build_similarity_graph(s, 2, 0.75, FeatureWeights::uniform(1));
  const PUSplit split{{0}, {1, 2, 3}};
  const auto ranking = hnc::stage1_rank(g, split, hnc::lambda_grid(0.0, 0.5, 0.001));
  const auto& q = ranking.first_sink_index;
  EXPECT_EQ(q, brute_first_sink(g, split, ranking.sweep.lambdas));
  EXPECT_EQ(q[0], *std::max_element(q.begin(), q.end()));
}

TEST(Stage1Rank, SingleUnlabeledSample) {
  const auto g = graph_from(2, {{0, 1, 0.5}});
  const PUSplit split{{0}, {1}};
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0, 1.25};
  const auto ranking = hnc::stage1_rank(g, split, grid);
  // Staying costs 0.5 * lambda against 0.5 for leaving; at lambda = 1 the
  // two tie and the minimal source set drops the node.
  int first_nonempty = 0;
  while (ranking.sweep.partitions[first_nonempty].in_source(1)) ++first_nonempty;
  EXPECT_EQ(ranking.first_sink_index[0], first_nonempty + 1);
  EXPECT_EQ(ranking.first_sink_index[0], 5);
}

TEST(Stage1Rank, ExtendsTheGridUntilTheSinkSetIsFull) {
  // Nodes 1 and 2 hang off the positive almost exclusively, so neither
  // leaves the source set before lambda = 0.98.
  const auto g = graph_from(3, {{0, 1, 1.0}, {1, 2, 0.01}});
  const PUSplit split{{0}, {1, 2}};
  const auto ranking = hnc::stage1_rank(g, split, hnc::lambda_grid(0.0, 0.5, 0.001));
  EXPECT_GT(ranking.sweep.lambdas.back(), 0.5);
  EXPECT_GT(ranking.first_sink_index[0], 501);
  for (const int u : split.unlabeled) {
    EXPECT_FALSE(ranking.sweep.partitions.back().in_source(u));
  }
  EXPECT_EQ(ranking.first_sink_index, brute_first_sink(g, split, ranking.sweep.lambdas));
}

TEST(Stage1Rank, IsolatedNodeIsImmediatelyNegative) {
  const auto g = graph_from(3, {{0, 1, 1.0}});
  const PUSplit split{{0}, {1, 2}};
  const auto ranking = hnc::stage1_rank(g, split, hnc::lambda_grid(0.0, 0.5, 0.01));
  EXPECT_EQ(ranking.first_sink_index[1], 1);
}

TEST(Stage1Rank, RefiningTheGridDoesNotRaiseIndices) {
  std::mt19937_64 rng(4);
  const auto g = oracle::random_graph(rng, 9, 0.5);
  const PUSplit split{{0, 1}, {2, 3, 4, 5, 6, 7, 8}};
  const auto coarse = hnc::stage1_rank(g, split, hnc::lambda_grid(0.0, 1.0, 0.1));
  const auto fine = hnc::stage1_rank(g, split, hnc::lambda_grid(0.0, 1.0, 0.05));
  // Index j on the coarse grid is index 2j - 1 on the fine one.
  for (std::size_t r = 0; r < split.unlabeled.size(); ++r) {
    EXPECT_LE(fine.first_sink_index[r], 2 * coarse.first_sink_index[r] - 1);
  }
}

Ranking manual_ranking(std::vector<int> nodes, std::vector<int> q, std::vector<double> key) {
  Ranking r;
  r.nodes = std::move(nodes);
  r.first_sink_index = std::move(q);
  r.tie_key = std::move(key);
  return r;
}

TEST(SelectNegative, Counts) {
  std::vector<int> nodes(300);
  for (int i = 0; i < 300; ++i) nodes[i] = i + 1000;
  const auto ranking = manual_ranking(nodes, std::vector<int>(300, 1), std::vector<double>(300, 0));
  EXPECT_EQ(hnc::select_negative(ranking, 0.5, 10).size(), 10u);
  EXPECT_EQ(hnc::select_negative(ranking, 0.61, 160).size(), 102u);
  const auto small = manual_ranking({1, 2, 3, 4, 5}, {1, 1, 1, 1, 1}, {0, 0, 0, 0, 0});
  EXPECT_EQ(hnc::select_negative(small, 0.9, 100).size(), 5u);
  EXPECT_THROW(hnc::select_negative(small, 1.0, 10), InputError);
  EXPECT_THROW(hnc::select_negative(small, 0.0, 10), InputError);
}

TEST(SelectNegative, OrdersByIndexThenSimilarityThenSample) {
  const auto ranking =
      manual_ranking({10, 11, 12, 13, 14}, {3, 1, 1, 2, 1}, {0.0, 0.5, 0.2, 0.0, 0.2});
  // pi = 0.5 with 4 positives selects 4 samples.
  const auto chosen = hnc::select_negative(ranking, 0.5, 4);
  const std::vector<int> expected{12, 14, 11, 13};
  EXPECT_EQ(chosen, expected);
}

CandidatePartition candidate(int stage, std::size_t k, double lambda, double fraction) {
  CandidatePartition c;
  c.stage = stage;
  c.k = k;
  c.lambda = lambda;
  c.positive_fraction = fraction;
  return c;
}

TEST(Selection, ClosestWithTieBreaks) {
  const std::vector<CandidatePartition> c{
      candidate(1, 5, 0.1, 0.40), candidate(1, 5, 0.2, 0.55), candidate(2, 5, 0.05, 0.45),
      candidate(2, 5, 0.3, 0.55), candidate(1, 5, 0.4, 0.45)};
  const auto& best = hnc::closest_to_prior(c, 0.5);
  EXPECT_EQ(best.stage, 2);
  EXPECT_EQ(best.lambda, 0.3);
  const std::vector<CandidatePartition> exact{candidate(1, 5, 0.1, 0.5),
                                              candidate(2, 5, 0.2, 0.51)};
  EXPECT_EQ(hnc::closest_to_prior(exact, 0.5).stage, 1);
}

TEST(Selection, LargestKWithinWindow) {
  const std::vector<CandidatePartition> per_k{candidate(2, 5, 0.1, 0.500),
                                              candidate(2, 10, 0.1, 0.515),
                                              candidate(2, 15, 0.1, 0.600)};
  EXPECT_EQ(hnc::select_final(per_k, 0.5).k, 10u);
  const std::vector<CandidatePartition> none{candidate(2, 5, 0.1, 0.45),
                                             candidate(2, 10, 0.1, 0.60)};
  EXPECT_EQ(hnc::select_final(none, 0.5).k, 5u);
}

TEST(Reduction, HncMinusMatchesBruteForce) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 10)(rng);
    const auto g = oracle::random_graph(rng, n, 0.6);
    const std::vector<int> pos{0};
    const double mu = std::array<double, 5>{0.1, 0.5, 1, 2, 5}[trial % 5];
    const double brute = oracle::brute_seeded_min(
        g, 1u, 0u, [mu](const oracle::Similarities& s) { return s.between - mu * s.outside; });
    EXPECT_TRUE(oracle::close(oracle::hnc_minus_via_cut(g, pos, {}, mu), brute, 1e-9))
        << "trial " << trial;
  }
}

TEST(Reduction, HncPlusMatchesBruteForce) {
  std::mt19937_64 rng(72);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = std::uniform_int_distribution<int>(3, 10)(rng);
    const auto g = oracle::random_graph(rng, n, 0.6);
    const std::vector<int> pos{0};
    const std::vector<int> neg{n - 1};
    const double mu = std::array<double, 5>{0.1, 0.5, 1, 2, 5}[trial % 5];
    const double brute = oracle::brute_seeded_min(
        g, 1u, 1u << (n - 1),
        [mu](const oracle::Similarities& s) { return s.between - mu * s.inside; });
    EXPECT_TRUE(oracle::close(oracle::hnc_plus_via_cut(g, pos, neg, mu), brute, 1e-9))
        << "trial " << trial;
  }
}

TEST(Reduction, DoubleIntraSimilarity) {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> coef(0.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 9)(rng);
    const auto g = oracle::random_graph(rng, n, 0.6);
    const double alpha = coef(rng);
    const double beta = coef(rng);
    const std::vector<int> pos{0};
    const double brute = oracle::brute_seeded_min(g, 1u, 0u, [&](const oracle::Similarities& s) {
      return s.between - alpha * s.inside - beta * s.outside;
    });
    EXPECT_TRUE(oracle::close(oracle::hnc_double_via_cut(g, pos, {}, alpha, beta), brute, 1e-9))
        << "trial " << trial << " alpha " << alpha << " beta " << beta;
  }
}

SampleSet blobs(std::size_t n, double pi, double sep, std::uint64_t seed, std::size_t h = 2) {
  data::SyntheticConfig cfg;
  cfg.n = n;
  cfg.h = h;
  cfg.pi = pi;
  cfg.class_sep = sep;
  cfg.seed = seed;
  return data::generate_synthetic(cfg);
}

TEST(Run2Hnc, SeparatedBlobs) {
  const auto s = blobs(200, 0.5, 6.0, 1);
  const auto split = data::pu_split(*s.truth, 0.6, 1);
  hnc::Config cfg;
  cfg.pi = 0.5;
  const auto result = hnc::run_2hnc(s, split, cfg);
  std::vector<int> truth;
  for (const int u : result.unlabeled) truth.push_back((*s.truth)[u]);
  const auto metrics = data::evaluate(result.predictions, truth);
  ASSERT_TRUE(metrics.balanced_accuracy);
  EXPECT_GE(*metrics.balanced_accuracy, 0.95);
  ASSERT_EQ(result.per_k.size(), 3u);
  for (const auto& d : result.per_k) {
    EXPECT_FALSE(d.stage2.empty());
  }
}

TEST(Run2Hnc, SeedConstraintsAndFractionBounds) {
  const auto s = blobs(150, 0.4, 1.0, 2);
  const auto split = data::pu_split(*s.truth, 0.6, 2);
  hnc::Config cfg;
  cfg.pi = 0.4;
  cfg.k_list = {5};
  const auto result = hnc::run_2hnc(s, split, cfg);
  const auto& c = result.chosen;
  for (const int p : split.positives) EXPECT_TRUE(c.positive[p]);
  const double floor = static_cast<double>(split.positives.size()) / 150.0;
  EXPECT_GE(c.positive_fraction, floor);
  EXPECT_LE(c.positive_fraction, 1.0);
  if (c.stage == 2) {
    for (const int u : result.per_k[0].likely_negative) EXPECT_FALSE(c.positive[u]);
  }
}

TEST(Run2Hnc, AllPositiveData) {
  auto s = blobs(120, 0.5, 0.0, 3);
  for (auto& t : *s.truth) t = 1;
  const auto split = data::pu_split(*s.truth, 0.6, 3);
  hnc::Config cfg;
  cfg.pi = 0.97;
  const auto result = hnc::run_2hnc(s, split, cfg);
  EXPECT_GE(result.chosen.positive_fraction, 0.9);
}

TEST(Run2Hnc, IsDeterministicAcrossThreadCounts) {
  const auto s = blobs(180, 0.5, 2.0, 4);
  const auto split = data::pu_split(*s.truth, 0.6, 4);
  hnc::Config cfg;
  cfg.pi = 0.5;
  const auto serial = hnc::run_2hnc(s, split, cfg);
  cfg.threads = 3;
  const auto threaded = hnc::run_2hnc(s, split, cfg);
  EXPECT_EQ(serial.predictions, threaded.predictions);
  EXPECT_EQ(serial.chosen.k, threaded.chosen.k);
  EXPECT_EQ(serial.chosen.lambda, threaded.chosen.lambda);
}

TEST(Run2Hnc, RejectsBadConfig) {
  const auto s = blobs(40, 0.5, 2.0, 5);
  const auto split = data::pu_split(*s.truth, 0.6, 5);
  hnc::Config cfg;
  cfg.pi = 1.2;
  EXPECT_THROW(hnc::run_2hnc(s, split, cfg), InputError);
  cfg.pi = 0.5;
  cfg.k_list = {40};
  EXPECT_THROW(hnc::run_2hnc(s, split, cfg), InputError);
  cfg.k_list = {5};
  cfg.lambda_step = 0.0;
  EXPECT_THROW(hnc::run_2hnc(s, split, cfg), InputError);
}

}  // namespace
