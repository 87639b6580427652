#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "pucut/error.hpp"
#include "pucut/simgraph.hpp"

namespace {

using namespace pucut;

SampleSet make_samples(std::size_t cols, std::vector<double> values) {
  SampleSet s;
  s.cols = cols;
  s.rows = values.size() / cols;
  s.features = std::move(values);
  for (std::size_t i = 0; i < s.rows; ++i) s.ids.push_back(std::to_string(i));
  return s;
}

SampleSet random_samples(std::mt19937_64& rng, std::size_t n, std::size_t h) {
  std::normal_distribution<double> normal;
  std::vector<double> v(n * h);
  for (auto& x : v) x = normal(rng);
  return make_samples(h, v);
}

TEST(Standardize, ConstantColumnBecomesZero) {
  const auto out = simgraph::standardize(make_samples(1, {1, 1, 1}));
  for (const double x : out.features) EXPECT_EQ(x, 0.0);
}

TEST(Standardize, UsesPopulationDeviation) {
  const auto out = simgraph::standardize(make_samples(1, {0, 2}));
  EXPECT_DOUBLE_EQ(out.features[0], -1.0);
  EXPECT_DOUBLE_EQ(out.features[1], 1.0);
}

TEST(Standardize, IsIdempotent) {
  std::mt19937_64 rng(3);
  const auto once = simgraph::standardize(random_samples(rng, 40, 3));
  const auto twice = simgraph::standardize(once);
  for (std::size_t i = 0; i < once.features.size(); ++i) {
    EXPECT_NEAR(once.features[i], twice.features[i], 1e-12);
  }
}

TEST(Distance, Examples) {
  const auto uniform = FeatureWeights::uniform(2);
  const std::vector<double> o{0, 0}, p{3, 4}, q{1, 1};
  EXPECT_EQ(simgraph::weighted_distance(o, o, uniform), 0.0);
  EXPECT_DOUBLE_EQ(simgraph::weighted_distance(o, p, uniform), 5.0);
  // (2, 0) already sums to H = 2.
  const auto rho = FeatureWeights::normalized({2, 0});
  EXPECT_DOUBLE_EQ(simgraph::weighted_distance(o, q, rho), std::sqrt(2.0));
  const std::vector<double> short_row{1};
  EXPECT_THROW(simgraph::weighted_distance(o, short_row, uniform), InputError);
}

TEST(FeatureWeightsTest, NormalizesToFeatureCount) {
  const auto rho = FeatureWeights::normalized({1, 3, 0, 4});
  const auto v = rho.values();
  EXPECT_NEAR(std::accumulate(v.begin(), v.end(), 0.0), 4.0, 1e-12);
  EXPECT_DOUBLE_EQ(v[1], 1.5);
  EXPECT_THROW(FeatureWeights::normalized({1, -1}), InputError);
  EXPECT_THROW(FeatureWeights::normalized({0, 0}), InputError);
}

TEST(FeatureWeightsTest, LoadsFile) {
  const std::string path = testing::TempDir() + "rho.txt";
  {
    std::ofstream out(path);
    out << "1\n\n3\n";
  }
  const auto rho = FeatureWeights::load(path);
  ASSERT_EQ(rho.size(), 2u);
  EXPECT_DOUBLE_EQ(rho.values()[0], 0.5);
  EXPECT_THROW(FeatureWeights::load(path + ".missing"), DataError);
}

TEST(Gaussian, Examples) {
  EXPECT_EQ(simgraph::gaussian_similarity(0.0, 0.75), 1.0);
  EXPECT_NEAR(simgraph::gaussian_similarity(0.75 * std::sqrt(2.0), 0.75), std::exp(-1.0),
              1e-15);
  EXPECT_GT(simgraph::gaussian_similarity(1e6, 0.1), 0.0);
  EXPECT_LT(simgraph::gaussian_similarity(2.0, 1.0), simgraph::gaussian_similarity(1.0, 1.0));
  EXPECT_THROW(simgraph::gaussian_similarity(1.0, 0.0), InputError);
  EXPECT_EQ(simgraph::default_sigma(9999), 0.75);
  EXPECT_EQ(simgraph::default_sigma(10000), 0.25);
}

TEST(Knn, CollinearPoints) {
  const auto s = make_samples(1, {0, 1, 10});
  const auto edges = simgraph::knn_edges(s, 1, FeatureWeights::uniform(1));
  const std::vector<std::pair<int, int>> expected{{0, 1}, {1, 2}};
  EXPECT_EQ(edges, expected);
}

TEST(Knn, FullKIsComplete) {
  std::mt19937_64 rng(8);
  const auto s = random_samples(rng, 9, 2);
  EXPECT_EQ(simgraph::knn_edges(s, 8, FeatureWeights::uniform(2)).size(), 36u);
}

TEST(Knn, RejectsBadK) {
  const auto s = make_samples(1, {0, 1, 2});
  EXPECT_THROW(simgraph::knn_edges(s, 0, FeatureWeights::uniform(1)), InputError);
  EXPECT_THROW(simgraph::knn_edges(s, 3, FeatureWeights::uniform(1)), InputError);
}

TEST(Knn, TiesGoToSmallerIndex) {
  // Points 0 and 2 are both at distance 1 from point 1.
  const auto s = make_samples(1, {-1, 0, 1});
  const auto lists = simgraph::nearest_neighbours(s, 1, FeatureWeights::uniform(1));
  EXPECT_EQ(lists.of(1)[0], 0);
  EXPECT_EQ(lists.of(0)[0], 1);
  EXPECT_EQ(lists.of(2)[0], 1);
}

TEST(Graph, DuplicatePoints) {
  const auto s = make_samples(1, {2.5, 2.5});
  const auto g = simgraph::build_similarity_graph(s, 1, 0.75, FeatureWeights::uniform(1));
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.edges[0].weight, 1.0);
  EXPECT_EQ(g.degrees[0], 1.0);
  EXPECT_EQ(g.degrees[1], 1.0);
}

TEST(Graph, CollinearWeights) {
  const auto s = make_samples(1, {0, 1, 10});
  const auto g = simgraph::build_similarity_graph(s, 1, 0.75, FeatureWeights::uniform(1));
  ASSERT_EQ(g.edges.size(), 2u);
  EXPECT_NEAR(g.edges[0].weight, std::exp(-1.0 / (2.0 * 0.5625)), 1e-15);
  EXPECT_NEAR(g.edges[1].weight, std::exp(-81.0 / (2.0 * 0.5625)), 1e-40);
}

void expect_graph_invariants(const SimilarityGraph& g) {
  std::set<std::pair<int, int>> seen;
  std::vector<double> degrees(static_cast<std::size_t>(g.node_count), 0.0);
  for (const auto& e : g.edges) {
    EXPECT_LT(e.i, e.j);
    EXPECT_GT(e.weight, 0.0);
    EXPECT_LE(e.weight, 1.0);
    EXPECT_TRUE(seen.insert({e.i, e.j}).second);
    degrees[e.i] += e.weight;
    degrees[e.j] += e.weight;
  }
  for (int i = 0; i < g.node_count; ++i) {
    EXPECT_NEAR(degrees[i], g.degrees[i], 1e-9 * std::max(1.0, degrees[i]));
  }
}

TEST(Graph, RandomInvariants) {
  std::mt19937_64 rng(50);
  const auto s = simgraph::standardize(random_samples(rng, 50, 4));
  for (const std::size_t k : {1u, 3u, 7u}) {
    const auto g = simgraph::build_similarity_graph(s, k, 0.75, FeatureWeights::uniform(4));
    expect_graph_invariants(g);
  }
}

TEST(Graph, KnnContainmentAndMonotoneSparsity) {
  std::mt19937_64 rng(51);
  const auto s = random_samples(rng, 60, 3);
  const auto rho = FeatureWeights::uniform(3);
  const auto lists = simgraph::nearest_neighbours(s, 8, rho);
  std::vector<std::pair<int, int>> previous;
  for (std::size_t k = 1; k <= 8; ++k) {
    const auto edges = simgraph::knn_edges(lists, k);
    const std::set<std::pair<int, int>> edge_set(edges.begin(), edges.end());
    for (std::size_t i = 0; i < s.rows; ++i) {
      for (std::size_t r = 0; r < k; ++r) {
        const int j = lists.of(i)[r];
        const int a = static_cast<int>(i);
        EXPECT_TRUE(edge_set.count({std::min(a, j), std::max(a, j)}));
      }
    }
    for (const auto& e : previous) EXPECT_TRUE(edge_set.count(e));
    previous = edges;
    // The reused neighbour prefix matches a fresh search.
    EXPECT_EQ(edges, simgraph::knn_edges(s, k, rho));
  }
}

TEST(Graph, ThreadedSearchMatchesSerial) {
  std::mt19937_64 rng(52);
  const auto s = random_samples(rng, 300, 5);
  const auto rho = FeatureWeights::uniform(5);
  const auto serial = simgraph::nearest_neighbours(s, 6, rho, 1);
  const auto threaded = simgraph::nearest_neighbours(s, 6, rho, 4);
  EXPECT_EQ(serial.index, threaded.index);
}

TEST(Graph, InvariantUnderPermutation) {
  std::mt19937_64 rng(53);
  // Integer coordinates would create distance ties, which are index
  // dependent; continuous data keeps neighbour sets well defined.
  const auto s = random_samples(rng, 40, 2);
  std::vector<int> perm(s.rows);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  SampleSet shuffled = s;
  for (std::size_t r = 0; r < s.rows; ++r) {
    for (std::size_t h = 0; h < s.cols; ++h) {
      shuffled.features[r * s.cols + h] = s.at(static_cast<std::size_t>(perm[r]), h);
    }
  }
  const auto rho = FeatureWeights::uniform(2);
  const auto a = simgraph::build_similarity_graph(s, 4, 0.75, rho);
  const auto b = simgraph::build_similarity_graph(shuffled, 4, 0.75, rho);
  std::set<std::tuple<int, int, double>> mapped;
  for (const auto& e : b.edges) {
    mapped.insert({std::min(perm[e.i], perm[e.j]), std::max(perm[e.i], perm[e.j]), e.weight});
  }
  std::set<std::tuple<int, int, double>> original;
  for (const auto& e : a.edges) original.insert({e.i, e.j, e.weight});
  EXPECT_EQ(mapped, original);
}

TEST(Graph, CompleteDegreesSumAllPairs) {
  const auto s = make_samples(1, {0, 1, 10});
  const auto d = simgraph::complete_graph_degrees(s, 0.75, FeatureWeights::uniform(1));
  const auto w = [](double dist) { return simgraph::gaussian_similarity(dist, 0.75); };
  EXPECT_NEAR(d[0], w(1) + w(10), 1e-15);
  EXPECT_NEAR(d[1], w(1) + w(9), 1e-15);
}

TEST(SampleSetTest, ValidateRejectsBadInput) {
  auto s = make_samples(1, {0, 1});
  s.ids[1] = "0";
  EXPECT_THROW(s.validate(), InputError);
  auto t = make_samples(1, {0, std::nan("")});
  EXPECT_THROW(t.validate(), InputError);
  auto u = make_samples(1, {0, 1});
  u.truth = std::vector<int>{1, 0};
  EXPECT_THROW(u.validate(), InputError);
}

}  // namespace
