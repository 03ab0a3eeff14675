#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "homconv/tmfg.hpp"
#include "oracles.hpp"

using namespace homconv;

namespace {

SimilarityMatrix five_vertex_example() {
  Matrix m(5, 5, 0.9);
  for (std::size_t i = 0; i < 5; ++i) m(i, i) = 1.0;
  const double tail[] = {0.8, 0.7, 0.6, 0.1};
  for (std::size_t i = 0; i < 4; ++i) m(4, i) = m(i, 4) = tail[i];
  return {m, CorrelationMethod::kPearson};
}

}  // namespace

TEST(Tmfg, FourVerticesIsK4) {
  Rng rng(1);
  const auto g = build_tmfg(oracle::random_similarity(4, rng));
  EXPECT_EQ(g.adjacency.edge_count(), 6u);
  EXPECT_EQ(g.tetrahedra.size(), 1u);
  EXPECT_EQ(g.separators.size(), 0u);
  EXPECT_EQ(g.triangles.size(), 4u);
}

TEST(Tmfg, FiveVertexStepTrace) {
  const auto sim = five_vertex_example();
  const auto g = build_tmfg(sim);
  EXPECT_EQ(g.tetrahedra[0], (Tetrahedron{0, 1, 2, 3}));
  ASSERT_EQ(g.insertions.size(), 1u);
  EXPECT_EQ(g.insertions[0].vertex, 4);
  EXPECT_EQ(g.insertions[0].face, (Triangle{0, 1, 2}));
  EXPECT_NEAR(g.insertions[0].gain, 2.1, 1e-12);
  // Oracle: every face of the seed, scored directly.
  double best = -1;
  for (const Triangle& f : {Triangle{0, 1, 2}, Triangle{0, 1, 3}, Triangle{0, 2, 3}, Triangle{1, 2, 3}}) {
    best = std::max(best, sim(4, f[0]) + sim(4, f[1]) + sim(4, f[2]));
  }
  EXPECT_NEAR(best, 2.1, 1e-12);
  std::vector<std::pair<int, int>> expected{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}};
  EXPECT_EQ(g.adjacency.edges(), expected);
  EXPECT_NEAR(g.total_gain, 6 * 0.9 + 2.1, 1e-12);
}

TEST(Tmfg, SmallInputsAreComplete) {
  for (std::size_t n = 1; n < 4; ++n) {
    Rng rng(n);
    const auto g = build_tmfg(oracle::random_similarity(n, rng));
    EXPECT_EQ(g.adjacency.edge_count(), n * (n - 1) / 2);
    EXPECT_TRUE(verify_structure(g).all_passed());
  }
}

TEST(Tmfg, SeedMaximizesPairwiseSum) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng.uniform_index(8);
    const auto sim = oracle::random_similarity(n, rng);
    double best = -1;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        for (std::size_t c = b + 1; c < n; ++c)
          for (std::size_t d = c + 1; d < n; ++d)
            best = std::max(best, sim(a, b) + sim(a, c) + sim(a, d) + sim(b, c) + sim(b, d) + sim(c, d));
    const auto t = select_seed_tetrahedron(sim);
    double got = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) got += sim(t[i], t[j]);
    EXPECT_DOUBLE_EQ(got, best);
  }
}

TEST(Tmfg, TiesResolveLexicographically) {
  Matrix m(6, 6, 0.5);
  for (std::size_t i = 0; i < 6; ++i) m(i, i) = 1.0;
  const auto g = build_tmfg({m, CorrelationMethod::kPearson});
  EXPECT_EQ(g.tetrahedra[0], (Tetrahedron{0, 1, 2, 3}));
  EXPECT_EQ(g.insertions[0].vertex, 4);
  EXPECT_EQ(g.insertions[0].face, (Triangle{0, 1, 2}));
}

TEST(Tmfg, StructuralInvariantsOnRandomInputs) {
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 4 + rng.uniform_index(40);
    const auto sim = oracle::random_similarity(n, rng);
    const auto g = build_tmfg(sim);
    const auto report = verify_structure(g);
    for (const auto& c : report.checks) EXPECT_TRUE(c.passed) << "n=" << n << " " << c.name << " " << c.detail;
    // total_gain recomputed from the construction log.
    double total = 0;
    const auto& s = g.tetrahedra[0];
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) total += sim(s[i], s[j]);
    for (const auto& ins : g.insertions) {
      for (int v : ins.face) total += sim(ins.vertex, v);
    }
    EXPECT_NEAR(g.total_gain, total, 1e-9);
  }
}

TEST(Tmfg, VerifyCatchesBrokenGraphs) {
  Rng rng(3);
  auto g = build_tmfg(oracle::random_similarity(8, rng));
  g.adjacency.remove_edge(g.tetrahedra[0][0], g.tetrahedra[0][1]);
  EXPECT_FALSE(verify_structure(g).all_passed());
  auto h = build_tmfg(oracle::random_similarity(8, rng));
  h.adjacency.set_raw(0, 0, true);
  EXPECT_FALSE(verify_structure(h).all_passed());
}

TEST(Tmfg, EdgeListRoundTrip) {
  Rng rng(9);
  const auto sim = oracle::random_similarity(12, rng);
  const auto g = build_tmfg(sim);
  std::stringstream ss;
  write_edge_list(ss, g, &sim);
  const auto back = read_edge_list(ss);
  EXPECT_EQ(back.n, g.n);
  EXPECT_EQ(back.adjacency, g.adjacency);
  EXPECT_TRUE(verify_structure(back).all_passed());
}

TEST(BootstrapNet, ThresholdFiltersByFrequency) {
  Rng rng(4);
  std::vector<FilteredGraph> replicas;
  for (int i = 0; i < 10; ++i) replicas.push_back(build_tmfg(oracle::random_similarity(9, rng)));
  const auto table = count_edges(replicas);
  EXPECT_EQ(table.replica_count(), 10u);
  std::size_t previous = 0;
  for (double t : {1.0, 0.9, 0.5, 0.1}) {
    const auto g = bootstrap_net(table, t);
    EXPECT_GE(g.adjacency.edge_count(), previous);
    previous = g.adjacency.edge_count();
    EXPECT_FALSE(g.chordal_guaranteed);
    EXPECT_TRUE(verify_structure(g).all_passed());
    for (std::size_t a = 0; a < 9; ++a) {
      for (std::size_t b = a + 1; b < 9; ++b) {
        EXPECT_EQ(g.adjacency.has_edge(a, b), table.count(a, b) / 10.0 >= t);
      }
    }
  }
  const auto all = bootstrap_net(table, 1.0);
  for (std::size_t a = 0; a < 9; ++a) {
    for (std::size_t b = a + 1; b < 9; ++b) {
      bool everywhere = true;
      for (const auto& r : replicas) everywhere = everywhere && r.adjacency.has_edge(a, b);
      EXPECT_EQ(all.adjacency.has_edge(a, b), everywhere);
    }
  }
  EXPECT_THROW(bootstrap_net(table, 0.0), ConfigError);
  EXPECT_THROW(bootstrap_net(table, 1.5), ConfigError);
}

TEST(BootstrapNet, MergeIsCommutative) {
  Rng rng(6);
  EdgeFrequencyTable a(7), b(7);
  for (int i = 0; i < 4; ++i) a.add(build_tmfg(oracle::random_similarity(7, rng)));
  for (int i = 0; i < 3; ++i) b.add(build_tmfg(oracle::random_similarity(7, rng)));
  auto ab = a;
  ab.merge(b);
  auto ba = b;
  ba.merge(a);
  EXPECT_EQ(ab, ba);
  EXPECT_EQ(ab.replica_count(), 7u);
}

TEST(Graph, ChordalityAndPlanarity) {
  AdjacencyMatrix c4(4);
  c4.add_edge(0, 1);
  c4.add_edge(1, 2);
  c4.add_edge(2, 3);
  c4.add_edge(3, 0);
  EXPECT_FALSE(is_chordal(c4));
  EXPECT_TRUE(is_planar(c4));
  c4.add_edge(0, 2);
  EXPECT_TRUE(is_chordal(c4));
  AdjacencyMatrix k5(5);
  for (std::size_t a = 0; a < 5; ++a)
    for (std::size_t b = a + 1; b < 5; ++b) k5.add_edge(a, b);
  EXPECT_TRUE(is_chordal(k5));
  EXPECT_FALSE(is_planar(k5));
}
