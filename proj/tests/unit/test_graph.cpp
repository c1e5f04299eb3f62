#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "stochmatch/graph.hpp"
#include "stochmatch/graph_io.hpp"

using namespace stochmatch;

namespace {

StochasticGraph single_edge(double w, double p) { return StochasticGraph(2, {{0, 1, w, p}}); }

}  // namespace

TEST(Graph, RejectsMalformedInput) {
  EXPECT_THROW(StochasticGraph(2, {{0, 0, 1.0, 0.5}}), Error);
  EXPECT_THROW(StochasticGraph(2, {{0, 2, 1.0, 0.5}}), Error);
  EXPECT_THROW(StochasticGraph(2, {{0, 1, -1.0, 0.5}}), Error);
  EXPECT_THROW(StochasticGraph(2, {{0, 1, 1.0, 0.0}}), Error);
  EXPECT_THROW(StochasticGraph(2, {{0, 1, 1.0, 1.5}}), Error);
  EXPECT_THROW(StochasticGraph(2, {{0, 1, NAN, 0.5}}), Error);
  EXPECT_THROW(StochasticGraph(2, {{0, 1, 1.0, 0.5}, {1, 0, 2.0, 0.5}}), Error);
}

TEST(Graph, PMinIsCached) {
  StochasticGraph g(3, {{0, 1, 1.0, 0.7}, {1, 2, 1.0, 0.2}});
  EXPECT_DOUBLE_EQ(g.p_min(), 0.2);
  EXPECT_DOUBLE_EQ(StochasticGraph(4, {}).p_min(), 1.0);
}

TEST(Graph, MatchingRejectsSharedEndpoint) {
  StochasticGraph g(3, {{0, 1, 1.0, 1.0}, {1, 2, 1.0, 1.0}});
  EXPECT_THROW(Matching(g, {0, 1}), Error);
  EXPECT_THROW(Matching(g, {5}), Error);
  EXPECT_NO_THROW(Matching(g, {1}));
}

TEST(Graph, WeightOf) {
  StochasticGraph g(4, {{0, 1, 1.5, 1.0}, {2, 3, 2.25, 1.0}, {1, 2, 5.0, 1.0}});
  EXPECT_EQ(weight_of(Matching{}, g), 0.0);
  EXPECT_EQ(weight_of(Matching(g, {2}), g), 5.0);
  EXPECT_EQ(weight_of(Matching(g, {0, 1}), g), 3.75);
  StochasticGraph small(2, {{0, 1, 1.0, 1.0}});
  EXPECT_THROW(weight_of(Matching(g, {2}), small), Error);
}

TEST(Graph, SampleRealizationTrivialCases) {
  Rng rng(1);
  StochasticGraph full(3, {{0, 1, 1.0, 1.0}, {1, 2, 1.0, 1.0}});
  EXPECT_EQ(sample_realization(full, rng).bits().count(), 2u);
  StochasticGraph empty(5, {});
  EXPECT_EQ(sample_realization(empty, rng).bits().count(), 0u);
}

TEST(Graph, SampleRealizationFrequency) {
  const auto g = single_edge(1.0, 0.5);
  Rng rng(derive_seed(7, 1));
  const int trials = 10000;
  int hits = 0;
  for (int i = 0; i < trials; ++i) hits += sample_realization(g, rng).contains(0);
  const double se = std::sqrt(0.25 / trials);
  EXPECT_NEAR(hits / double(trials), 0.5, 3 * se);
}

TEST(Graph, SampleRealizationPerEdgeBand) {
  Rng gen(3);
  const auto g = gen_random_graph(7, 0.6, Law::parse("uniform:0:1"),
                                  Law::parse("uniform:0.05:1"), 11);
  const int trials = 20000;
  std::vector<int> hits(g.num_edges(), 0);
  Rng rng(derive_seed(99, 2));
  for (int i = 0; i < trials; ++i) {
    const auto r = sample_realization(g, rng);
    for (EdgeId e = 0; e < g.num_edges(); ++e) hits[e] += r.contains(e);
  }
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const double p = g.edge(e).p;
    EXPECT_NEAR(hits[e] / double(trials), p, 4 * std::sqrt(p * (1 - p) / trials)) << e;
  }
}

TEST(Graph, SampleRealizationIsPureInSeed) {
  const auto g = gen_random_graph(8, 0.5, Law::parse("const:1"), Law::parse("const:0.5"), 4);
  Rng a(42), b(42);
  EXPECT_EQ(sample_realization(g, a).bits(), sample_realization(g, b).bits());
}

TEST(Graph, HexRoundTrip) {
  const auto g = gen_random_graph(9, 0.7, Law::parse("const:1"), Law::parse("const:0.5"), 5);
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const auto r = sample_realization(g, rng);
    const auto back = Realization::from_hex(g, r.to_hex());
    EXPECT_EQ(back.bits(), r.bits());
  }
  StochasticGraph tiny(3, {{0, 1, 1.0, 1.0}, {1, 2, 1.0, 1.0}});
  EXPECT_EQ(Realization(tiny, EdgeSet(2, true)).to_hex(), "3");
  EXPECT_THROW(Realization::from_hex(tiny, "4"), Error);
  EXPECT_THROW(Realization::from_hex(tiny, "33"), Error);
}

TEST(Generator, DensityExtremes) {
  const auto w = Law::parse("uniform:0:1");
  const auto p = Law::parse("const:0.5");
  EXPECT_EQ(gen_random_graph(4, 1.0, w, p, 1).num_edges(), 6u);
  EXPECT_EQ(gen_random_graph(4, 0.0, w, p, 1).num_edges(), 0u);
}

TEST(Generator, DeterministicPerSeed) {
  const auto w = Law::parse("exp:2");
  const auto p = Law::parse("uniform:0.1:0.9");
  EXPECT_EQ(graph_to_string(gen_random_graph(10, 0.4, w, p, 77)),
            graph_to_string(gen_random_graph(10, 0.4, w, p, 77)));
  EXPECT_NE(graph_to_string(gen_random_graph(10, 0.4, w, p, 77)),
            graph_to_string(gen_random_graph(10, 0.4, w, p, 78)));
}

TEST(Generator, RejectsBadLaws) {
  const auto ok = Law::parse("const:1");
  EXPECT_THROW(gen_random_graph(4, 0.5, Law::parse("uniform:-1:1"), Law::parse("const:0.5"), 1),
               Error);
  EXPECT_THROW(gen_random_graph(4, 0.5, ok, Law::parse("uniform:0:1"), 1), Error);
  EXPECT_THROW(gen_random_graph(4, 0.5, ok, Law::parse("const:1.2"), 1), Error);
  EXPECT_THROW(gen_random_graph(4, 0.5, ok, Law::parse("exp:1"), 1), Error);
  EXPECT_THROW(gen_random_graph(4, 1.5, ok, ok, 1), Error);
  EXPECT_THROW(Law::parse("normal:0:1"), Error);
  EXPECT_THROW(Law::parse("uniform:2:1"), Error);
}

TEST(GraphIo, BitExactRoundTrip) {
  const auto g = gen_random_graph(12, 0.5, Law::parse("exp:0.3"), Law::parse("uniform:0.01:1"), 9);
  const auto text = graph_to_string(g);
  const auto back = graph_from_string(text);
  ASSERT_EQ(back.num_edges(), g.num_edges());
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    EXPECT_EQ(back.edge(e).w, g.edge(e).w);
    EXPECT_EQ(back.edge(e).p, g.edge(e).p);
  }
  EXPECT_EQ(back.token(), g.token());
  EXPECT_EQ(graph_to_string(back), text);
}

TEST(GraphIo, CommentsAndErrors) {
  EXPECT_EQ(graph_from_string("# hdr\n3 1\n0 2 1.5 0.25\n").num_edges(), 1u);
  EXPECT_THROW(graph_from_string("3 2\n0 1 1 1\n"), Error);
  EXPECT_THROW(graph_from_string("3 1\n0 1 1 1\n1 2 1 1\n"), Error);
  EXPECT_THROW(graph_from_string("3 1\n0 1 1 0\n"), Error);
  EXPECT_THROW(graph_from_string("3 1\n0 1 x 1\n"), Error);
}

TEST(Params, DerivedFieldsFollowFormulas) {
  const auto prm = Params::derive(0.1, 1.0 / 576.0, 0.5);
  EXPECT_DOUBLE_EQ(prm.tau, 20 * 0.5 * std::pow(0.1, 5) / (576.0 * 576.0));
  EXPECT_DOUBLE_EQ(prm.eta, 0.01);
  EXPECT_DOUBLE_EQ(prm.beta, 1e-4);
  EXPECT_DOUBLE_EQ(prm.gamma, (1 - 0.01) / 1.03);
  EXPECT_DOUBLE_EQ(prm.c, 100.0);
  EXPECT_EQ(prm.t, prm.t_theory);
  EXPECT_GT(prm.gamma, 0.0);
  EXPECT_LT(prm.gamma, 1.0);
  const auto small = Params::derive(0.5, 0.5, 1.0, 4);
  EXPECT_EQ(small.t, 4u);
  EXPECT_EQ(small.t_theory, static_cast<std::uint64_t>(std::ceil(1.0 / (small.tau * 0.5))));
  EXPECT_THROW(Params::derive(0.0, 0.5, 1.0), Error);
  EXPECT_THROW(Params::derive(0.5, 1.0, 1.0), Error);
  EXPECT_THROW(Params::derive(0.5, 0.5, 1.0, 0), Error);
}
