#include <gtest/gtest.h>

#include <cmath>

#include "stochmatch/graph_io.hpp"
#include "stochmatch/vb_matching.hpp"

using namespace stochmatch;

TEST(Attenuation, Values) {
  EXPECT_EQ(attenuation_g(0.0), 0.0);
  EXPECT_DOUBLE_EQ(attenuation_g(1.0), 0.6);
  EXPECT_DOUBLE_EQ(attenuation_g(0.5), 0.375);
  EXPECT_THROW(attenuation_g(-0.1), Error);
  EXPECT_THROW(attenuation_g(1.1), Error);
  for (double y = 0.0; y <= 1.0; y += 0.05) EXPECT_GE(attenuation_g(y), 8.0 * y / 15.0 - 1e-15);
}

TEST(ActivateBatch, TrivialCases) {
  Rng rng(1);
  EXPECT_FALSE(activate_batch({}, rng).active);
  const std::vector<BatchCandidate> zero = {{0, 0.4, 0.0, true}};
  for (int i = 0; i < 1000; ++i) EXPECT_FALSE(activate_batch(zero, rng).active);
  const std::vector<BatchCandidate> unrealized = {{0, 0.4, 0.9, false}};
  for (int i = 0; i < 1000; ++i) EXPECT_FALSE(activate_batch(unrealized, rng).active);
  const std::vector<BatchCandidate> neg = {{0, 0.4, -0.1, true}};
  EXPECT_THROW(activate_batch(neg, rng), Error);
}

TEST(ActivateBatch, TwoCandidateFrequencies) {
  const std::vector<BatchCandidate> c = {{3, 0.5, 0.5, true}, {7, 0.5, 0.5, true}};
  Rng rng(2);
  const int trials = 100000;
  int a = 0, b = 0, none = 0;
  for (int i = 0; i < trials; ++i) {
    const auto r = activate_batch(c, rng);
    if (!r.active) {
      ++none;
    } else if (*r.active == 3) {
      ++a;
    } else {
      ++b;
    }
  }
  auto band = [&](double p) { return 3 * std::sqrt(p * (1 - p) / trials); };
  EXPECT_NEAR(a / double(trials), 0.375, band(0.375));
  EXPECT_NEAR(b / double(trials), 0.375, band(0.375));
  EXPECT_NEAR(none / double(trials), 0.25, band(0.25));
}

TEST(ActivateBatch, ClipsOverfullBatch) {
  const std::vector<BatchCandidate> c = {{0, 0.0, 1.0, true}, {1, 0.0, 1.0, true}};
  bool clipped = false;
  const auto p = activation_probabilities(c, &clipped);
  EXPECT_TRUE(clipped);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
  Rng rng(3);
  EXPECT_TRUE(activate_batch(c, rng).clipped);
}

TEST(RunVb, NoCrucialEdges) {
  StochasticGraph g(4, {{0, 1, 1.0, 1.0}});
  FixedMarginalLaw law(g, {0.5});
  Rng rng(1);
  const auto out = run_vb(GraphView(g, EdgeSet(1)), law, rng);
  EXPECT_TRUE(out.m_c.empty());
  for (bool a : out.alive) EXPECT_TRUE(a);
}

TEST(RunVb, SingleEdgeExact) {
  StochasticGraph g(2, {{0, 1, 1.0, 1.0}});
  for (double y : {0.2, 0.5, 1.0}) {
    FixedMarginalLaw law(g, {y});
    const auto ex = exact_vb_enumeration(GraphView(g), law);
    EXPECT_NEAR(ex.p_selected[0], attenuation_g(y), 1e-15);
    EXPECT_NEAR(ex.p_active[0], attenuation_g(y), 1e-15);
    EXPECT_NEAR(ex.pair_alive.at({0, 1}), 1 - attenuation_g(y), 1e-15);
  }
  FixedMarginalLaw one(g, {1.0});
  const auto ex = exact_vb_enumeration(GraphView(g), one);
  EXPECT_NEAR(ex.p_selected[0], 0.6, 1e-15);
  EXPECT_NEAR(ex.pair_alive.at({0, 1}), 0.4, 1e-15);
}

TEST(RunVb, SingleEdgeMonteCarlo) {
  StochasticGraph g(2, {{0, 1, 1.0, 1.0}});
  FixedMarginalLaw law(g, {1.0});
  Rng rng(4);
  const int trials = 50000;
  int sel = 0;
  for (int i = 0; i < trials; ++i) sel += !run_vb(GraphView(g), law, rng).m_c.empty();
  EXPECT_NEAR(sel / double(trials), 0.6, 3 * std::sqrt(0.24 / trials));
}

// Path a-b-c with prescribed y on both edges and p = 1. Over the six arrival
// orders, e1 is selected w.p. g in the four orders where it is decided first
// or alongside e2, and w.p. g(1-g) in the two where e2 is decided first.
TEST(RunVb, TwoEdgePathClosedForm) {
  StochasticGraph g(3, {{0, 1, 1.0, 1.0}, {1, 2, 1.0, 1.0}});
  for (double y : {0.1, 0.3, 0.5}) {
    FixedMarginalLaw law(g, {y, y});
    const double gy = attenuation_g(y);
    const auto ex = exact_vb_enumeration(GraphView(g), law);
    EXPECT_NEAR(ex.p_active[0], gy, 1e-14);
    EXPECT_NEAR(ex.p_selected[0], gy * (1 - gy / 3), 1e-14);
    EXPECT_NEAR(ex.p_alive[0], 1 - gy, 1e-14);
    EXPECT_NEAR(ex.pair_alive.at({0, 2}), (2 * (1 - 2 * gy) + 4 * (1 - gy) * (1 - gy)) / 6, 1e-14);
    EXPECT_GE(ex.pair_alive.at({0, 2}), 1.0 / 576.0);
  }
}

TEST(RunVb, ActivationMarginalForEveryOrder) {
  // Exact M_O law on a small random graph: every fixed arrival order
  // activates each crucial edge with probability exactly g(y_e).
  const auto g = gen_random_graph(4, 1.0, Law::parse("uniform:0.5:2"), Law::parse("uniform:0.3:0.9"), 5);
  EdgeSet crucial(g.num_edges());
  for (EdgeId e = 0; e < 5; ++e) crucial.set(e);
  const GraphView view(g, crucial);
  ExactMatchingLaw law(view);
  std::vector<VertexId> order = {0, 1, 2, 3};
  do {
    const auto ex = exact_vb_enumeration(view, law, order);
    for (EdgeId e : crucial.indices()) EXPECT_NEAR(ex.p_active[e], attenuation_g(law.y(e)), 1e-12);
  } while (std::next_permutation(order.begin(), order.end()));
}

TEST(RunVb, StructuralInvariants) {
  const auto g = gen_random_graph(10, 0.5, Law::parse("uniform:0.5:2"), Law::parse("uniform:0.3:0.9"), 6);
  EdgeSet crucial(g.num_edges());
  for (EdgeId e = 0; e < g.num_edges(); e += 2) crucial.set(e);
  const GraphView view(g, crucial);
  std::vector<double> y(g.num_edges(), 0.0);
  for (EdgeId e : crucial.indices()) y[e] = std::min(g.edge(e).p, 0.15);
  FixedMarginalLaw law(g, y);
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const auto out = run_vb(view, law, rng);
    std::vector<bool> in_log(g.num_vertices(), false);
    for (const auto& rec : out.activation_log) {
      if (rec.partner) in_log[rec.vertex] = in_log[*rec.partner] = true;
    }
    const auto matched = matched_vertices(out.m_c, g);
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
      EXPECT_EQ(out.alive[v], !in_log[v]);
      EXPECT_FALSE(out.alive[v] && matched[v]);
    }
    for (EdgeId e : out.m_c.edges()) {
      EXPECT_TRUE(crucial.test(e));
      EXPECT_TRUE(out.revealed_realized.test(e));
    }
    EXPECT_EQ(out.revealed_realized & crucial, out.revealed_realized);
  }
}

TEST(RunVb, GivenRealizationIsRespected) {
  StochasticGraph g(3, {{0, 1, 1.0, 0.5}, {1, 2, 1.0, 0.5}});
  FixedMarginalLaw law(g, {0.25, 0.25});
  const Realization r(g, EdgeSet::from_indices(2, std::vector<EdgeId>{1}));
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const auto out = run_vb(GraphView(g), law, rng, &r);
    EXPECT_EQ(out.revealed_realized, r.bits());
    EXPECT_FALSE(out.m_c.contains(0));
  }
}

TEST(RunVb, JsonHasFields) {
  StochasticGraph g(2, {{0, 1, 1.0, 1.0}});
  FixedMarginalLaw law(g, {1.0});
  Rng rng(9);
  const auto j = run_vb(GraphView(g), law, rng).to_json();
  for (const char* k : {"permutation", "activation_log", "m_c", "alive"}) EXPECT_TRUE(j.contains(k));
}

TEST(ExactVb, RefusesLargeInstances) {
  const auto g = gen_random_graph(5, 1.0, Law::parse("const:1"), Law::parse("const:1"), 1);
  FixedMarginalLaw law(g, std::vector<double>(g.num_edges(), 0.0));
  EXPECT_THROW(exact_vb_enumeration(GraphView(g), law), Error);
}

TEST(ExactVb, IsolatedPairAlive) {
  StochasticGraph g(2, {});
  FixedMarginalLaw law(g, {});
  EXPECT_EQ(exact_vb_enumeration(GraphView(g), law).pair_alive.at({0, 1}), 1.0);
}
