#include <gtest/gtest.h>

#include "stochmatch/graph_io.hpp"
#include "stochmatch/pipeline.hpp"

using namespace stochmatch;

namespace {

VBOutput vb_with_alive(const StochasticGraph& g, std::vector<bool> alive) {
  VBOutput out;
  out.alive = std::move(alive);
  out.active_edges = EdgeSet(g.num_edges());
  out.revealed_realized = EdgeSet(g.num_edges());
  return out;
}

GTable table_with(const StochasticGraph& g, std::vector<double> gv) {
  GTable t;
  t.g = std::move(gv);
  (void)g;
  return t;
}

EdgeClasses all_noncrucial(std::size_t m) {
  EdgeClasses c;
  c.crucial = EdgeSet(m);
  c.noncrucial = EdgeSet(m, true);
  return c;
}

}  // namespace

TEST(BuildFractional, EmptyAliveSet) {
  StochasticGraph g(2, {{0, 1, 1.0, 1.0}});
  const auto plan = full_query_plan(g);
  const Realization r(g, EdgeSet(1, true));
  const auto res = build_fractional(g, all_noncrucial(1), plan, r, vb_with_alive(g, {false, false}),
                                    table_with(g, {0.5}), 0.9);
  EXPECT_EQ(res.f.max_value(), 0.0);
}

TEST(BuildFractional, SingleEligibleEdge) {
  StochasticGraph g(2, {{0, 1, 1.0, 1.0}});
  const auto plan = full_query_plan(g);
  const Realization r(g, EdgeSet(1, true));
  const double gamma = Params::derive(0.1, 0.5, 1.0, 1).gamma;
  const auto res = build_fractional(g, all_noncrucial(1), plan, r, vb_with_alive(g, {true, true}),
                                    table_with(g, {0.001}), gamma);
  EXPECT_DOUBLE_EQ(res.f[0], gamma * 0.001);
  EXPECT_TRUE(res.survival.edge_survived[0]);
}

TEST(BuildFractional, OverloadedStarIsZeroed) {
  std::vector<Edge> edges;
  for (VertexId leaf = 1; leaf <= 4; ++leaf) edges.push_back({0, leaf, 1.0, 1.0});
  StochasticGraph g(5, edges);
  const auto plan = full_query_plan(g);
  const Realization r(g, EdgeSet(4, true));
  const auto res = build_fractional(g, all_noncrucial(4), plan, r,
                                    vb_with_alive(g, std::vector<bool>(5, true)),
                                    table_with(g, {0.3, 0.3, 0.3, 0.3}), 1.0);
  EXPECT_NEAR(res.max_pre_degree, 1.2, 1e-12);
  EXPECT_TRUE(res.survival.overloaded[0]);
  EXPECT_FALSE(res.survival.survived[0]);
  for (EdgeId e = 0; e < 4; ++e) EXPECT_EQ(res.f[e], 0.0);
  EXPECT_TRUE(res.survival.survived[1]);
}

TEST(BuildFractional, IneligibleEdgesStayZero) {
  StochasticGraph g(4, {{0, 1, 1.0, 1.0}, {2, 3, 1.0, 1.0}});
  QueryPlan plan = full_query_plan(g);
  plan.edges.set(1, false);
  const Realization r(g, EdgeSet(2, true));
  EdgeClasses c = all_noncrucial(2);
  const auto res = build_fractional(g, c, plan, r, vb_with_alive(g, std::vector<bool>(4, true)),
                                    table_with(g, {0.5, 0.5}), 1.0);
  EXPECT_EQ(res.f[0], 0.5);
  EXPECT_EQ(res.f[1], 0.0);
}

TEST(RoundFractional, Cases) {
  StochasticGraph tri(3, {{0, 1, 1, 1}, {1, 2, 1, 1}, {0, 2, 1, 1}});
  FractionalMatching zero(3);
  EXPECT_TRUE(round_fractional(tri, zero).empty());
  FractionalMatching f(3);
  for (EdgeId e = 0; e < 3; ++e) f.set(e, 0.3);
  const auto m = round_fractional(tri, f);
  EXPECT_EQ(weight_of(m, tri), 1.0);
  EXPECT_GE(weight_of(m, tri), (1 - 0.05) * f.dot(tri));
  FractionalMatching single(3);
  single.set(2, 0.7);
  EXPECT_EQ(round_fractional(tri, single), Matching(tri, {2}));
}

TEST(Combine, Schemes) {
  // Edges 0=(0,1) and 1=(2,3) crucial, edge 2=(1,2) non-crucial.
  StochasticGraph g(4, {{0, 1, 2.0, 1.0}, {2, 3, 2.0, 1.0}, {1, 2, 3.0, 1.0}});
  EdgeClasses c;
  c.crucial = EdgeSet::from_indices(3, std::vector<EdgeId>{0, 1});
  c.noncrucial = c.crucial.complement();
  const auto plan = full_query_plan(g);
  const Realization r(g, EdgeSet(3, true));
  VBOutput vb = vb_with_alive(g, {false, true, true, false});
  vb.m_c = Matching(g, {});
  const Matching m_n(g, {2});
  // Scheme (a) = both crucial edges, weight 4; scheme (b) = edge 2, weight 3.
  const auto out = combine(g, plan, r, vb, m_n, c);
  EXPECT_EQ(out.scheme, 0);
  EXPECT_EQ(out.weight_crucial, 4.0);
  EXPECT_EQ(out.weight_mixed, 3.0);
  EXPECT_EQ(out.matching, Matching(g, {0, 1}));
  double best = 0.0;
  for (const auto& cand : {Matching(g, {0, 1}), Matching(g, {2})}) best = std::max(best, weight_of(cand, g));
  EXPECT_EQ(weight_of(out.matching, g), best);
}

TEST(Combine, NoNoncrucialOrNoCrucial) {
  StochasticGraph g(2, {{0, 1, 1.0, 1.0}});
  const auto plan = full_query_plan(g);
  const Realization r(g, EdgeSet(1, true));
  EdgeClasses crucial_only;
  crucial_only.crucial = EdgeSet(1, true);
  crucial_only.noncrucial = EdgeSet(1);
  VBOutput vb = vb_with_alive(g, {true, true});
  EXPECT_EQ(combine(g, plan, r, vb, Matching{}, crucial_only).matching, Matching(g, {0}));
  const auto nc = all_noncrucial(1);
  EXPECT_EQ(combine(g, plan, r, vb, Matching(g, {0}), nc).matching, Matching(g, {0}));
}

TEST(Combine, OverlapIsAnError) {
  StochasticGraph g(3, {{0, 1, 1.0, 1.0}, {1, 2, 1.0, 1.0}});
  EdgeClasses c;
  c.crucial = EdgeSet::from_indices(2, std::vector<EdgeId>{0});
  c.noncrucial = c.crucial.complement();
  VBOutput vb = vb_with_alive(g, {false, false, true});
  vb.m_c = Matching(g, {0});
  EXPECT_THROW(combine(g, full_query_plan(g), Realization(g, EdgeSet(2, true)), vb, Matching(g, {1}), c),
               Error);
}

TEST(GTableBuild, Formula) {
  StochasticGraph g(2, {{0, 1, 1.0, 0.5}});
  EdgeClasses c = all_noncrucial(1);
  const std::vector<ProbEstimate> x = {ProbEstimate::exact(0.04)};
  const std::vector<ProbEstimate> q = {ProbEstimate::exact(0.8)};
  std::map<VertexPair, PairAlive> pa;
  pa[{0, 1}] = PairAlive{ProbEstimate::exact(0.5), false};
  const auto t = build_g_table(g, c, x, q, pa);
  EXPECT_DOUBLE_EQ(t.g[0], 0.04 / (0.5 * 0.8 * 0.5));
  pa[{0, 1}] = PairAlive{ProbEstimate::exact(0.0), false};
  const auto z = build_g_table(g, c, x, q, pa);
  EXPECT_EQ(z.g[0], 0.0);
  EXPECT_TRUE(z.entries[0].zero_denominator);
}

TEST(EndToEnd, FullQueryRatioIsOne) {
  const auto g = gen_random_graph(6, 0.6, Law::parse("uniform:0.5:2"), Law::parse("uniform:0.3:0.9"), 3);
  PipelineOptions opt;
  opt.params = Params::derive(0.2, 0.1, g.p_min(), 4, 0.15);
  opt.x_trials = 4000;
  opt.pair_trials = 4000;
  opt.seed = 5;
  const auto setup = prepare_pipeline(g, opt);
  const auto res = end_to_end(setup, opt.params, 0, true, 300, 7);
  EXPECT_DOUBLE_EQ(res.summary.ratio, 1.0);
  EXPECT_EQ(res.summary.degree_violations, 0u);
  EXPECT_EQ(res.summary.rounding_violations, 0u);
  for (const auto& r : res.runs) EXPECT_GE(r.alg, std::max(0.0, r.round_weight) - 1e-12);
}

TEST(EndToEnd, SingleEdgeAlgorithmWeight) {
  StochasticGraph g(2, {{0, 1, 2.0, 0.4}});
  PipelineOptions opt;
  opt.params = Params::derive(0.2, 0.1, 0.4, 4, 0.1);
  opt.x_trials = 2000;
  opt.seed = 1;
  const auto setup = prepare_pipeline(g, opt);
  const auto res = end_to_end(setup, opt.params, 0, true, 20000, 3);
  std::vector<double> w;
  for (const auto& r : res.runs) w.push_back(r.alg);
  double mean = 0.0, ss = 0.0;
  for (double v : w) mean += v;
  mean /= w.size();
  for (double v : w) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / (w.size() - 1) / w.size());
  EXPECT_NEAR(mean, 0.4 * 2.0, 3 * se);
}

TEST(EndToEnd, WorkerCountInvariant) {
  const auto g = gen_random_graph(6, 0.6, Law::parse("uniform:0.5:2"), Law::parse("uniform:0.3:0.9"), 4);
  PipelineOptions opt;
  opt.params = Params::derive(0.2, 0.1, g.p_min(), 3, 0.2);
  opt.x_trials = 2000;
  opt.pair_trials = 2000;
  opt.seed = 9;
  const auto s1 = prepare_pipeline(g, opt);
  opt.workers = 4;
  const auto s4 = prepare_pipeline(g, opt);
  const auto a = end_to_end(s1, opt.params, 3, false, 200, 1, 1);
  const auto b = end_to_end(s4, opt.params, 3, false, 200, 1, 4);
  for (std::size_t i = 0; i < a.runs.size(); ++i) EXPECT_EQ(a.runs[i].to_json(), b.runs[i].to_json());
}
