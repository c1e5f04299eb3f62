#include <gtest/gtest.h>

#include <cmath>

#include "stochmatch/verifier.hpp"

using namespace stochmatch;

namespace {

const Gadget& gadget(const std::vector<Gadget>& all, const std::string& name) {
  for (const auto& g : all) {
    if (g.name == name) return g;
  }
  throw std::runtime_error("no gadget " + name);
}

}  // namespace

TEST(CheckEntry, BandSemantics) {
  EXPECT_TRUE(make_entry("a", 0.9701, 0.01, 1.0, Comparison::kAtLeast).ok);
  EXPECT_FALSE(make_entry("a", 0.96, 0.01, 1.0, Comparison::kAtLeast).ok);
  EXPECT_TRUE(make_entry("b", 1.0299, 0.01, 1.0, Comparison::kAtMost).ok);
  EXPECT_FALSE(make_entry("b", 1.031, 0.01, 1.0, Comparison::kAtMost).ok);
  EXPECT_TRUE(make_entry("c", 0.971, 0.01, 1.0, Comparison::kWithin).ok);
  EXPECT_FALSE(make_entry("c", 1.031, 0.01, 1.0, Comparison::kWithin).ok);
  EXPECT_TRUE(make_entry("d", 1.0 + 5e-10, 0.0, 1.0, Comparison::kWithin, 1e-9).ok);
  EXPECT_FALSE(make_entry("d", 1.0 + 5e-9, 0.0, 1.0, Comparison::kWithin, 1e-9).ok);
}

TEST(CheckReport, VerdictFollowsWorstEntry) {
  auto r = finish_report("x", "i",
                         {make_entry("good", 1.0, 0.0, 0.0, Comparison::kAtLeast),
                          make_entry("bad", -1.0, 0.0, 0.0, Comparison::kAtLeast)},
                         10);
  EXPECT_EQ(r.verdict, Verdict::kFail);
  EXPECT_EQ(r.estimate, -1.0);
  EXPECT_TRUE(any_gated_failure({r}));
  r.gated = false;
  EXPECT_FALSE(any_gated_failure({r}));
  const auto empty = finish_report("y", "i", {}, 0);
  EXPECT_EQ(empty.verdict, Verdict::kPass);
  const auto j = r.to_json();
  EXPECT_EQ(j["verdict"], "fail");
  EXPECT_EQ(j["entries"].size(), 2u);
}

TEST(Verifier, DeterministicInSeed) {
  const auto all = bundled_gadgets();
  const auto& gd = gadget(all, "path3-exact");
  const auto a = check_activation(gd, 2000, 5);
  const auto b = check_activation(gd, 2000, 5);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) EXPECT_EQ(a.entries[i].estimate, b.entries[i].estimate);
}

TEST(Verifier, SingleEdgeActivationNearPointSix) {
  const auto all = bundled_gadgets();
  const auto r = check_activation(gadget(all, "edge-y1"), 50000, 3);
  EXPECT_EQ(r.verdict, Verdict::kPass);
  EXPECT_NEAR(r.entries[0].estimate, 0.6, 0.01);
}

TEST(Verifier, ZeroMarginalEdgeNeverActiveOrSelected) {
  const auto gd = make_gadget("y0", StochasticGraph(2, {{0, 1, 1.0, 1.0}}), std::vector<double>{0.0});
  const auto r = check_activation(gd, 5000, 1);
  EXPECT_EQ(r.verdict, Verdict::kPass);
  EXPECT_EQ(r.entries[0].estimate, 0.0);
  const auto s = check_selectability(gd, 5000, 1);
  for (const auto& rep : s) EXPECT_EQ(rep.entries[0].estimate, 0.0);
}

TEST(Verifier, PairAliveAdjacentExcludedAndIsolatedIsOne) {
  const auto all = bundled_gadgets();
  const auto iso = check_pair_alive(gadget(all, "isolated-pair"), 1000, 1);
  EXPECT_EQ(iso.verdict, Verdict::kPass);
  EXPECT_EQ(iso.entries[0].estimate, 1.0);
  const auto edge = check_pair_alive(gadget(all, "edge-y1"), 1000, 1);
  for (const auto& e : edge.entries) EXPECT_EQ(e.label.find("floor"), std::string::npos);
  EXPECT_NE(edge.note.find("adjacent"), std::string::npos);
  const auto shared = check_pair_alive(gadget(all, "shared-neighbor"), 20000, 1);
  EXPECT_EQ(shared.verdict, Verdict::kPass);
}

TEST(Verifier, IndependenceOnGadgets) {
  for (const auto& gd : bundled_gadgets()) {
    if (!gd.crucial.any()) continue;
    EXPECT_EQ(check_influential_independence(gd, 20000, 2).verdict, Verdict::kPass) << gd.name;
  }
}

TEST(Verifier, TwoPointCovarianceIsZeroUnderDeterministicMM) {
  const auto r = check_two_point_covariance();
  EXPECT_EQ(r.entries[0].estimate, 0.0);
  EXPECT_EQ(r.verdict, Verdict::kFail);
}

TEST(Verifier, NegativeAssociationAndControl) {
  StochasticGraph star(4, {{0, 1, 1.0, 0.5}, {0, 2, 2.0, 0.6}, {0, 3, 1.5, 0.4}});
  EXPECT_EQ(check_negative_association(star, 3, 5000, 1, nullptr, "star").verdict, Verdict::kPass);
  // Disjoint edges: no incident pair is tested.
  StochasticGraph disjoint(4, {{0, 1, 1.0, 1.0}, {2, 3, 1.0, 1.0}});
  const auto d = check_negative_association(disjoint, 2, 100, 1, nullptr, "disjoint");
  EXPECT_TRUE(d.entries.empty());
  EXPECT_EQ(d.verdict, Verdict::kPass);
  const auto fx = shared_bonus_fixture();
  const auto c = check_negative_association(fx.graph, fx.t, 5000, 1, &fx.shared, "control");
  EXPECT_EQ(c.verdict, Verdict::kFail);
  EXPECT_GT(c.estimate, 0.1);
}

TEST(Verifier, SharedPlanKeepsSharedEdgeFixed) {
  const auto fx = shared_bonus_fixture();
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto plan = build_query_plan_shared(fx.graph, fx.t, s, fx.shared);
    int with_bonus = 0;
    for (const auto& m : plan.matchings) with_bonus += m.contains(2);
    EXPECT_TRUE(with_bonus == 0 || with_bonus == static_cast<int>(fx.t));
  }
}

TEST(Verifier, VarZZeroWithoutSyntheticEdges) {
  const auto all = bundled_gadgets();
  const auto r = check_var_Z(gadget(all, "path3-uniform"), {}, 0.1, 100, 1);
  EXPECT_EQ(r.verdict, Verdict::kPass);
  EXPECT_EQ(r.estimate, 0.0);
}

TEST(Verifier, VarZSingleNeighborClosedForm) {
  // Crucial edge (0,1) with y = 0.5; vertex 2 is isolated and always alive.
  const auto gd = make_gadget("edge+iso", StochasticGraph(3, {{0, 1, 1.0, 1.0}}), std::vector<double>{0.5});
  const std::vector<SyntheticEdge> syn = {{1, 2, 0.1}};
  const auto r = check_var_Z(gd, syn, 0.1, 100000, 4);
  EXPECT_EQ(r.verdict, Verdict::kPass);
  const double q = 1.0 - attenuation_g(0.5);
  const double h = 0.1 / q;
  EXPECT_NEAR(r.entries[2].estimate, h * h * q * (1.0 - q), 0.04 * h * h * q * (1.0 - q));
  EXPECT_NEAR(r.entries[1].estimate, 0.0, 1e-15);  // Z_1 = h * 1[2 in A] is constant
  EXPECT_THROW(check_var_Z(gd, std::vector<SyntheticEdge>{{0, 1, 0.1}}, 0.1, 10, 1), Error);
  EXPECT_THROW(check_var_Z(gd, std::vector<SyntheticEdge>{{1, 2, 0.2}}, 0.1, 10, 1), Error);
}

TEST(Verifier, ConcentrationWithoutNoncrucialEdgesIsTrivial) {
  StochasticGraph g(2, {{0, 1, 1.0, 1.0}});
  PipelineOptions po;
  po.params = Params::derive(0.1, 0.25, 1.0, 2, 0.1);
  po.x_trials = po.pair_trials = 200;
  const auto setup = prepare_pipeline(g, po);
  const auto r = check_concentration_Y(setup, po.params, 2, 200, 1);
  EXPECT_FALSE(r.gated);
  EXPECT_EQ(r.verdict, Verdict::kInconclusive);
  for (const auto& e : r.entries) EXPECT_EQ(e.estimate, 0.0);
}

TEST(Verifier, QueryPlanLawsOnBenchmark) {
  const auto g = benchmark_graph();
  EXPECT_EQ(g.num_vertices(), 6u);
  EXPECT_EQ(g.num_edges(), 8u);
  for (const auto& r : check_query_plan_laws(g, "benchmark6", 4, 5000, 1000, 1)) {
    EXPECT_EQ(r.verdict, Verdict::kPass) << r.name;
  }
}

TEST(Verifier, BundledGadgetsAreEnumerable) {
  for (const auto& gd : bundled_gadgets()) EXPECT_TRUE(gd.enumerable()) << gd.name;
}

TEST(Verifier, DefaultSuiteGatesAndNegativeControl) {
  SuiteOptions opt;
  opt.trials = 3000;
  const auto base = run_default_suite(opt);
  for (const auto& r : base) {
    if (r.gated) EXPECT_NE(r.verdict, Verdict::kFail) << r.name << " / " << r.instance;
  }
  EXPECT_FALSE(any_gated_failure(base));
  opt.negative_control = true;
  EXPECT_TRUE(any_gated_failure(run_default_suite(opt)));
}
