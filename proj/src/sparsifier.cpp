#include "stochmatch/sparsifier.hpp"

#include <algorithm>
#include <cmath>

#include "stochmatch/mwm.hpp"
#include "stochmatch/parallel.hpp"

namespace stochmatch {

std::size_t QueryPlan::max_degree(const StochasticGraph& g) const {
  std::vector<std::size_t> deg(g.num_vertices(), 0);
  for (EdgeId e : edges.indices()) {
    ++deg[g.edge(e).u];
    ++deg[g.edge(e).v];
  }
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

nlohmann::json QueryPlan::to_json() const {
  nlohmann::json j;
  j["t"] = t;
  j["edges"] = edges.indices();
  auto& ms = j["matchings"] = nlohmann::json::array();
  for (const Matching& m : matchings) {
    ms.push_back(std::vector<EdgeId>(m.edges().begin(), m.edges().end()));
  }
  return j;
}

QueryPlan QueryPlan::from_json(const nlohmann::json& j, const StochasticGraph& g) {
  QueryPlan plan;
  plan.t = j.at("t").get<std::uint64_t>();
  const auto ids = j.at("edges").get<std::vector<EdgeId>>();
  plan.edges = EdgeSet::from_indices(g.num_edges(), ids);
  EdgeSet uni(g.num_edges());
  for (const auto& m : j.at("matchings")) {
    plan.matchings.emplace_back(g, m.get<std::vector<EdgeId>>());
    for (EdgeId e : plan.matchings.back().edges()) uni.set(e);
  }
  if (!(uni == plan.edges)) throw Error("query plan edges differ from the union of its matchings");
  return plan;
}

QueryPlan build_query_plan(const StochasticGraph& g, std::uint64_t t, std::uint64_t seed,
                           int workers) {
  if (t < 1) throw Error("t must be >= 1");
  QueryPlan plan;
  plan.t = t;
  plan.matchings.resize(t);
  parallel_for(t, workers, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, streams::kPlan, i);
    plan.matchings[i] = max_weight_matching(GraphView(g, sample_realization(g, rng)));
  });
  plan.edges = EdgeSet(g.num_edges());
  for (const Matching& m : plan.matchings) {
    for (EdgeId e : m.edges()) plan.edges.set(e);
  }
  return plan;
}

QueryPlan full_query_plan(const StochasticGraph& g) {
  QueryPlan plan;
  plan.t = 0;
  plan.edges = EdgeSet(g.num_edges(), true);
  return plan;
}

EdgeClasses classify_edges(std::span<const double> x_hat, double tau) {
  EdgeClasses c;
  c.tau = tau;
  c.crucial = EdgeSet(x_hat.size());
  for (EdgeId e = 0; e < x_hat.size(); ++e) {
    if (x_hat[e] >= tau) c.crucial.set(e);
  }
  c.noncrucial = c.crucial.complement();
  return c;
}

EdgeClasses classify_edges(std::span<const ProbEstimate> x_hat, double tau) {
  std::vector<double> v;
  v.reserve(x_hat.size());
  for (const auto& x : x_hat) v.push_back(x.value);
  return classify_edges(std::span<const double>(v), tau);
}

CoverageReport check_crucial_coverage(const StochasticGraph& g, const EdgeClasses& classes,
                                      std::span<const ProbEstimate> x_hat, double epsilon,
                                      std::uint64_t t, std::uint64_t trials,
                                      std::uint64_t seed, int workers) {
  CoverageReport rep;
  rep.t = t;
  rep.epsilon = epsilon;
  rep.precondition_met =
      classes.tau > 0.0 && static_cast<double>(t) >= 1.0 / (classes.tau * epsilon);
  const auto cov = estimate_q(g, t, trials, seed, workers);
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    CoverageEntry ent;
    ent.edge = e;
    ent.crucial = classes.crucial.test(e);
    ent.coverage = cov[e];
    ent.claim_floor = std::min(1.0 / 3.0, static_cast<double>(t) * x_hat[e].value / 3.0);
    const double band = 3.0 * cov[e].std_err;
    ent.floor_ok = cov[e].value >= ent.claim_floor - band;
    ent.crucial_ok = !ent.crucial || cov[e].value >= 1.0 - epsilon - band;
    rep.crucial_pass = rep.crucial_pass && ent.crucial_ok;
    rep.floor_pass = rep.floor_pass && ent.floor_ok;
    rep.entries.push_back(ent);
  }
  return rep;
}

}  // namespace stochmatch
