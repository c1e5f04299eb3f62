#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stochmatch/estimator.hpp"
#include "stochmatch/graph.hpp"

namespace stochmatch {

struct QueryPlan {
  std::uint64_t t = 0;
  EdgeSet edges;                    // Q, the union of the round matchings
  std::vector<Matching> matchings;  // M_1..M_t

  std::size_t max_degree(const StochasticGraph& g) const;
  // {"t": .., "edges": [...], "matchings": [[...], ...]}
  nlohmann::json to_json() const;
  static QueryPlan from_json(const nlohmann::json& j, const StochasticGraph& g);
};

// Round i uses its own realization drawn from Rng::stream(seed, kPlan, i), so
// the plan for t rounds is a prefix of the plan for any larger t.
QueryPlan build_query_plan(const StochasticGraph& g, std::uint64_t t, std::uint64_t seed,
                           int workers = 1);

// Q = E, as if every edge were queried.
QueryPlan full_query_plan(const StochasticGraph& g);

struct EdgeClasses {
  EdgeSet crucial;
  EdgeSet noncrucial;
  double tau = 0.0;
};

// e is crucial iff x_hat_e >= tau.
EdgeClasses classify_edges(std::span<const ProbEstimate> x_hat, double tau);
EdgeClasses classify_edges(std::span<const double> x_hat, double tau);

struct CoverageEntry {
  EdgeId edge = 0;
  bool crucial = false;
  ProbEstimate coverage;  // Pr[e in Q] across plan redraws
  double claim_floor = 0.0;  // min(1/3, t x_hat / 3)
  bool crucial_ok = true;    // crucial edges: coverage >= 1 - eps - 3 SE
  bool floor_ok = true;      // all edges: coverage >= claim_floor - 3 SE
};

struct CoverageReport {
  std::uint64_t t = 0;
  double epsilon = 0.0;
  bool precondition_met = false;  // t >= 1/(tau eps)
  std::vector<CoverageEntry> entries;
  bool crucial_pass = true;
  bool floor_pass = true;
};

CoverageReport check_crucial_coverage(const StochasticGraph& g, const EdgeClasses& classes,
                                      std::span<const ProbEstimate> x_hat, double epsilon,
                                      std::uint64_t t, std::uint64_t trials,
                                      std::uint64_t seed, int workers = 1);

}  // namespace stochmatch
