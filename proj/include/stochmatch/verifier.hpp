#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stochmatch/pipeline.hpp"

namespace stochmatch {

enum class Verdict { kPass, kFail, kInconclusive };
enum class Comparison { kAtLeast, kAtMost, kWithin };

const char* to_string(Verdict v);

inline constexpr double kBand = 3.0;  // standard errors

struct CheckEntry {
  std::string label;
  double estimate = 0.0;
  double std_err = 0.0;
  double threshold = 0.0;
  Comparison cmp = Comparison::kAtLeast;
  double tolerance = 0.0;  // absolute slack on top of kBand * std_err
  bool ok = true;

  // Margin in units of the allowed deviation; the smallest one summarizes a check.
  double margin() const;
};

CheckEntry make_entry(std::string label, double estimate, double std_err, double threshold,
                      Comparison cmp, double tolerance = 0.0);

struct CheckReport {
  std::string name;
  std::string instance;
  Comparison cmp = Comparison::kAtLeast;
  double estimate = 0.0;
  double std_err = 0.0;
  double threshold = 0.0;
  Verdict verdict = Verdict::kPass;
  std::uint64_t trials = 0;
  bool gated = true;
  std::string note;
  std::vector<CheckEntry> entries;

  nlohmann::json to_json() const;
};

// Summarizes entries by the one with the smallest margin. Verdict is pass iff
// every entry is ok; an empty entry list passes trivially.
CheckReport finish_report(std::string name, std::string instance, std::vector<CheckEntry> entries,
                          std::uint64_t trials, bool gated = true, std::string note = {});

void print_table(std::ostream& os, const std::vector<CheckReport>& reports);
nlohmann::json reports_to_json(const std::vector<CheckReport>& reports);
bool any_gated_failure(const std::vector<CheckReport>& reports);

// A small crucial graph with a law for M_O. All edges of `graph` are crucial
// unless `crucial` says otherwise.
struct Gadget {
  std::string name;
  std::shared_ptr<const StochasticGraph> graph;
  EdgeSet crucial;
  std::shared_ptr<const MatchingLaw> law;

  GraphView view() const { return GraphView(*graph, crucial); }
  bool enumerable() const;
};

Gadget make_gadget(std::string name, StochasticGraph g, std::optional<std::vector<double>> fixed_y);

// Single edge (y = 1 and y = 1/2), 3-edge path and 4-cycle with exact and
// prescribed laws, a shared-neighbor path, a star, a triangle with a pendant
// edge, and an isolated pair.
std::vector<Gadget> bundled_gadgets();

// The 6-vertex, 8-edge benchmark graph.
StochasticGraph benchmark_graph();

// ------------------------------------------------------------------ checks

CheckReport check_mwm_oracle(std::size_t instances, std::uint64_t seed);

// Pr[e active] vs g(y_e); vs the exact enumeration when available, and for
// enumerable gadgets also exactly for every fixed arrival order.
CheckReport check_activation(const Gadget& gd, std::uint64_t trials, std::uint64_t seed);

// Non-adjacent pairs >= 1/576 - 3 SE; Monte Carlo vs enumeration when available.
CheckReport check_pair_alive(const Gadget& gd, std::uint64_t trials, std::uint64_t seed);

// Pr[e in M_c] vs enumeration (gated); vs (8/15) y (second report, gated only
// for the single-edge case).
std::vector<CheckReport> check_selectability(const Gadget& gd, std::uint64_t trials,
                                             std::uint64_t seed);

// Chi-square independence of X_u, X_w under a fixed arrival order.
CheckReport check_influential_independence(const Gadget& gd, std::uint64_t trials,
                                           std::uint64_t seed);

// Cov(1[e1 in Q], 1[e2 in Q]) <= 3 SE for incident edge pairs. Edges in
// `shared` have one realization reused by every round (negative control).
CheckReport check_negative_association(const StochasticGraph& g, std::uint64_t t,
                                       std::uint64_t trials, std::uint64_t seed,
                                       const EdgeSet* shared = nullptr,
                                       std::string instance = "graph");

// Exact covariance of the two-edge fixture under the deterministic MM
// against the -1/4 two-point value.
CheckReport check_two_point_covariance();

// Single-edge closed form, max degree <= t and the min(1/3, t x/3) floor.
std::vector<CheckReport> check_query_plan_laws(const StochasticGraph& g, std::string instance,
                                               std::uint64_t t, std::uint64_t x_trials,
                                               std::uint64_t trials, std::uint64_t seed);

struct SyntheticEdge {
  VertexId u = 0;
  VertexId v = 0;
  double x = 0.0;
};

// Sample Var(Z_v) <= 10 tau / delta_hat^2 * (1 + slack) for every vertex.
CheckReport check_var_Z(const Gadget& gd, std::span<const SyntheticEdge> synthetic, double tau,
                        std::uint64_t trials, std::uint64_t seed, double slack = 0.2);

// Tail masses of Y_v against eta and beta. Never gated.
CheckReport check_concentration_Y(const PipelineSetup& setup, const Params& params,
                                  std::uint64_t t, std::uint64_t trials, std::uint64_t seed);

// Degree cap, rounding bound, combiner dominance and E[f_e] >= (1-eps/2) x_e.
// Also reports how many g_e exceed eps^3 and eps^2.
std::vector<CheckReport> check_fractional_stage(const PipelineSetup& setup, const Params& params,
                                                std::uint64_t t, std::uint64_t trials,
                                                std::uint64_t seed, int workers = 1);

// Control ratio (Q = E) and the paired t=1 vs t=ceil(8/p) comparison.
std::vector<CheckReport> check_end_to_end(const PipelineSetup& setup, const Params& params,
                                          std::uint64_t trials, std::uint64_t seed,
                                          int workers = 1);

struct SuiteOptions {
  std::uint64_t seed = 1;
  std::uint64_t trials = 20000;
  int workers = 1;
  bool negative_control = false;  // add the shared-bonus fixture as a gated check
};

// The relaxed-parameter 8-vertex instance and its parameters.
struct RelaxedSuite {
  StochasticGraph graph;
  Params params;
};
RelaxedSuite relaxed_suite();

std::vector<CheckReport> run_default_suite(const SuiteOptions& opt);

// The fixture for the negative control: a heavy edge whose single draw is
// shared by every plan round, next to two light incident edges.
struct SharedBonusFixture {
  StochasticGraph graph;
  EdgeSet shared;
  std::uint64_t t = 6;
};
SharedBonusFixture shared_bonus_fixture();

QueryPlan build_query_plan_shared(const StochasticGraph& g, std::uint64_t t, std::uint64_t seed,
                                  const EdgeSet& shared);

}  // namespace stochmatch
