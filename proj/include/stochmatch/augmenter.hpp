#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stochmatch/estimator.hpp"
#include "stochmatch/sparsifier.hpp"
#include "stochmatch/vb_matching.hpp"

namespace stochmatch {

struct GEntry {
  EdgeId edge = 0;
  double x = 0.0;
  ProbEstimate queried;  // Pr[e in realized Q] = p_e Pr[e in Q]
  ProbEstimate pair;     // Pr[{u,v} in A]
  double g = 0.0;
  bool zero_denominator = false;  // f_e forced to 0
};

struct GTable {
  std::vector<double> g;        // per edge; 0 for crucial edges
  std::vector<GEntry> entries;  // non-crucial edges only

  std::size_t count_above(double threshold) const;
  double max_g() const;
};

// g_e = x_e / (p_e Pr[e in Q] Pr[{u,v} in A]) for every non-crucial edge.
// `q_hat` is Pr[e in Q]; `pair_alive` must cover every non-crucial edge's
// endpoints.
GTable build_g_table(const StochasticGraph& g, const EdgeClasses& classes,
                     std::span<const ProbEstimate> x_hat, std::span<const ProbEstimate> q_hat,
                     const std::map<VertexPair, PairAlive>& pair_alive);

struct SurvivalRecord {
  std::vector<bool> in_a;
  std::vector<bool> overloaded;  // pre-zeroing fractional degree > 1
  std::vector<bool> survived;
  std::vector<bool> edge_survived;
};

struct FractionalResult {
  FractionalMatching f;
  SurvivalRecord survival;
  double max_pre_degree = 0.0;
};

// f_e = gamma g_e for realized, queried, non-crucial edges with both ends in
// A; then every vertex whose degree exceeds one has all its edges zeroed
// (degrees taken once, before any zeroing).
FractionalResult build_fractional(const StochasticGraph& g, const EdgeClasses& classes,
                                  const QueryPlan& plan, const Realization& realization,
                                  const VBOutput& vb, const GTable& table, double gamma);

// Maximum-weight matching on the support of f.
Matching round_fractional(const StochasticGraph& g, const FractionalMatching& f);

struct Combined {
  Matching matching;
  int scheme = 0;           // 0: MM over crucial realized Q; 1: (M_c n Q) u M_n
  double weight_crucial = 0.0;
  double weight_mixed = 0.0;
};

// Heavier of the two schemes; ties go to scheme 0.
Combined combine(const StochasticGraph& g, const QueryPlan& plan, const Realization& realization,
                 const VBOutput& vb, const Matching& m_n, const EdgeClasses& classes);

}  // namespace stochmatch
