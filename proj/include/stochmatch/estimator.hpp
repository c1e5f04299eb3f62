#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "stochmatch/graph.hpp"
#include "stochmatch/mwm.hpp"

namespace stochmatch {

class MatchingLaw;

struct ProbEstimate {
  double value = 0.0;
  std::uint64_t trials = 0;
  double std_err = 0.0;

  static ProbEstimate from_count(std::uint64_t hits, std::uint64_t trials);
  // A known probability: zero standard error, trials = 0.
  static ProbEstimate exact(double value);
};

using VertexPair = std::pair<VertexId, VertexId>;  // first < second

inline VertexPair make_pair_key(VertexId a, VertexId b) {
  return a < b ? VertexPair{a, b} : VertexPair{b, a};
}

struct PairAlive {
  ProbEstimate estimate;
  bool adjacent = false;  // joined by a crucial edge; outside the floor guarantee
};

struct EstimateTable {
  std::vector<ProbEstimate> x_hat;  // per edge
  std::vector<ProbEstimate> y_hat;  // per edge, zero off the crucial set
  std::vector<ProbEstimate> q_hat;  // per edge, Pr[e in Q]
  std::map<VertexPair, PairAlive> pair_alive;

  // Columns: edge_id,u,v,x_hat,x_se,y_hat,y_se,q_hat,q_se
  void write_csv(std::ostream& os, const StochasticGraph& g) const;
};

// Frequency of e in MM(realization) over `trials` seeded realizations.
// Trial i draws from Rng::stream(seed, streams::kEstimateX, i).
std::vector<ProbEstimate> estimate_x(const StochasticGraph& g, std::uint64_t trials,
                                     std::uint64_t seed, int workers = 1);
std::vector<ProbEstimate> estimate_x_serial(const StochasticGraph& g, std::uint64_t trials,
                                            std::uint64_t seed);

// Frequency of e in MM(H u N*) n H, where both parts are independent draws,
// i.e. a full realization of the parent graph intersected with the crucial
// mask of `crucial`.
std::vector<ProbEstimate> estimate_y(const GraphView& crucial, std::uint64_t trials,
                                     std::uint64_t seed, int workers = 1);

// Pr[e in Q] by redrawing plans of t rounds.
std::vector<ProbEstimate> estimate_q(const StochasticGraph& g, std::uint64_t t,
                                     std::uint64_t trials, std::uint64_t seed,
                                     int workers = 1);

// Pr[e in Q] = 1 - (1 - x_e)^t, since the t rounds are i.i.d. copies of
// MM(realization). The standard error is propagated from x_hat.
std::vector<ProbEstimate> q_from_x(std::span<const ProbEstimate> x_hat, std::uint64_t t);

// Conditional membership in M_O for every edge of a batch, given the batch's
// states (bit i of `realized` is the state of batch[i]). Batch edges are
// frozen, all other edges redrawn. Unrealized batch edges report 0.
std::vector<ProbEstimate> estimate_batch_conditional(const GraphView& crucial,
                                                     std::span<const EdgeId> batch,
                                                     std::uint64_t realized,
                                                     std::uint64_t trials, Rng& rng);

// Single-edge form. Throws when e is not a realized member of the batch.
ProbEstimate estimate_y_conditional(const GraphView& crucial, EdgeId e,
                                    std::span<const EdgeId> batch, std::uint64_t realized,
                                    std::uint64_t trials, Rng& rng);

// Joint frequency of both endpoints in A over independent runs of the
// variance-bounding matching. Run i uses Rng::stream(seed, kPairAlive, i).
std::vector<PairAlive> estimate_pair_alive(const GraphView& crucial, const MatchingLaw& law,
                                           std::span<const VertexPair> pairs,
                                           std::uint64_t trials, std::uint64_t seed,
                                           int workers = 1);

}  // namespace stochmatch
