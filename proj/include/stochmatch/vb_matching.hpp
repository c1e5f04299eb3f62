#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "stochmatch/estimator.hpp"
#include "stochmatch/matching_law.hpp"
#include "stochmatch/mwm.hpp"

namespace stochmatch {

// 3y/(3+2y); y must lie in [0,1].
double attenuation_g(double y);

struct BatchCandidate {
  EdgeId edge = 0;
  double y = 0.0;       // marginal Pr[e in M_O]
  double y_cond = 0.0;  // conditional given the batch
  bool realized = false;
};

struct ActivationResult {
  std::optional<EdgeId> active;
  double mass = 0.0;     // sum of 3y'/(3+2y) over realized candidates, before clipping
  bool clipped = false;  // mass exceeded 1 and the batch was rescaled
};

// Picks at most one realized candidate, each with probability 3y'/(3+2y).
// When the masses sum past 1 + kClipTolerance they are scaled to sum to 1.
inline constexpr double kClipTolerance = 1e-12;
ActivationResult activate_batch(std::span<const BatchCandidate> candidates, Rng& rng);
// The per-candidate probabilities activate_batch uses (after clipping).
std::vector<double> activation_probabilities(std::span<const BatchCandidate> candidates,
                                             bool* clipped = nullptr);

struct ActivationRecord {
  VertexId vertex = 0;
  std::optional<VertexId> partner;
  std::optional<EdgeId> edge;
  bool accepted = false;
};

struct VBOutput {
  std::vector<VertexId> permutation;       // arrival order
  std::vector<ActivationRecord> activation_log;  // one per arrival
  Matching m_c;
  std::vector<bool> alive;                 // A as per-vertex flags
  EdgeSet active_edges;
  EdgeSet revealed_realized;               // crucial edges found realized
  std::size_t clip_events = 0;

  nlohmann::json to_json() const;
};

// Random arrival order, lazy reveal of each crucial edge (once, at its later
// endpoint's arrival), activation by the given law, greedy acceptance.
// When `given` is set, edge states come from it instead of fresh draws.
VBOutput run_vb(const GraphView& crucial, const MatchingLaw& law, Rng& rng,
                const Realization* given = nullptr);
VBOutput run_vb_with_order(const GraphView& crucial, const MatchingLaw& law,
                           std::span<const VertexId> order, Rng& rng,
                           const Realization* given = nullptr);

struct VBExact {
  std::vector<double> p_active;    // per edge
  std::vector<double> p_selected;  // per edge, Pr[e in M_c]
  std::vector<double> p_alive;     // per vertex
  std::map<VertexPair, double> pair_alive;  // every unordered vertex pair
};

// Exact law of (M_c, A) by enumerating arrival orders, batch states and
// activation outcomes. With `order` set, only that arrival order is used.
inline constexpr std::size_t kExactVbMaxVertices = 4;
inline constexpr std::size_t kExactVbMaxEdges = 5;
VBExact exact_vb_enumeration(const GraphView& crucial, const MatchingLaw& law,
                             std::optional<std::vector<VertexId>> order = std::nullopt);

}  // namespace stochmatch
