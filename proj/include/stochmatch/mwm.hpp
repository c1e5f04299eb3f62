#pragma once

#include <span>
#include <vector>

#include "stochmatch/graph.hpp"

namespace stochmatch {

// A graph restricted to a subset of its edges (a realization, Q, the crucial
// edges, ...). Holds a reference; the graph must outlive the view.
class GraphView {
 public:
  GraphView() = default;
  explicit GraphView(const StochasticGraph& g) : g_(&g), mask_(g.num_edges(), true) {}
  GraphView(const StochasticGraph& g, EdgeSet mask);
  GraphView(const StochasticGraph& g, const Realization& r);

  const StochasticGraph& graph() const { return *g_; }
  const EdgeSet& mask() const { return mask_; }
  bool contains(EdgeId e) const { return mask_.test(e); }
  std::size_t num_edges() const { return mask_.count(); }

 private:
  const StochasticGraph* g_ = nullptr;
  EdgeSet mask_;
};

// Exact maximum-weight matching on a general graph (primal-dual blossom
// algorithm, O(n^3)). Edges are scanned in index order, so equal inputs give
// equal outputs. Zero-weight edges never enter the result.
Matching max_weight_matching(const GraphView& view);

// Exhaustive enumeration. Ties (within kWeightTolerance) go to the
// lexicographically smallest sorted edge-index vector. Refuses views with
// more than kBruteForceMaxEdges edges.
inline constexpr std::size_t kBruteForceMaxEdges = 20;
Matching brute_force_mwm(const GraphView& view);

namespace detail {

struct WeightedPair {
  int u;
  int v;
  double w;
};

// Low-level solver on a compact vertex range [0, n). Returns mate[v] (or -1).
std::vector<int> blossom_max_weight(int n, std::span<const WeightedPair> edges);

}  // namespace detail

}  // namespace stochmatch
