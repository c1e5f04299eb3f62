#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochmatch/rng.hpp"

namespace stochmatch {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

// Tolerance used for weight comparisons in tie-breaking contexts.
inline constexpr double kWeightTolerance = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fixed-size bitset over edge positions of a parent graph.
class EdgeSet {
 public:
  EdgeSet() = default;
  explicit EdgeSet(std::size_t size, bool value = false);

  static EdgeSet from_indices(std::size_t size, std::span<const EdgeId> ids);

  std::size_t size() const { return size_; }
  bool test(EdgeId e) const { return (words_[e >> 6] >> (e & 63)) & 1U; }
  void set(EdgeId e, bool value = true) {
    const std::uint64_t bit = std::uint64_t{1} << (e & 63);
    if (value) {
      words_[e >> 6] |= bit;
    } else {
      words_[e >> 6] &= ~bit;
    }
  }
  std::size_t count() const;
  bool any() const { return count() > 0; }
  std::vector<EdgeId> indices() const;

  EdgeSet& operator&=(const EdgeSet& o);
  EdgeSet& operator|=(const EdgeSet& o);
  friend EdgeSet operator&(EdgeSet a, const EdgeSet& b) { return a &= b; }
  friend EdgeSet operator|(EdgeSet a, const EdgeSet& b) { return a |= b; }
  EdgeSet complement() const;
  bool operator==(const EdgeSet&) const = default;

  std::span<const std::uint64_t> words() const { return words_; }

 private:
  void trim();

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct Edge {
  VertexId u = 0;
  VertexId v = 0;
  double w = 0.0;
  double p = 1.0;

  VertexId other(VertexId x) const { return x == u ? v : u; }
  bool touches(VertexId x) const { return x == u || x == v; }
};

// Immutable weighted graph whose edges realize independently with
// probability p. Edge identity is the position in the edge list.
class StochasticGraph {
 public:
  StochasticGraph() = default;
  StochasticGraph(std::size_t n, std::vector<Edge> edges);

  std::size_t num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const EdgeId> incident(VertexId v) const { return incident_[v]; }
  // Minimum p over edges; 1 for an edgeless graph.
  double p_min() const { return p_min_; }
  std::optional<EdgeId> find_edge(VertexId a, VertexId b) const;
  bool adjacent(VertexId a, VertexId b) const { return find_edge(a, b).has_value(); }
  // Content hash; realizations remember which graph they belong to.
  std::uint64_t token() const { return token_; }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> incident_;
  double p_min_ = 1.0;
  std::uint64_t token_ = 0;
};

// A random subgraph: the set of realized edges of a parent graph.
class Realization {
 public:
  Realization() = default;
  Realization(const StochasticGraph& g, EdgeSet bits);

  bool contains(EdgeId e) const { return bits_.test(e); }
  const EdgeSet& bits() const { return bits_; }
  std::uint64_t graph_token() const { return token_; }

  std::string to_hex() const;
  static Realization from_hex(const StochasticGraph& g, std::string_view hex);

 private:
  EdgeSet bits_;
  std::uint64_t token_ = 0;
};

// Each edge included independently with probability p_e.
Realization sample_realization(const StochasticGraph& g, Rng& rng);
// Same, but only edges in `restrict_to` are drawn; the rest are absent.
Realization sample_realization(const StochasticGraph& g, const EdgeSet& restrict_to,
                               Rng& rng);

class Matching {
 public:
  Matching() = default;
  // Validates the edge set; throws Error on a shared endpoint or foreign edge.
  Matching(const StochasticGraph& g, std::vector<EdgeId> edges);

  std::span<const EdgeId> edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  bool contains(EdgeId e) const;
  bool operator==(const Matching&) const = default;

 private:
  std::vector<EdgeId> edges_;  // sorted
};

// Sum of member weights. Throws Error when an index is not an edge of g.
double weight_of(const Matching& m, const StochasticGraph& g);

// Per-vertex matched flags for m.
std::vector<bool> matched_vertices(const Matching& m, const StochasticGraph& g);

// Dense per-edge values in [0,1]. The per-vertex cap is checked separately by
// is_valid_fractional since intermediate vectors may exceed it.
class FractionalMatching {
 public:
  FractionalMatching() = default;
  explicit FractionalMatching(std::size_t num_edges) : values_(num_edges, 0.0) {}

  double operator[](EdgeId e) const { return values_[e]; }
  void set(EdgeId e, double value);
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  double degree(const StochasticGraph& g, VertexId v) const;
  double dot(const StochasticGraph& g) const;  // f . w
  double max_value() const;
  std::vector<EdgeId> support() const;

 private:
  std::vector<double> values_;
};

bool is_valid_fractional(const FractionalMatching& f, const StochasticGraph& g,
                         double tolerance = 1e-12);

// Parameter table. Derived fields follow their closed forms exactly.
struct Params {
  double epsilon = 0.1;
  double delta = 1.0 / 576.0;
  double p = 1.0;
  double tau = 0.0;
  double eta = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double c = 0.0;
  std::uint64_t t = 1;
  // The theory value ceil(1/(tau*epsilon)); saturates at UINT64_MAX.
  std::uint64_t t_theory = 1;
  bool tau_overridden = false;

  // tau = 20 p eps^5 delta^2, eta = eps/10, beta = eps^2/100,
  // gamma = (1 - eps^2)/(1 + 3 eta), c = 10/eps. When t is absent it is set to
  // t_theory. A tau override replaces the formula value (t_theory follows it).
  static Params derive(double epsilon, double delta, double p,
                       std::optional<std::uint64_t> t = std::nullopt,
                       std::optional<double> tau_override = std::nullopt);
};

}  // namespace stochmatch
