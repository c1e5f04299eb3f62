#include "stochmatch/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

namespace stochmatch {

// ---------------------------------------------------------------- EdgeSet

EdgeSet::EdgeSet(std::size_t size, bool value)
    : size_(size), words_((size + 63) / 64, value ? ~std::uint64_t{0} : 0) {
  trim();
}

EdgeSet EdgeSet::from_indices(std::size_t size, std::span<const EdgeId> ids) {
  EdgeSet s(size);
  for (EdgeId e : ids) {
    if (e >= size) throw Error("edge index out of range");
    s.set(e);
  }
  return s;
}

void EdgeSet::trim() {
  if (size_ % 64 != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }
}

std::size_t EdgeSet::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<EdgeId> EdgeSet::indices() const {
  std::vector<EdgeId> out;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    std::uint64_t w = words_[i];
    while (w != 0) {
      const int b = std::countr_zero(w);
      out.push_back(static_cast<EdgeId>(i * 64 + static_cast<std::size_t>(b)));
      w &= w - 1;
    }
  }
  return out;
}

EdgeSet& EdgeSet::operator&=(const EdgeSet& o) {
  if (o.size_ != size_) throw Error("edge set size mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  return *this;
}

EdgeSet& EdgeSet::operator|=(const EdgeSet& o) {
  if (o.size_ != size_) throw Error("edge set size mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

EdgeSet EdgeSet::complement() const {
  EdgeSet c = *this;
  for (auto& w : c.words_) w = ~w;
  c.trim();
  return c;
}

// --------------------------------------------------------- StochasticGraph

StochasticGraph::StochasticGraph(std::size_t n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)), incident_(n) {
  std::set<std::pair<VertexId, VertexId>> seen;
  std::uint64_t h = mix64(n);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.u >= n || e.v >= n) throw Error("edge endpoint out of range");
    if (e.u == e.v) throw Error("self-loop");
    if (!std::isfinite(e.w) || e.w < 0.0) throw Error("weight must be finite and >= 0");
    if (!(e.p > 0.0 && e.p <= 1.0)) throw Error("probability must lie in (0,1]");
    if (!seen.emplace(std::min(e.u, e.v), std::max(e.u, e.v)).second) {
      throw Error("duplicate edge");
    }
    incident_[e.u].push_back(static_cast<EdgeId>(i));
    incident_[e.v].push_back(static_cast<EdgeId>(i));
    p_min_ = std::min(p_min_, e.p);
    h = mix64(h ^ (std::uint64_t{e.u} << 32 | e.v));
    h = mix64(h ^ std::bit_cast<std::uint64_t>(e.w));
    h = mix64(h ^ std::bit_cast<std::uint64_t>(e.p));
  }
  token_ = h;
}

std::optional<EdgeId> StochasticGraph::find_edge(VertexId a, VertexId b) const {
  if (a >= n_ || b >= n_) return std::nullopt;
  for (EdgeId e : incident_[a]) {
    if (edges_[e].other(a) == b) return e;
  }
  return std::nullopt;
}

// ------------------------------------------------------------- Realization

Realization::Realization(const StochasticGraph& g, EdgeSet bits)
    : bits_(std::move(bits)), token_(g.token()) {
  if (bits_.size() != g.num_edges()) throw Error("realization size mismatch");
}

std::string Realization::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t m = bits_.size();
  std::string out((m + 3) / 4, '0');
  for (std::size_t k = 0; k < out.size(); ++k) {
    unsigned nibble = 0;
    for (unsigned j = 0; j < 4; ++j) {
      const std::size_t e = 4 * k + j;
      if (e < m && bits_.test(static_cast<EdgeId>(e))) nibble |= 1U << j;
    }
    out[k] = kDigits[nibble];
  }
  return out;
}

Realization Realization::from_hex(const StochasticGraph& g, std::string_view hex) {
  const std::size_t m = g.num_edges();
  if (hex.size() != (m + 3) / 4) throw Error("hex realization has wrong length");
  EdgeSet bits(m);
  for (std::size_t k = 0; k < hex.size(); ++k) {
    const char c = hex[k];
    unsigned nibble;
    if (c >= '0' && c <= '9') {
      nibble = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      nibble = static_cast<unsigned>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      nibble = static_cast<unsigned>(c - 'A' + 10);
    } else {
      throw Error("invalid hex digit");
    }
    for (unsigned j = 0; j < 4; ++j) {
      if (!(nibble >> j & 1U)) continue;
      const std::size_t e = 4 * k + j;
      if (e >= m) throw Error("hex realization sets a bit past the last edge");
      bits.set(static_cast<EdgeId>(e));
    }
  }
  return Realization(g, std::move(bits));
}

Realization sample_realization(const StochasticGraph& g, Rng& rng) {
  EdgeSet bits(g.num_edges());
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (rng.bernoulli(g.edge(e).p)) bits.set(e);
  }
  return Realization(g, std::move(bits));
}

Realization sample_realization(const StochasticGraph& g, const EdgeSet& restrict_to,
                               Rng& rng) {
  EdgeSet bits(g.num_edges());
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    // Draw for every edge so that the stream layout does not depend on the mask.
    const bool hit = rng.bernoulli(g.edge(e).p);
    if (hit && restrict_to.test(e)) bits.set(e);
  }
  return Realization(g, std::move(bits));
}

// ---------------------------------------------------------------- Matching

Matching::Matching(const StochasticGraph& g, std::vector<EdgeId> edges)
    : edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw Error("matching lists an edge twice");
  }
  std::vector<bool> used(g.num_vertices(), false);
  for (EdgeId e : edges_) {
    if (e >= g.num_edges()) throw Error("matching references a foreign edge");
    const Edge& ed = g.edge(e);
    if (used[ed.u] || used[ed.v]) throw Error("matching edges share an endpoint");
    used[ed.u] = used[ed.v] = true;
  }
}

bool Matching::contains(EdgeId e) const {
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

double weight_of(const Matching& m, const StochasticGraph& g) {
  double total = 0.0;
  for (EdgeId e : m.edges()) {
    if (e >= g.num_edges()) throw Error("matching references a foreign edge");
    total += g.edge(e).w;
  }
  return total;
}

std::vector<bool> matched_vertices(const Matching& m, const StochasticGraph& g) {
  std::vector<bool> out(g.num_vertices(), false);
  for (EdgeId e : m.edges()) {
    out[g.edge(e).u] = true;
    out[g.edge(e).v] = true;
  }
  return out;
}

// ------------------------------------------------------ FractionalMatching

void FractionalMatching::set(EdgeId e, double value) {
  if (!(value >= 0.0 && value <= 1.0)) throw Error("fractional value outside [0,1]");
  values_.at(e) = value;
}

double FractionalMatching::degree(const StochasticGraph& g, VertexId v) const {
  double d = 0.0;
  for (EdgeId e : g.incident(v)) d += values_[e];
  return d;
}

double FractionalMatching::dot(const StochasticGraph& g) const {
  double s = 0.0;
  for (EdgeId e = 0; e < values_.size(); ++e) s += values_[e] * g.edge(e).w;
  return s;
}

double FractionalMatching::max_value() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, v);
  return m;
}

std::vector<EdgeId> FractionalMatching::support() const {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < values_.size(); ++e) {
    if (values_[e] > 0.0) out.push_back(e);
  }
  return out;
}

bool is_valid_fractional(const FractionalMatching& f, const StochasticGraph& g,
                         double tolerance) {
  if (f.size() != g.num_edges()) return false;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (f.degree(g, v) > 1.0 + tolerance) return false;
  }
  return true;
}

// ------------------------------------------------------------------ Params

Params Params::derive(double epsilon, double delta, double p,
                      std::optional<std::uint64_t> t,
                      std::optional<double> tau_override) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("epsilon must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0,1)");
  if (!(p > 0.0 && p <= 1.0)) throw Error("p must lie in (0,1]");
  Params out;
  out.epsilon = epsilon;
  out.delta = delta;
  out.p = p;
  out.tau = 20.0 * p * std::pow(epsilon, 5) * delta * delta;
  if (tau_override) {
    if (!(*tau_override >= 0.0)) throw Error("tau override must be >= 0");
    out.tau = *tau_override;
    out.tau_overridden = true;
  }
  out.eta = epsilon / 10.0;
  out.beta = epsilon * epsilon / 100.0;
  out.gamma = (1.0 - epsilon * epsilon) / (1.0 + 3.0 * out.eta);
  out.c = 10.0 / epsilon;

  const double theory = out.tau > 0.0 ? std::ceil(1.0 / (out.tau * epsilon))
                                      : std::numeric_limits<double>::infinity();
  out.t_theory = theory >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max()
                                  : static_cast<std::uint64_t>(theory);
  if (t) {
    if (*t < 1) throw Error("t must be >= 1");
    out.t = *t;
  } else {
    out.t = out.t_theory;
  }
  return out;
}

}  // namespace stochmatch
