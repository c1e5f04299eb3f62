#include "stochmatch/augmenter.hpp"

#include <algorithm>
#include <cmath>

namespace stochmatch {

std::size_t GTable::count_above(double threshold) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [&](const GEntry& e) { return e.g > threshold; }));
}

double GTable::max_g() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.g);
  return m;
}

GTable build_g_table(const StochasticGraph& g, const EdgeClasses& classes,
                     std::span<const ProbEstimate> x_hat, std::span<const ProbEstimate> q_hat,
                     const std::map<VertexPair, PairAlive>& pair_alive) {
  GTable table;
  table.g.assign(g.num_edges(), 0.0);
  for (EdgeId e : classes.noncrucial.indices()) {
    const Edge& ed = g.edge(e);
    GEntry ent;
    ent.edge = e;
    ent.x = x_hat[e].value;
    ent.queried.value = ed.p * q_hat[e].value;
    ent.queried.std_err = ed.p * q_hat[e].std_err;
    ent.queried.trials = q_hat[e].trials;
    const auto it = pair_alive.find(make_pair_key(ed.u, ed.v));
    if (it == pair_alive.end()) throw Error("pair-alive estimate missing for a non-crucial edge");
    ent.pair = it->second.estimate;
    const double denom = ent.queried.value * ent.pair.value;
    if (denom > 0.0) {
      ent.g = ent.x / denom;
    } else {
      ent.zero_denominator = true;
    }
    table.g[e] = ent.g;
    table.entries.push_back(ent);
  }
  return table;
}

FractionalResult build_fractional(const StochasticGraph& g, const EdgeClasses& classes,
                                  const QueryPlan& plan, const Realization& realization,
                                  const VBOutput& vb, const GTable& table, double gamma) {
  const std::size_t n = g.num_vertices();
  FractionalResult res;
  res.f = FractionalMatching(g.num_edges());
  std::vector<double> value(g.num_edges(), 0.0);
  std::vector<double> deg(n, 0.0);
  for (EdgeId e : classes.noncrucial.indices()) {
    const Edge& ed = g.edge(e);
    if (!plan.edges.test(e) || !realization.contains(e)) continue;
    if (!vb.alive[ed.u] || !vb.alive[ed.v]) continue;
    value[e] = gamma * table.g[e];
    deg[ed.u] += value[e];
    deg[ed.v] += value[e];
  }
  SurvivalRecord& s = res.survival;
  s.in_a = vb.alive;
  s.overloaded.assign(n, false);
  s.survived.assign(n, false);
  for (VertexId v = 0; v < n; ++v) {
    res.max_pre_degree = std::max(res.max_pre_degree, deg[v]);
    s.overloaded[v] = deg[v] > 1.0;
    s.survived[v] = s.in_a[v] && !s.overloaded[v];
  }
  s.edge_survived.assign(g.num_edges(), false);
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    s.edge_survived[e] = s.survived[ed.u] && s.survived[ed.v];
    // A surviving edge has both endpoint degrees <= 1, so value[e] <= 1 here.
    if (value[e] > 0.0 && s.edge_survived[e]) res.f.set(e, value[e]);
  }
  return res;
}

Matching round_fractional(const StochasticGraph& g, const FractionalMatching& f) {
  const auto support = f.support();
  return max_weight_matching(GraphView(g, EdgeSet::from_indices(g.num_edges(), support)));
}

Combined combine(const StochasticGraph& g, const QueryPlan& plan, const Realization& realization,
                 const VBOutput& vb, const Matching& m_n, const EdgeClasses& classes) {
  Combined out;
  const EdgeSet crucial_q = classes.crucial & plan.edges & realization.bits();
  const Matching a = max_weight_matching(GraphView(g, crucial_q));
  std::vector<EdgeId> mixed;
  for (EdgeId e : vb.m_c.edges()) {
    if (plan.edges.test(e)) mixed.push_back(e);
  }
  for (EdgeId e : m_n.edges()) {
    if (classes.crucial.test(e)) throw Error("combine: M_n holds a crucial edge");
    mixed.push_back(e);
  }
  Matching b;
  try {
    b = Matching(g, std::move(mixed));
  } catch (const Error&) {
    throw Error("combine: M_c and M_n overlap");
  }
  out.weight_crucial = weight_of(a, g);
  out.weight_mixed = weight_of(b, g);
  if (out.weight_mixed > out.weight_crucial) {
    out.scheme = 1;
    out.matching = std::move(b);
  } else {
    out.scheme = 0;
    out.matching = std::move(a);
  }
  return out;
}

}  // namespace stochmatch
