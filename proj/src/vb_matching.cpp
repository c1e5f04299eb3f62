#include "stochmatch/vb_matching.hpp"

#include <algorithm>
#include <numeric>

namespace stochmatch {

double attenuation_g(double y) {
  if (!(y >= 0.0 && y <= 1.0)) throw Error("attenuation_g: y outside [0,1]");
  return 3.0 * y / (3.0 + 2.0 * y);
}

std::vector<double> activation_probabilities(std::span<const BatchCandidate> candidates,
                                             bool* clipped) {
  std::vector<double> prob(candidates.size(), 0.0);
  double mass = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const BatchCandidate& c = candidates[i];
    if (c.y_cond < 0.0 || c.y < 0.0) throw Error("activation: negative probability");
    if (!c.realized) continue;
    prob[i] = 3.0 * c.y_cond / (3.0 + 2.0 * c.y);
    mass += prob[i];
  }
  const bool clip = mass > 1.0 + kClipTolerance;
  if (clip) {
    for (double& p : prob) p /= mass;
  }
  if (clipped) *clipped = clip;
  return prob;
}

ActivationResult activate_batch(std::span<const BatchCandidate> candidates, Rng& rng) {
  ActivationResult res;
  const auto prob = activation_probabilities(candidates, &res.clipped);
  res.mass = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].realized) res.mass += 3.0 * candidates[i].y_cond / (3.0 + 2.0 * candidates[i].y);
  }
  if (candidates.empty()) return res;
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (prob[i] <= 0.0) continue;
    acc += prob[i];
    if (u < acc) {
      res.active = candidates[i].edge;
      break;
    }
  }
  return res;
}

nlohmann::json VBOutput::to_json() const {
  nlohmann::json j;
  j["permutation"] = permutation;
  auto& log = j["activation_log"] = nlohmann::json::array();
  for (const auto& rec : activation_log) {
    nlohmann::json r;
    r["vertex"] = rec.vertex;
    r["partner"] = rec.partner ? nlohmann::json(*rec.partner) : nlohmann::json(nullptr);
    r["edge"] = rec.edge ? nlohmann::json(*rec.edge) : nlohmann::json(nullptr);
    r["accepted"] = rec.accepted;
    log.push_back(r);
  }
  j["m_c"] = std::vector<EdgeId>(m_c.edges().begin(), m_c.edges().end());
  std::vector<VertexId> a;
  for (VertexId v = 0; v < alive.size(); ++v) {
    if (alive[v]) a.push_back(v);
  }
  j["alive"] = a;
  j["clip_events"] = clip_events;
  return j;
}

VBOutput run_vb_with_order(const GraphView& crucial, const MatchingLaw& law,
                           std::span<const VertexId> order, Rng& rng, const Realization* given) {
  const StochasticGraph& g = crucial.graph();
  const std::size_t n = g.num_vertices();
  if (order.size() != n) throw Error("arrival order must list every vertex");
  VBOutput out;
  out.permutation.assign(order.begin(), order.end());
  out.active_edges = EdgeSet(g.num_edges());
  out.revealed_realized = EdgeSet(g.num_edges());
  std::vector<std::size_t> pos(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (order[k] >= n || pos[order[k]] != n) throw Error("arrival order is not a permutation");
    pos[order[k]] = k;
  }
  std::vector<bool> matched(n, false);
  std::vector<bool> killed(n, false);
  std::vector<EdgeId> m_c;
  std::vector<EdgeId> batch;
  std::vector<BatchCandidate> cands;
  for (std::size_t k = 0; k < n; ++k) {
    const VertexId v = order[k];
    batch.clear();
    for (EdgeId e : g.incident(v)) {
      if (crucial.contains(e) && pos[g.edge(e).other(v)] < k) batch.push_back(e);
    }
    std::sort(batch.begin(), batch.end());
    ActivationRecord rec;
    rec.vertex = v;
    if (!batch.empty()) {
      if (batch.size() > kMaxBatch) throw Error("batch too large");
      std::uint64_t realized = 0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const bool hit = given ? given->contains(batch[i]) : rng.bernoulli(g.edge(batch[i]).p);
        if (hit) {
          realized |= std::uint64_t{1} << i;
          out.revealed_realized.set(batch[i]);
        }
      }
      if (realized != 0) {
        const std::vector<double> cond = law.conditional(batch, realized);
        cands.clear();
        for (std::size_t i = 0; i < batch.size(); ++i) {
          cands.push_back({batch[i], law.y(batch[i]), cond[i], (realized >> i & 1U) != 0});
        }
        const ActivationResult act = activate_batch(cands, rng);
        if (act.clipped) ++out.clip_events;
        if (act.active) {
          const EdgeId e = *act.active;
          const VertexId u = g.edge(e).other(v);
          rec.partner = u;
          rec.edge = e;
          out.active_edges.set(e);
          killed[v] = killed[u] = true;
          if (!matched[u] && !matched[v]) {
            matched[u] = matched[v] = true;
            m_c.push_back(e);
            rec.accepted = true;
          }
        }
      }
    }
    out.activation_log.push_back(rec);
  }
  out.m_c = Matching(g, std::move(m_c));
  out.alive.resize(n);
  for (VertexId v = 0; v < n; ++v) out.alive[v] = !killed[v];
  return out;
}

VBOutput run_vb(const GraphView& crucial, const MatchingLaw& law, Rng& rng,
                const Realization* given) {
  std::vector<VertexId> order(crucial.graph().num_vertices());
  std::iota(order.begin(), order.end(), VertexId{0});
  rng.shuffle(order);
  return run_vb_with_order(crucial, law, order, rng, given);
}

namespace {

struct ExactWalker {
  const StochasticGraph& g;
  const GraphView& crucial;
  const MatchingLaw& law;
  std::vector<std::size_t> pos;
  std::vector<VertexId> order;
  std::vector<bool> matched;
  std::vector<bool> killed;
  std::vector<EdgeId> active;
  std::vector<EdgeId> selected;
  VBExact& acc;

  void leaf(double w) {
    for (EdgeId e : active) acc.p_active[e] += w;
    for (EdgeId e : selected) acc.p_selected[e] += w;
    const std::size_t n = g.num_vertices();
    for (VertexId v = 0; v < n; ++v) {
      if (!killed[v]) acc.p_alive[v] += w;
      for (VertexId u = v + 1; u < n; ++u) {
        if (!killed[v] && !killed[u]) acc.pair_alive[{v, u}] += w;
      }
    }
  }

  void step(std::size_t k, double w) {
    if (w == 0.0) return;
    if (k == order.size()) {
      leaf(w);
      return;
    }
    const VertexId v = order[k];
    std::vector<EdgeId> batch;
    for (EdgeId e : g.incident(v)) {
      if (crucial.contains(e) && pos[g.edge(e).other(v)] < k) batch.push_back(e);
    }
    std::sort(batch.begin(), batch.end());
    const std::uint64_t patterns = std::uint64_t{1} << batch.size();
    for (std::uint64_t realized = 0; realized < patterns; ++realized) {
      double pr = 1.0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const double p = g.edge(batch[i]).p;
        pr *= (realized >> i & 1U) ? p : 1.0 - p;
      }
      if (pr == 0.0) continue;
      if (realized == 0) {
        step(k + 1, w * pr);
        continue;
      }
      const auto cond = law.conditional(batch, realized);
      std::vector<BatchCandidate> cands;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        cands.push_back({batch[i], law.y(batch[i]), cond[i], (realized >> i & 1U) != 0});
      }
      const auto prob = activation_probabilities(cands);
      double none = 1.0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        if (prob[i] <= 0.0) continue;
        none -= prob[i];
        const EdgeId e = batch[i];
        const VertexId u = g.edge(e).other(v);
        const bool was_ku = killed[u];
        const bool was_kv = killed[v];
        killed[u] = killed[v] = true;
        active.push_back(e);
        const bool accept = !matched[u] && !matched[v];
        if (accept) {
          matched[u] = matched[v] = true;
          selected.push_back(e);
        }
        step(k + 1, w * pr * prob[i]);
        if (accept) {
          matched[u] = matched[v] = false;
          selected.pop_back();
        }
        active.pop_back();
        killed[u] = was_ku;
        killed[v] = was_kv;
      }
      if (none > 1e-15) step(k + 1, w * pr * none);
    }
  }
};

}  // namespace

VBExact exact_vb_enumeration(const GraphView& crucial, const MatchingLaw& law,
                             std::optional<std::vector<VertexId>> order) {
  const StochasticGraph& g = crucial.graph();
  const std::size_t n = g.num_vertices();
  if (n > kExactVbMaxVertices || crucial.num_edges() > kExactVbMaxEdges) {
    throw Error("exact_vb_enumeration: instance too large");
  }
  VBExact acc;
  acc.p_active.assign(g.num_edges(), 0.0);
  acc.p_selected.assign(g.num_edges(), 0.0);
  acc.p_alive.assign(n, 0.0);
  for (VertexId v = 0; v < n; ++v) {
    for (VertexId u = v + 1; u < n; ++u) acc.pair_alive[{v, u}] = 0.0;
  }
  std::vector<std::vector<VertexId>> orders;
  if (order) {
    orders.push_back(*order);
  } else {
    std::vector<VertexId> o(n);
    std::iota(o.begin(), o.end(), VertexId{0});
    do {
      orders.push_back(o);
    } while (std::next_permutation(o.begin(), o.end()));
  }
  const double w = 1.0 / static_cast<double>(orders.size());
  for (const auto& o : orders) {
    if (o.size() != n) throw Error("arrival order must list every vertex");
    ExactWalker walker{g, crucial, law, std::vector<std::size_t>(n), o,
                       std::vector<bool>(n, false), std::vector<bool>(n, false), {}, {}, acc};
    for (std::size_t k = 0; k < n; ++k) walker.pos[o[k]] = k;
    walker.step(0, w);
  }
  return acc;
}

}  // namespace stochmatch
