#include "stochmatch/estimator.hpp"

#include <cmath>
#include <ostream>

#include "stochmatch/graph_io.hpp"
#include "stochmatch/matching_law.hpp"
#include "stochmatch/parallel.hpp"
#include "stochmatch/sparsifier.hpp"
#include "stochmatch/vb_matching.hpp"

namespace stochmatch {

ProbEstimate ProbEstimate::from_count(std::uint64_t hits, std::uint64_t trials) {
  if (trials == 0) throw Error("estimate needs at least one trial");
  ProbEstimate out;
  out.trials = trials;
  out.value = static_cast<double>(hits) / static_cast<double>(trials);
  out.std_err = std::sqrt(out.value * (1.0 - out.value) / static_cast<double>(trials));
  return out;
}

ProbEstimate ProbEstimate::exact(double value) {
  ProbEstimate out;
  out.value = value;
  return out;
}

void EstimateTable::write_csv(std::ostream& os, const StochasticGraph& g) const {
  os << "edge_id,u,v,x_hat,x_se,y_hat,y_se,q_hat,q_se\n";
  auto cell = [](const std::vector<ProbEstimate>& v, EdgeId e) {
    if (e >= v.size()) return std::string(",");
    return format_double(v[e].value) + "," + format_double(v[e].std_err);
  };
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    os << e << ',' << g.edge(e).u << ',' << g.edge(e).v << ',' << cell(x_hat, e) << ','
       << cell(y_hat, e) << ',' << cell(q_hat, e) << '\n';
  }
}

namespace {

using Counts = std::vector<std::uint64_t>;

void add_counts(Counts& into, const Counts& from) {
  for (std::size_t i = 0; i < into.size(); ++i) into[i] += from[i];
}

std::vector<ProbEstimate> to_estimates(const Counts& c, std::uint64_t trials) {
  std::vector<ProbEstimate> out;
  out.reserve(c.size());
  for (auto h : c) out.push_back(ProbEstimate::from_count(h, trials));
  return out;
}

void x_trial(const StochasticGraph& g, std::uint64_t seed, std::size_t i, Counts& acc) {
  Rng rng = Rng::stream(seed, streams::kEstimateX, i);
  const Realization r = sample_realization(g, rng);
  const Matching m = max_weight_matching(GraphView(g, r));
  for (EdgeId e : m.edges()) ++acc[e];
}

}  // namespace

std::vector<ProbEstimate> estimate_x(const StochasticGraph& g, std::uint64_t trials,
                                     std::uint64_t seed, int workers) {
  const Counts c = parallel_reduce(
      trials, workers, Counts(g.num_edges(), 0),
      [&](std::size_t i, Counts& acc) { x_trial(g, seed, i, acc); }, add_counts);
  return to_estimates(c, trials);
}

std::vector<ProbEstimate> estimate_x_serial(const StochasticGraph& g, std::uint64_t trials,
                                            std::uint64_t seed) {
  const Counts c = serial_reduce(trials, Counts(g.num_edges(), 0),
                                 [&](std::size_t i, Counts& acc) { x_trial(g, seed, i, acc); });
  return to_estimates(c, trials);
}

std::vector<ProbEstimate> estimate_y(const GraphView& crucial, std::uint64_t trials,
                                     std::uint64_t seed, int workers) {
  const StochasticGraph& g = crucial.graph();
  const Counts c = parallel_reduce(
      trials, workers, Counts(g.num_edges(), 0),
      [&](std::size_t i, Counts& acc) {
        Rng rng = Rng::stream(seed, streams::kEstimateY, i);
        const Realization r = sample_realization(g, rng);
        const Matching m = max_weight_matching(GraphView(g, r));
        for (EdgeId e : m.edges()) {
          if (crucial.contains(e)) ++acc[e];
        }
      },
      add_counts);
  return to_estimates(c, trials);
}

std::vector<ProbEstimate> estimate_q(const StochasticGraph& g, std::uint64_t t,
                                     std::uint64_t trials, std::uint64_t seed, int workers) {
  const Counts c = parallel_reduce(
      trials, workers, Counts(g.num_edges(), 0),
      [&](std::size_t i, Counts& acc) {
        const QueryPlan plan = build_query_plan(g, t, derive_seed(seed, streams::kEstimateQ, i));
        for (EdgeId e : plan.edges.indices()) ++acc[e];
      },
      add_counts);
  return to_estimates(c, trials);
}

std::vector<ProbEstimate> q_from_x(std::span<const ProbEstimate> x_hat, std::uint64_t t) {
  std::vector<ProbEstimate> out;
  out.reserve(x_hat.size());
  const double td = static_cast<double>(t);
  for (const ProbEstimate& x : x_hat) {
    ProbEstimate q;
    q.trials = x.trials;
    q.value = 1.0 - std::pow(1.0 - x.value, td);
    // d/dx [1 - (1-x)^t] = t (1-x)^(t-1)
    q.std_err = td * std::pow(1.0 - x.value, td - 1.0) * x.std_err;
    out.push_back(q);
  }
  return out;
}

std::vector<ProbEstimate> estimate_batch_conditional(const GraphView& crucial,
                                                     std::span<const EdgeId> batch,
                                                     std::uint64_t realized,
                                                     std::uint64_t trials, Rng& rng) {
  if (batch.size() > 64) throw Error("batch larger than 64 edges");
  if (trials == 0) throw Error("estimate needs at least one trial");
  const StochasticGraph& g = crucial.graph();
  std::vector<std::uint64_t> hits(batch.size(), 0);
  bool any_realized = false;
  for (std::size_t i = 0; i < batch.size(); ++i) any_realized |= (realized >> i & 1U) != 0;
  if (any_realized) {
    EdgeSet frozen_mask(g.num_edges());
    for (EdgeId e : batch) frozen_mask.set(e);
    const EdgeSet free_mask = frozen_mask.complement();
    for (std::uint64_t k = 0; k < trials; ++k) {
      Realization r = sample_realization(g, free_mask, rng);
      EdgeSet bits = r.bits();
      for (std::size_t i = 0; i < batch.size(); ++i) bits.set(batch[i], (realized >> i & 1U) != 0);
      const Matching m = max_weight_matching(GraphView(g, bits));
      for (std::size_t i = 0; i < batch.size(); ++i) {
        if ((realized >> i & 1U) && crucial.contains(batch[i]) && m.contains(batch[i])) ++hits[i];
      }
    }
  }
  std::vector<ProbEstimate> out;
  for (std::size_t i = 0; i < batch.size(); ++i) out.push_back(ProbEstimate::from_count(hits[i], trials));
  return out;
}

ProbEstimate estimate_y_conditional(const GraphView& crucial, EdgeId e,
                                    std::span<const EdgeId> batch, std::uint64_t realized,
                                    std::uint64_t trials, Rng& rng) {
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i] != e) continue;
    if (!(realized >> i & 1U)) throw Error("conditional requested for an unrealized edge");
    return estimate_batch_conditional(crucial, batch, realized, trials, rng)[i];
  }
  throw Error("conditional requested for an edge outside the batch");
}

std::vector<PairAlive> estimate_pair_alive(const GraphView& crucial, const MatchingLaw& law,
                                           std::span<const VertexPair> pairs,
                                           std::uint64_t trials, std::uint64_t seed,
                                           int workers) {
  const StochasticGraph& g = crucial.graph();
  const Counts c = parallel_reduce(
      trials, workers, Counts(pairs.size(), 0),
      [&](std::size_t i, Counts& acc) {
        Rng rng = Rng::stream(seed, streams::kPairAlive, i);
        const VBOutput out = run_vb(crucial, law, rng);
        for (std::size_t k = 0; k < pairs.size(); ++k) {
          if (out.alive[pairs[k].first] && out.alive[pairs[k].second]) ++acc[k];
        }
      },
      add_counts);
  std::vector<PairAlive> result;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    PairAlive pa;
    pa.estimate = ProbEstimate::from_count(c[k], trials);
    const auto e = g.find_edge(pairs[k].first, pairs[k].second);
    pa.adjacent = e && crucial.contains(*e);
    result.push_back(pa);
  }
  return result;
}

}  // namespace stochmatch
