#include "stochmatch/matching_law.hpp"

#include <algorithm>

namespace stochmatch {

FixedMarginalLaw::FixedMarginalLaw(const StochasticGraph& g, std::vector<double> y)
    : g_(&g), y_(std::move(y)) {
  if (y_.size() != g.num_edges()) throw Error("fixed law needs one y per edge");
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (!(y_[e] >= 0.0 && y_[e] <= g.edge(e).p + 1e-12)) {
      throw Error("fixed law needs 0 <= y_e <= p_e");
    }
  }
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    double s = 0.0;
    for (EdgeId e : g.incident(v)) s += y_[e];
    if (s > 1.0 + 1e-12) throw Error("fixed law marginals are not a fractional matching");
  }
}

std::vector<double> FixedMarginalLaw::conditional(std::span<const EdgeId> batch,
                                                  std::uint64_t realized) const {
  std::vector<double> out(batch.size(), 0.0);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (realized >> i & 1U) out[i] = std::min(1.0, y_[batch[i]] / g_->edge(batch[i]).p);
  }
  return out;
}

ExactMatchingLaw::ExactMatchingLaw(const GraphView& crucial) {
  const StochasticGraph& g = crucial.graph();
  const std::size_t m = g.num_edges();
  if (m > kMaxEdges) throw Error("exact matching law: too many edges");
  const std::size_t total = std::size_t{1} << m;
  prob_.resize(total);
  in_mo_.resize(total);
  y_.assign(m, 0.0);
  for (std::size_t r = 0; r < total; ++r) {
    double pr = 1.0;
    EdgeSet bits(m);
    for (EdgeId e = 0; e < m; ++e) {
      if (r >> e & 1U) {
        pr *= g.edge(e).p;
        bits.set(e);
      } else {
        pr *= 1.0 - g.edge(e).p;
      }
    }
    std::uint32_t mo = 0;
    if (pr > 0.0) {
      const Matching m = max_weight_matching(GraphView(g, bits));
      for (EdgeId e : m.edges()) {
        if (crucial.contains(e)) mo |= 1U << e;
      }
    }
    prob_[r] = pr;
    in_mo_[r] = mo;
    for (EdgeId e = 0; e < m; ++e) {
      if (mo >> e & 1U) y_[e] += pr;
    }
  }
}

std::vector<double> ExactMatchingLaw::conditional(std::span<const EdgeId> batch,
                                                  std::uint64_t realized) const {
  if (batch.size() > kMaxBatch) throw Error("batch too large");
  const auto key = std::make_pair(std::vector<EdgeId>(batch.begin(), batch.end()), realized);
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  std::uint32_t mask = 0;
  std::uint32_t want = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    mask |= 1U << batch[i];
    if (realized >> i & 1U) want |= 1U << batch[i];
  }
  double denom = 0.0;
  std::vector<double> num(batch.size(), 0.0);
  for (std::size_t r = 0; r < prob_.size(); ++r) {
    if ((static_cast<std::uint32_t>(r) & mask) != want) continue;
    denom += prob_[r];
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (in_mo_[r] >> batch[i] & 1U) num[i] += prob_[r];
    }
  }
  std::vector<double> out(batch.size(), 0.0);
  if (denom > 0.0) {
    for (std::size_t i = 0; i < batch.size(); ++i) out[i] = std::min(1.0, num[i] / denom);
  }
  std::lock_guard<std::mutex> lock(mu_);
  cache_.emplace(key, out);
  return out;
}

SampledMatchingLaw::SampledMatchingLaw(const GraphView& crucial, std::vector<ProbEstimate> y_hat,
                                       std::uint64_t trials_per_batch, std::uint64_t seed)
    : crucial_(crucial), y_hat_(std::move(y_hat)), trials_(trials_per_batch), seed_(seed) {
  if (y_hat_.size() != crucial.graph().num_edges()) throw Error("y table size mismatch");
  if (trials_ == 0) throw Error("conditional budget must be >= 1");
}

std::vector<double> SampledMatchingLaw::conditional(std::span<const EdgeId> batch,
                                                    std::uint64_t realized) const {
  if (batch.size() > kMaxBatch) throw Error("batch too large");
  auto key = std::make_pair(std::vector<EdgeId>(batch.begin(), batch.end()), realized);
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  std::uint64_t h = mix64(realized);
  for (EdgeId e : batch) h = mix64(h ^ e);
  Rng rng = Rng::stream(seed_, streams::kConditional, h);
  std::vector<double> out;
  for (const auto& est : estimate_batch_conditional(crucial_, batch, realized, trials_, rng)) {
    out.push_back(est.value);
  }
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.emplace(std::move(key), std::move(out)).first->second;
}

std::size_t SampledMatchingLaw::cached_keys() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.size();
}

}  // namespace stochmatch
