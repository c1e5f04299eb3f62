#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "stochmatch/estimator.hpp"
#include "stochmatch/mwm.hpp"

namespace stochmatch {

// The law of M_O as seen by the activation process: marginals y_e and the
// conditionals y'_e given the states of one arrival batch.
class MatchingLaw {
 public:
  virtual ~MatchingLaw() = default;

  virtual double y(EdgeId e) const = 0;
  // y' for each batch edge; bit i of `realized` is the state of batch[i].
  // Entries for unrealized edges are 0. `batch` is sorted.
  virtual std::vector<double> conditional(std::span<const EdgeId> batch,
                                          std::uint64_t realized) const = 0;
  virtual std::string name() const = 0;
};

inline constexpr std::size_t kMaxBatch = 64;

// y'_e = y_e / p_e on realization, independently per edge. This is the exact
// conditional of any law in which e's membership depends only on e's own
// state; used for gadgets with prescribed y.
class FixedMarginalLaw final : public MatchingLaw {
 public:
  FixedMarginalLaw(const StochasticGraph& g, std::vector<double> y);

  double y(EdgeId e) const override { return y_[e]; }
  std::vector<double> conditional(std::span<const EdgeId> batch,
                                  std::uint64_t realized) const override;
  std::string name() const override { return "fixed"; }

 private:
  const StochasticGraph* g_;
  std::vector<double> y_;
};

// M_O = MM(realization) n crucial, computed over every realization of the
// parent graph. Exact marginals and conditionals; small graphs only.
class ExactMatchingLaw final : public MatchingLaw {
 public:
  static constexpr std::size_t kMaxEdges = 18;

  explicit ExactMatchingLaw(const GraphView& crucial);

  double y(EdgeId e) const override { return y_[e]; }
  std::vector<double> conditional(std::span<const EdgeId> batch,
                                  std::uint64_t realized) const override;
  std::string name() const override { return "exact"; }

 private:
  std::vector<double> y_;
  std::vector<double> prob_;                 // per realization
  std::vector<std::uint32_t> in_mo_;         // per realization, M_O as a bitmask
  mutable std::mutex mu_;
  mutable std::map<std::pair<std::vector<EdgeId>, std::uint64_t>, std::vector<double>> cache_;
};

// Marginals from a Monte Carlo table; conditionals by Monte Carlo with
// `trials_per_batch` redraws. Each distinct (batch, states) key is estimated
// once from a seed derived from the key, so results do not depend on the
// order in which workers ask.
class SampledMatchingLaw final : public MatchingLaw {
 public:
  SampledMatchingLaw(const GraphView& crucial, std::vector<ProbEstimate> y_hat,
                     std::uint64_t trials_per_batch, std::uint64_t seed);

  double y(EdgeId e) const override { return y_hat_[e].value; }
  std::vector<double> conditional(std::span<const EdgeId> batch,
                                  std::uint64_t realized) const override;
  std::string name() const override { return "sampled"; }

  std::size_t cached_keys() const;

 private:
  GraphView crucial_;
  std::vector<ProbEstimate> y_hat_;
  std::uint64_t trials_;
  std::uint64_t seed_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<std::vector<EdgeId>, std::uint64_t>, std::vector<double>> cache_;
};

}  // namespace stochmatch
