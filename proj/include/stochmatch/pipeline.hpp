#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "stochmatch/augmenter.hpp"
#include "stochmatch/estimator.hpp"
#include "stochmatch/matching_law.hpp"
#include "stochmatch/sparsifier.hpp"
#include "stochmatch/vb_matching.hpp"

namespace stochmatch {

enum class LawKind { kAuto, kExact, kSampled };

struct PipelineOptions {
  Params params;
  std::uint64_t x_trials = 20000;
  std::uint64_t y_trials = 20000;
  std::uint64_t cond_trials = 2000;
  std::uint64_t pair_trials = 20000;
  LawKind law = LawKind::kAuto;
  std::uint64_t seed = 0;
  int workers = 1;
};

// Everything that does not depend on t or on the run: x_hat, the crucial
// split, the law of M_O and the pair-alive table.
struct PipelineSetup {
  const StochasticGraph* graph = nullptr;
  EstimateTable estimates;  // q_hat is left empty here
  EdgeClasses classes;
  GraphView crucial;
  std::shared_ptr<const MatchingLaw> law;
};

PipelineSetup prepare_pipeline(const StochasticGraph& g, const PipelineOptions& opt);

// The g table for plans of t rounds (Pr[e in Q] = 1 - (1 - x_hat)^t), or for
// Q = E when `full` is set.
GTable g_table_for(const PipelineSetup& setup, std::uint64_t t, bool full);

struct RunDetail {
  Realization realization;
  QueryPlan plan;
  VBOutput vb;
  FractionalResult fractional;
  Matching m_n;
  Combined combined;
  double mm_q = 0.0;
  double mm_g = 0.0;
};

// One run. Run i owns the seed derive_seed(master, kRun, i); its realization,
// plan rounds and VB randomness are separate streams of that seed, so runs
// with the same index share the realization across t and plans nest in t.
RunDetail run_detailed(const PipelineSetup& setup, const GTable& table, const Params& params,
                       std::uint64_t t, bool full, std::uint64_t master_seed,
                       std::uint64_t run_index);

struct RunRecord {
  std::uint64_t run_index = 0;
  std::uint64_t seed = 0;
  double alg = 0.0;
  double mm_q = 0.0;
  double mm_g = 0.0;
  int scheme = 0;
  double fw = 0.0;            // f . w
  double round_weight = 0.0;  // weight of M_n
  double max_f = 0.0;
  double max_pre_degree = 0.0;
  bool degree_ok = true;
  bool rounding_checked = false;  // max f <= eps^3
  bool rounding_ok = true;
  std::size_t clip_events = 0;

  // {seed, ratio, scheme_chosen, weights:{alg, mm_Q, mm_G}} plus diagnostics.
  nlohmann::json to_json() const;
};

RunRecord summarize_run(const RunDetail& d, const StochasticGraph& g, const Params& params,
                        std::uint64_t run_index, std::uint64_t run_seed);

struct RunSummary {
  std::uint64_t t = 0;
  bool full = false;
  std::uint64_t trials = 0;
  double mean_alg = 0.0;
  double mean_mm_q = 0.0;
  double mean_mm_g = 0.0;
  double ratio = 0.0;  // mean mm_Q / mean mm_G
  double ratio_se = 0.0;
  double alg_ratio = 0.0;  // mean alg / mean mm_G
  double alg_ratio_se = 0.0;
  std::size_t scheme_mixed = 0;
  std::size_t degree_violations = 0;
  std::size_t rounding_checked = 0;
  std::size_t rounding_violations = 0;
  std::size_t clip_events = 0;
};

struct EndToEnd {
  std::vector<RunRecord> runs;
  RunSummary summary;
};

EndToEnd end_to_end(const PipelineSetup& setup, const Params& params, std::uint64_t t, bool full,
                    std::uint64_t trials, std::uint64_t seed, int workers = 1);

// Ratio of means with a delta-method standard error (paired samples).
struct RatioEstimate {
  double value = 0.0;
  double std_err = 0.0;
};
RatioEstimate ratio_of_means(std::span<const double> num, std::span<const double> den);

}  // namespace stochmatch
