#include "stochmatch/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "stochmatch/parallel.hpp"

namespace stochmatch {

PipelineSetup prepare_pipeline(const StochasticGraph& g, const PipelineOptions& opt) {
  PipelineSetup s;
  s.graph = &g;
  s.estimates.x_hat = estimate_x(g, opt.x_trials, opt.seed, opt.workers);
  s.classes = classify_edges(s.estimates.x_hat, opt.params.tau);
  s.crucial = GraphView(g, s.classes.crucial);

  const bool exact = opt.law == LawKind::kExact ||
                     (opt.law == LawKind::kAuto && g.num_edges() <= 16);
  if (exact) {
    auto law = std::make_shared<ExactMatchingLaw>(s.crucial);
    for (EdgeId e = 0; e < g.num_edges(); ++e) s.estimates.y_hat.push_back(ProbEstimate::exact(law->y(e)));
    s.law = std::move(law);
  } else {
    s.estimates.y_hat = estimate_y(s.crucial, opt.y_trials, opt.seed, opt.workers);
    s.law = std::make_shared<SampledMatchingLaw>(s.crucial, s.estimates.y_hat, opt.cond_trials,
                                                 opt.seed);
  }

  std::vector<VertexPair> pairs;
  for (EdgeId e : s.classes.noncrucial.indices()) {
    pairs.push_back(make_pair_key(g.edge(e).u, g.edge(e).v));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  if (!pairs.empty()) {
    const auto alive = estimate_pair_alive(s.crucial, *s.law, pairs, opt.pair_trials, opt.seed,
                                           opt.workers);
    for (std::size_t k = 0; k < pairs.size(); ++k) s.estimates.pair_alive[pairs[k]] = alive[k];
  }
  return s;
}

GTable g_table_for(const PipelineSetup& setup, std::uint64_t t, bool full) {
  const StochasticGraph& g = *setup.graph;
  std::vector<ProbEstimate> q;
  if (full) {
    q.assign(g.num_edges(), ProbEstimate::exact(1.0));
  } else {
    q = q_from_x(setup.estimates.x_hat, t);
  }
  return build_g_table(g, setup.classes, setup.estimates.x_hat, q, setup.estimates.pair_alive);
}

RunDetail run_detailed(const PipelineSetup& setup, const GTable& table, const Params& params,
                       std::uint64_t t, bool full, std::uint64_t master_seed,
                       std::uint64_t run_index) {
  const StochasticGraph& g = *setup.graph;
  const std::uint64_t run_seed = derive_seed(master_seed, streams::kRun, run_index);
  RunDetail d;
  Rng real_rng = Rng::stream(run_seed, streams::kRealization);
  d.realization = sample_realization(g, real_rng);
  d.plan = full ? full_query_plan(g) : build_query_plan(g, t, run_seed);
  Rng vb_rng = Rng::stream(run_seed, streams::kVb);
  d.vb = run_vb(setup.crucial, *setup.law, vb_rng, &d.realization);
  d.fractional = build_fractional(g, setup.classes, d.plan, d.realization, d.vb, table, params.gamma);
  d.m_n = round_fractional(g, d.fractional.f);
  d.combined = combine(g, d.plan, d.realization, d.vb, d.m_n, setup.classes);
  d.mm_g = weight_of(max_weight_matching(GraphView(g, d.realization)), g);
  d.mm_q = weight_of(max_weight_matching(GraphView(g, d.realization.bits() & d.plan.edges)), g);
  return d;
}

RunRecord summarize_run(const RunDetail& d, const StochasticGraph& g, const Params& params,
                        std::uint64_t run_index, std::uint64_t run_seed) {
  RunRecord r;
  r.run_index = run_index;
  r.seed = run_seed;
  r.alg = weight_of(d.combined.matching, g);
  r.mm_q = d.mm_q;
  r.mm_g = d.mm_g;
  r.scheme = d.combined.scheme;
  r.fw = d.fractional.f.dot(g);
  r.round_weight = weight_of(d.m_n, g);
  r.max_f = d.fractional.f.max_value();
  r.max_pre_degree = d.fractional.max_pre_degree;
  r.degree_ok = is_valid_fractional(d.fractional.f, g, 1e-12);
  const double eps = params.epsilon;
  r.rounding_checked = r.max_f <= eps * eps * eps;
  r.rounding_ok = !r.rounding_checked || r.round_weight >= (1.0 - eps / 2.0) * r.fw - 1e-12;
  r.clip_events = d.vb.clip_events;
  return r;
}

nlohmann::json RunRecord::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["run"] = run_index;
  j["ratio"] = mm_g > 0.0 ? nlohmann::json(mm_q / mm_g) : nlohmann::json(nullptr);
  j["scheme_chosen"] = scheme == 0 ? "crucial" : "mixed";
  j["weights"] = {{"alg", alg}, {"mm_Q", mm_q}, {"mm_G", mm_g}};
  j["fractional"] = {{"f_dot_w", fw},
                     {"rounded", round_weight},
                     {"max_f", max_f},
                     {"max_pre_degree", max_pre_degree},
                     {"degree_ok", degree_ok},
                     {"rounding_checked", rounding_checked},
                     {"rounding_ok", rounding_ok}};
  j["clip_events"] = clip_events;
  return j;
}

RatioEstimate ratio_of_means(std::span<const double> num, std::span<const double> den) {
  RatioEstimate out;
  const std::size_t n = num.size();
  if (n == 0 || den.size() != n) return out;
  double sn = 0.0;
  double sd = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sn += num[i];
    sd += den[i];
  }
  if (sd <= 0.0) return out;
  const double r = sn / sd;
  const double mean_d = sd / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = num[i] - r * den[i];
    ss += z * z;
  }
  out.value = r;
  if (n > 1) {
    const double var = ss / static_cast<double>(n - 1);
    out.std_err = std::sqrt(var / static_cast<double>(n)) / mean_d;
  }
  return out;
}

EndToEnd end_to_end(const PipelineSetup& setup, const Params& params, std::uint64_t t, bool full,
                    std::uint64_t trials, std::uint64_t seed, int workers) {
  if (trials == 0) throw Error("trial budget must be >= 1");
  const StochasticGraph& g = *setup.graph;
  const GTable table = g_table_for(setup, t, full);
  EndToEnd out;
  out.runs.resize(trials);
  parallel_for(trials, workers, [&](std::size_t i) {
    const RunDetail d = run_detailed(setup, table, params, t, full, seed, i);
    out.runs[i] = summarize_run(d, g, params, i, derive_seed(seed, streams::kRun, i));
  });
  RunSummary& s = out.summary;
  s.t = full ? 0 : t;
  s.full = full;
  s.trials = trials;
  std::vector<double> alg, mmq, mmg;
  for (const RunRecord& r : out.runs) {
    alg.push_back(r.alg);
    mmq.push_back(r.mm_q);
    mmg.push_back(r.mm_g);
    s.scheme_mixed += r.scheme == 1;
    s.degree_violations += !r.degree_ok;
    s.rounding_checked += r.rounding_checked;
    s.rounding_violations += !r.rounding_ok;
    s.clip_events += r.clip_events;
  }
  const double n = static_cast<double>(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    s.mean_alg += alg[i];
    s.mean_mm_q += mmq[i];
    s.mean_mm_g += mmg[i];
  }
  s.mean_alg /= n;
  s.mean_mm_q /= n;
  s.mean_mm_g /= n;
  const auto rq = ratio_of_means(mmq, mmg);
  const auto ra = ratio_of_means(alg, mmg);
  s.ratio = rq.value;
  s.ratio_se = rq.std_err;
  s.alg_ratio = ra.value;
  s.alg_ratio_se = ra.std_err;
  return out;
}

}  // namespace stochmatch
