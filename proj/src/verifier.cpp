#include "stochmatch/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "stochmatch/graph_io.hpp"
#include "stochmatch/parallel.hpp"

namespace stochmatch {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

namespace {

const char* cmp_symbol(Comparison c) {
  switch (c) {
    case Comparison::kAtLeast:
      return ">=";
    case Comparison::kAtMost:
      return "<=";
    case Comparison::kWithin:
      return "~=";
  }
  return "?";
}

std::uint64_t check_seed(std::uint64_t seed, std::string_view name) {
  return derive_seed(seed, streams::kCheck, fnv1a(name));
}

double binomial_se(double p, std::uint64_t n) {
  return n == 0 ? 0.0 : std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

using Counts = std::vector<std::uint64_t>;

void add_counts(Counts& into, const Counts& from) {
  for (std::size_t i = 0; i < into.size(); ++i) into[i] += from[i];
}

struct Moments {
  std::vector<double> sum;
  std::vector<double> sumsq;
  explicit Moments(std::size_t k = 0) : sum(k, 0.0), sumsq(k, 0.0) {}
  void add(std::size_t i, double v) {
    sum[i] += v;
    sumsq[i] += v * v;
  }
  void merge(const Moments& o) {
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += o.sum[i];
      sumsq[i] += o.sumsq[i];
    }
  }
  double mean(std::size_t i, std::uint64_t n) const { return sum[i] / static_cast<double>(n); }
  double var(std::size_t i, std::uint64_t n) const {
    if (n < 2) return 0.0;
    const double m = mean(i, n);
    return std::max(0.0, (sumsq[i] - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
  }
};

std::string edge_label(const StochasticGraph& g, EdgeId e) {
  std::ostringstream os;
  os << "e" << e << "(" << g.edge(e).u << "," << g.edge(e).v << ")";
  return os.str();
}

std::string pair_label(VertexPair p) {
  std::ostringstream os;
  os << "{" << p.first << "," << p.second << "}";
  return os.str();
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

}  // namespace

// --------------------------------------------------------------- reporting

double CheckEntry::margin() const {
  const double allowed = kBand * std_err + tolerance;
  switch (cmp) {
    case Comparison::kAtLeast:
      return estimate - threshold + allowed;
    case Comparison::kAtMost:
      return threshold + allowed - estimate;
    case Comparison::kWithin:
      return allowed - std::abs(estimate - threshold);
  }
  return 0.0;
}

CheckEntry make_entry(std::string label, double estimate, double std_err, double threshold,
                      Comparison cmp, double tolerance) {
  CheckEntry e;
  e.label = std::move(label);
  e.estimate = estimate;
  e.std_err = std_err;
  e.threshold = threshold;
  e.cmp = cmp;
  e.tolerance = tolerance;
  e.ok = e.margin() >= 0.0;
  return e;
}

CheckReport finish_report(std::string name, std::string instance, std::vector<CheckEntry> entries,
                          std::uint64_t trials, bool gated, std::string note) {
  CheckReport r;
  r.name = std::move(name);
  r.instance = std::move(instance);
  r.trials = trials;
  r.gated = gated;
  r.note = std::move(note);
  r.verdict = Verdict::kPass;
  const CheckEntry* worst = nullptr;
  for (const CheckEntry& e : entries) {
    if (!e.ok) r.verdict = Verdict::kFail;
    if (!worst || e.margin() < worst->margin()) worst = &e;
  }
  if (worst) {
    r.cmp = worst->cmp;
    r.estimate = worst->estimate;
    r.std_err = worst->std_err;
    r.threshold = worst->threshold;
  }
  r.entries = std::move(entries);
  return r;
}

nlohmann::json CheckReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["instance"] = instance;
  j["comparison"] = cmp_symbol(cmp);
  j["estimate"] = estimate;
  j["std_err"] = std_err;
  j["threshold"] = threshold;
  j["verdict"] = to_string(verdict);
  j["trials"] = trials;
  j["gated"] = gated;
  if (!note.empty()) j["note"] = note;
  auto& arr = j["entries"] = nlohmann::json::array();
  for (const auto& e : entries) {
    arr.push_back({{"label", e.label},
                   {"estimate", e.estimate},
                   {"std_err", e.std_err},
                   {"threshold", e.threshold},
                   {"comparison", cmp_symbol(e.cmp)},
                   {"ok", e.ok}});
  }
  return j;
}

void print_table(std::ostream& os, const std::vector<CheckReport>& reports) {
  os << std::left << std::setw(38) << "check" << std::setw(24) << "instance" << std::setw(13)
     << "estimate" << std::setw(11) << "std_err" << std::setw(4) << "" << std::setw(13)
     << "threshold" << std::setw(14) << "verdict" << "gated\n";
  for (const auto& r : reports) {
    os << std::left << std::setw(38) << r.name << std::setw(24) << r.instance << std::setw(13)
       << fmt(r.estimate) << std::setw(11) << fmt(r.std_err) << std::setw(4) << cmp_symbol(r.cmp)
       << std::setw(13) << fmt(r.threshold) << std::setw(14) << to_string(r.verdict)
       << (r.gated ? "yes" : "no") << '\n';
    if (!r.note.empty()) os << "    note: " << r.note << '\n';
  }
}

nlohmann::json reports_to_json(const std::vector<CheckReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(r.to_json());
  return arr;
}

bool any_gated_failure(const std::vector<CheckReport>& reports) {
  return std::any_of(reports.begin(), reports.end(),
                     [](const CheckReport& r) { return r.gated && r.verdict == Verdict::kFail; });
}

// ----------------------------------------------------------------- gadgets

bool Gadget::enumerable() const {
  return graph->num_vertices() <= kExactVbMaxVertices && crucial.count() <= kExactVbMaxEdges;
}

Gadget make_gadget(std::string name, StochasticGraph g, std::optional<std::vector<double>> fixed_y) {
  Gadget gd;
  gd.name = std::move(name);
  gd.graph = std::make_shared<const StochasticGraph>(std::move(g));
  gd.crucial = EdgeSet(gd.graph->num_edges(), true);
  if (fixed_y) {
    gd.law = std::make_shared<FixedMarginalLaw>(*gd.graph, std::move(*fixed_y));
  } else {
    gd.law = std::make_shared<ExactMatchingLaw>(gd.view());
  }
  return gd;
}

std::vector<Gadget> bundled_gadgets() {
  std::vector<Gadget> out;
  out.push_back(make_gadget("edge-y1", StochasticGraph(2, {{0, 1, 1.0, 1.0}}), std::vector<double>{1.0}));
  out.push_back(make_gadget("edge-y0.5", StochasticGraph(2, {{0, 1, 1.0, 1.0}}), std::vector<double>{0.5}));
  out.push_back(make_gadget("path3-exact",
                            StochasticGraph(4, {{0, 1, 1.0, 0.6}, {1, 2, 1.5, 0.5}, {2, 3, 1.0, 0.7}}),
                            std::nullopt));
  out.push_back(make_gadget("path3-uniform",
                            StochasticGraph(4, {{0, 1, 1.0, 1.0}, {1, 2, 1.0, 1.0}, {2, 3, 1.0, 1.0}}),
                            std::vector<double>{0.4, 0.4, 0.4}));
  out.push_back(make_gadget("shared-neighbor",
                            StochasticGraph(3, {{0, 1, 1.0, 0.8}, {1, 2, 1.0, 0.6}}), std::nullopt));
  out.push_back(make_gadget(
      "cycle4-uniform",
      StochasticGraph(4, {{0, 1, 1.0, 1.0}, {1, 2, 1.0, 1.0}, {2, 3, 1.0, 1.0}, {3, 0, 1.0, 1.0}}),
      std::vector<double>{0.5, 0.5, 0.5, 0.5}));
  out.push_back(make_gadget("star3-exact",
                            StochasticGraph(4, {{0, 1, 1.0, 0.5}, {0, 2, 2.0, 0.6}, {0, 3, 3.0, 0.7}}),
                            std::nullopt));
  out.push_back(make_gadget(
      "triangle-pendant",
      StochasticGraph(4, {{0, 1, 1.0, 0.7}, {1, 2, 1.2, 0.6}, {0, 2, 0.8, 0.9}, {2, 3, 1.5, 0.5}}),
      std::nullopt));
  out.push_back(make_gadget("k4-minus-edge",
                            StochasticGraph(4, {{0, 1, 1.0, 0.5},
                                                {0, 2, 1.3, 0.6},
                                                {0, 3, 0.7, 0.8},
                                                {1, 2, 0.9, 0.7},
                                                {2, 3, 1.1, 0.4}}),
                            std::nullopt));
  out.push_back(make_gadget("isolated-pair", StochasticGraph(2, {}), std::vector<double>{}));
  return out;
}

StochasticGraph benchmark_graph() {
  return StochasticGraph(6, {{0, 1, 3.0, 0.5},
                             {1, 2, 2.0, 0.6},
                             {2, 3, 3.5, 0.4},
                             {3, 4, 1.5, 0.7},
                             {4, 5, 2.5, 0.5},
                             {5, 0, 1.0, 0.8},
                             {0, 3, 2.0, 0.3},
                             {1, 4, 1.2, 0.6}});
}

// ------------------------------------------------------------------ checks

CheckReport check_mwm_oracle(std::size_t instances, std::uint64_t seed) {
  const char* laws[] = {"uniform:0:1", "exp:1", "const:1", "uniform:1:3"};
  std::size_t agree = 0;
  std::size_t tested = 0;
  double worst = 0.0;
  for (std::size_t k = 0; tested < instances; ++k) {
    Rng pick = Rng::stream(seed, fnv1a("mwm-oracle"), k);
    const std::size_t n = 2 + pick.below(7);
    const double density = 0.2 + 0.8 * pick.uniform();
    const auto g = gen_random_graph(n, density, Law::parse(laws[k % 4]),
                                    Law::parse("uniform:0.2:1"), derive_seed(seed, k));
    EdgeSet mask(g.num_edges(), true);
    while (mask.count() > kBruteForceMaxEdges) {
      const auto idx = mask.indices();
      mask.set(idx[pick.below(idx.size())], false);
    }
    const GraphView view(g, mask);
    const double a = weight_of(max_weight_matching(view), g);
    const double b = weight_of(brute_force_mwm(view), g);
    worst = std::max(worst, std::abs(a - b));
    agree += std::abs(a - b) <= 1e-9;
    ++tested;
  }
  std::vector<CheckEntry> entries;
  entries.push_back(make_entry("agreeing fraction", static_cast<double>(agree) / static_cast<double>(tested),
                               0.0, 1.0, Comparison::kAtLeast));
  return finish_report("mwm_oracle_equivalence", "random<=8 vertices", std::move(entries), tested,
                       true, "largest weight gap " + fmt(worst));
}

namespace {

Counts vb_counts(const Gadget& gd, std::uint64_t trials, std::uint64_t seed,
                 const std::function<void(const VBOutput&, Counts&)>& tally, std::size_t width) {
  const GraphView view = gd.view();
  return parallel_reduce(
      trials, 1, Counts(width, 0),
      [&](std::size_t i, Counts& acc) {
        Rng rng = Rng::stream(seed, streams::kVb, i);
        tally(run_vb(view, *gd.law, rng), acc);
      },
      add_counts);
}

}  // namespace

CheckReport check_activation(const Gadget& gd, std::uint64_t trials, std::uint64_t seed) {
  const StochasticGraph& g = *gd.graph;
  const auto ids = gd.crucial.indices();
  const Counts c = vb_counts(
      gd, trials, check_seed(seed, "activation/" + gd.name),
      [&](const VBOutput& out, Counts& acc) {
        for (std::size_t k = 0; k < ids.size(); ++k) acc[k] += out.active_edges.test(ids[k]);
      },
      ids.size());
  std::vector<CheckEntry> entries;
  std::optional<VBExact> exact;
  if (gd.enumerable()) exact = exact_vb_enumeration(gd.view(), *gd.law);
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const EdgeId e = ids[k];
    const double freq = static_cast<double>(c[k]) / static_cast<double>(trials);
    const double target = attenuation_g(gd.law->y(e));
    entries.push_back(make_entry(edge_label(g, e) + " vs g(y)", freq, binomial_se(target, trials),
                                 target, Comparison::kWithin, 1e-12));
    if (exact) {
      const double pe = exact->p_active[e];
      entries.push_back(make_entry(edge_label(g, e) + " vs enumeration", freq,
                                   binomial_se(pe, trials), pe, Comparison::kWithin, 1e-12));
    }
  }
  if (exact) {
    // Every fixed arrival order, exactly.
    std::vector<VertexId> order(g.num_vertices());
    std::iota(order.begin(), order.end(), VertexId{0});
    double worst = 0.0;
    do {
      const auto ex = exact_vb_enumeration(gd.view(), *gd.law, order);
      for (EdgeId e : ids) {
        worst = std::max(worst, std::abs(ex.p_active[e] - attenuation_g(gd.law->y(e))));
      }
    } while (std::next_permutation(order.begin(), order.end()));
    entries.push_back(make_entry("max |Pr[active]-g(y)| over fixed orders", worst, 0.0, 0.0,
                                 Comparison::kAtMost, 1e-9));
  }
  return finish_report("activation_law", gd.name, std::move(entries), trials);
}

CheckReport check_pair_alive(const Gadget& gd, std::uint64_t trials, std::uint64_t seed) {
  const StochasticGraph& g = *gd.graph;
  const std::size_t n = g.num_vertices();
  std::vector<VertexPair> pairs;
  for (VertexId a = 0; a < n; ++a) {
    for (VertexId b = a + 1; b < n; ++b) pairs.push_back({a, b});
  }
  const Counts c = vb_counts(
      gd, trials, check_seed(seed, "pair-alive/" + gd.name),
      [&](const VBOutput& out, Counts& acc) {
        for (std::size_t k = 0; k < pairs.size(); ++k) {
          acc[k] += out.alive[pairs[k].first] && out.alive[pairs[k].second];
        }
      },
      pairs.size());
  std::optional<VBExact> exact;
  if (gd.enumerable()) exact = exact_vb_enumeration(gd.view(), *gd.law);
  std::vector<CheckEntry> entries;
  std::string adjacent_note;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto est = ProbEstimate::from_count(c[k], trials);
    const auto e = g.find_edge(pairs[k].first, pairs[k].second);
    const bool adjacent = e && gd.crucial.test(*e);
    if (adjacent) {
      adjacent_note += pair_label(pairs[k]) + "=" + fmt(est.value) + " ";
    } else {
      entries.push_back(make_entry(pair_label(pairs[k]) + " floor", est.value, est.std_err,
                                   1.0 / 576.0, Comparison::kAtLeast));
    }
    if (exact) {
      const double pe = exact->pair_alive.at(pairs[k]);
      entries.push_back(make_entry(pair_label(pairs[k]) + " vs enumeration", est.value,
                                   binomial_se(pe, trials), pe, Comparison::kWithin, 1e-12));
    }
  }
  return finish_report("pair_alive_floor", gd.name, std::move(entries), trials, true,
                       adjacent_note.empty() ? "" : "adjacent (not floored): " + adjacent_note);
}

std::vector<CheckReport> check_selectability(const Gadget& gd, std::uint64_t trials,
                                             std::uint64_t seed) {
  const StochasticGraph& g = *gd.graph;
  const auto ids = gd.crucial.indices();
  const Counts c = vb_counts(
      gd, trials, check_seed(seed, "selectability/" + gd.name),
      [&](const VBOutput& out, Counts& acc) {
        for (std::size_t k = 0; k < ids.size(); ++k) acc[k] += out.m_c.contains(ids[k]);
      },
      ids.size());
  std::optional<VBExact> exact;
  if (gd.enumerable()) exact = exact_vb_enumeration(gd.view(), *gd.law);
  std::vector<CheckEntry> vs_exact;
  std::vector<CheckEntry> vs_bound;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const EdgeId e = ids[k];
    const auto est = ProbEstimate::from_count(c[k], trials);
    if (exact) {
      const double pe = exact->p_selected[e];
      vs_exact.push_back(make_entry(edge_label(g, e), est.value, binomial_se(pe, trials), pe,
                                    Comparison::kWithin, 1e-12));
    }
    vs_bound.push_back(make_entry(edge_label(g, e) + " vs 8y/15", est.value, est.std_err,
                                  8.0 * gd.law->y(e) / 15.0, Comparison::kAtLeast));
  }
  std::vector<CheckReport> out;
  if (exact) out.push_back(finish_report("selectability_vs_enumeration", gd.name, std::move(vs_exact), trials));
  const bool single = ids.size() == 1;
  out.push_back(finish_report("selectability_8_15", gd.name, std::move(vs_bound), trials, single,
                              single ? "" : "greedy acceptance; reported only"));
  return out;
}

CheckReport check_influential_independence(const Gadget& gd, std::uint64_t trials,
                                           std::uint64_t seed) {
  const StochasticGraph& g = *gd.graph;
  const std::size_t n = g.num_vertices();
  const GraphView view = gd.view();
  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), VertexId{0});
  // X_v takes values 0 (no active edge) or 1 + partner.
  const std::size_t k = n + 1;
  // Exact marginal of X_v for the identity order: v's batch is its crucial
  // edges to lower-numbered vertices.
  std::vector<std::vector<double>> marg(n, std::vector<double>(k, 0.0));
  for (VertexId v = 0; v < n; ++v) {
    std::vector<EdgeId> batch;
    for (EdgeId e : g.incident(v)) {
      if (gd.crucial.test(e) && g.edge(e).other(v) < v) batch.push_back(e);
    }
    std::sort(batch.begin(), batch.end());
    for (std::uint64_t pat = 0; pat < (std::uint64_t{1} << batch.size()); ++pat) {
      double pr = 1.0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        pr *= (pat >> i & 1U) ? g.edge(batch[i]).p : 1.0 - g.edge(batch[i]).p;
      }
      if (pat == 0) {
        marg[v][0] += pr;
        continue;
      }
      const auto cond = gd.law->conditional(batch, pat);
      std::vector<BatchCandidate> cands;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        cands.push_back({batch[i], gd.law->y(batch[i]), cond[i], (pat >> i & 1U) != 0});
      }
      const auto prob = activation_probabilities(cands);
      double none = 1.0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        marg[v][1 + g.edge(batch[i]).other(v)] += pr * prob[i];
        none -= prob[i];
      }
      marg[v][0] += pr * std::max(0.0, none);
    }
  }
  std::vector<VertexPair> pairs;
  for (VertexId a = 0; a < n; ++a) {
    for (VertexId b = a + 1; b < n; ++b) {
      auto nonconst = [&](VertexId v) {
        return std::count_if(marg[v].begin(), marg[v].end(), [](double p) { return p > 0.0; }) > 1;
      };
      if (nonconst(a) && nonconst(b)) pairs.push_back({a, b});
    }
  }
  const std::uint64_t s = check_seed(seed, "independence/" + gd.name);
  const Counts c = parallel_reduce(
      trials, 1, Counts(pairs.size() * k * k, 0),
      [&](std::size_t i, Counts& acc) {
        Rng rng = Rng::stream(s, streams::kVb, i);
        const auto out = run_vb_with_order(view, *gd.law, order, rng);
        std::vector<std::size_t> x(n, 0);
        for (const auto& rec : out.activation_log) x[rec.vertex] = rec.partner ? 1 + *rec.partner : 0;
        for (std::size_t q = 0; q < pairs.size(); ++q) {
          ++acc[q * k * k + x[pairs[q].first] * k + x[pairs[q].second]];
        }
      },
      add_counts);
  const double alpha = 1e-3 / std::max<std::size_t>(1, pairs.size());
  std::vector<CheckEntry> entries;
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    double stat = 0.0;
    int cells = 0;
    bool impossible = false;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        const double expected = static_cast<double>(trials) * marg[pairs[q].first][a] * marg[pairs[q].second][b];
        const double observed = static_cast<double>(c[q * k * k + a * k + b]);
        if (expected <= 0.0) {
          impossible |= observed > 0.0;
          continue;
        }
        ++cells;
        stat += (observed - expected) * (observed - expected) / expected;
      }
    }
    double pval = impossible ? 0.0 : 1.0;
    if (!impossible && cells > 1) {
      boost::math::chi_squared dist(cells - 1);
      pval = boost::math::cdf(boost::math::complement(dist, stat));
    }
    entries.push_back(make_entry("X_" + std::to_string(pairs[q].first) + ",X_" +
                                     std::to_string(pairs[q].second) + " p-value",
                                 pval, 0.0, alpha, Comparison::kAtLeast));
  }
  return finish_report("influential_independence", gd.name, std::move(entries), trials, true,
                       "chi-square against exact product marginals, identity order");
}

QueryPlan build_query_plan_shared(const StochasticGraph& g, std::uint64_t t, std::uint64_t seed,
                                  const EdgeSet& shared) {
  QueryPlan plan;
  plan.t = t;
  plan.edges = EdgeSet(g.num_edges());
  Rng common = Rng::stream(seed, streams::kPlan, fnv1a("shared"));
  const Realization fixed = sample_realization(g, common);
  const EdgeSet keep_fixed = fixed.bits() & shared;
  const EdgeSet free = shared.complement();
  for (std::uint64_t i = 0; i < t; ++i) {
    Rng rng = Rng::stream(seed, streams::kPlan, i);
    const Realization r = sample_realization(g, rng);
    const EdgeSet bits = (r.bits() & free) | keep_fixed;
    plan.matchings.push_back(max_weight_matching(GraphView(g, bits)));
    for (EdgeId e : plan.matchings.back().edges()) plan.edges.set(e);
  }
  return plan;
}

SharedBonusFixture shared_bonus_fixture() {
  SharedBonusFixture f;
  f.graph = StochasticGraph(4, {{0, 1, 1.0, 0.5}, {0, 2, 1.0, 0.5}, {0, 3, 10.0, 0.5}});
  f.shared = EdgeSet::from_indices(3, std::vector<EdgeId>{2});
  f.t = 6;
  return f;
}

CheckReport check_negative_association(const StochasticGraph& g, std::uint64_t t,
                                       std::uint64_t trials, std::uint64_t seed,
                                       const EdgeSet* shared, std::string instance) {
  std::vector<std::pair<EdgeId, EdgeId>> pairs;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    const auto inc = g.incident(v);
    for (std::size_t a = 0; a < inc.size(); ++a) {
      for (std::size_t b = a + 1; b < inc.size(); ++b) {
        pairs.emplace_back(std::min(inc[a], inc[b]), std::max(inc[a], inc[b]));
      }
    }
  }
  const std::size_t m = g.num_edges();
  const std::uint64_t s = check_seed(seed, "negative-association/" + instance);
  // Layout: m single counts, then one joint count per pair.
  const Counts c = parallel_reduce(
      trials, 1, Counts(m + pairs.size(), 0),
      [&](std::size_t i, Counts& acc) {
        const std::uint64_t ps = derive_seed(s, i);
        const QueryPlan plan = shared ? build_query_plan_shared(g, t, ps, *shared)
                                      : build_query_plan(g, t, ps);
        for (EdgeId e = 0; e < m; ++e) acc[e] += plan.edges.test(e);
        for (std::size_t q = 0; q < pairs.size(); ++q) {
          acc[m + q] += plan.edges.test(pairs[q].first) && plan.edges.test(pairs[q].second);
        }
      },
      add_counts);
  const double n = static_cast<double>(trials);
  std::vector<CheckEntry> entries;
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const double n1 = static_cast<double>(c[pairs[q].first]);
    const double n2 = static_cast<double>(c[pairs[q].second]);
    const double n12 = static_cast<double>(c[m + q]);
    const double p1 = n1 / n;
    const double p2 = n2 / n;
    const double cov = n12 / n - p1 * p2;
    // Standard error of the mean of (X - p1)(Y - p2) from the 2x2 cell counts.
    const double cells[4][3] = {{n12, 1 - p1, 1 - p2},
                                {n1 - n12, 1 - p1, -p2},
                                {n2 - n12, -p1, 1 - p2},
                                {n - n1 - n2 + n12, -p1, -p2}};
    double ss = 0.0;
    for (const auto& cell : cells) {
      const double d = cell[1] * cell[2] - cov;
      ss += cell[0] * d * d;
    }
    const double se = trials > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
    entries.push_back(make_entry("cov(" + edge_label(g, pairs[q].first) + "," +
                                     edge_label(g, pairs[q].second) + ")",
                                 cov, se, 0.0, Comparison::kAtMost, 1e-12));
  }
  return finish_report(shared ? "negative_association_shared_control" : "negative_association",
                       instance, std::move(entries), trials);
}

CheckReport check_two_point_covariance() {
  // Two unit edges at vertex 0, p = 1, t = 1. Every realization is the full
  // graph, so Q = MM(G) is the same set in every draw.
  StochasticGraph g(3, {{0, 1, 1.0, 1.0}, {0, 2, 1.0, 1.0}});
  const QueryPlan plan = build_query_plan(g, 1, 0);
  const double x1 = plan.edges.test(0) ? 1.0 : 0.0;
  const double x2 = plan.edges.test(1) ? 1.0 : 0.0;
  const double cov = x1 * x2 - x1 * x2;  // point mass: E[XY] = E[X]E[Y]
  std::vector<CheckEntry> entries;
  entries.push_back(make_entry("exact cov", cov, 0.0, -0.25, Comparison::kWithin, 1e-12));
  entries.push_back(make_entry("one edge per round", x1 + x2, 0.0, 1.0, Comparison::kWithin, 1e-12));
  return finish_report("two_point_covariance", "two-edge star p=1 t=1", std::move(entries), 1, true,
                       "deterministic MM picks the same edge every round, so Q is constant");
}

std::vector<CheckReport> check_query_plan_laws(const StochasticGraph& g, std::string instance,
                                               std::uint64_t t, std::uint64_t x_trials,
                                               std::uint64_t trials, std::uint64_t seed) {
  std::vector<CheckReport> out;
  {
    StochasticGraph one(2, {{0, 1, 1.0, 0.4}});
    std::vector<CheckEntry> entries;
    for (std::uint64_t tt : {1u, 3u, 5u, 10u}) {
      const auto q = estimate_q(one, tt, trials, check_seed(seed, "plan-single/" + std::to_string(tt)));
      const double target = 1.0 - std::pow(0.6, static_cast<double>(tt));
      entries.push_back(make_entry("t=" + std::to_string(tt), q[0].value, binomial_se(target, trials),
                                   target, Comparison::kWithin, 1e-12));
    }
    out.push_back(finish_report("plan_single_edge_closed_form", "single edge p=0.4",
                                std::move(entries), trials));
  }
  {
    std::uint64_t violations = 0;
    std::size_t worst = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
      const auto plan = build_query_plan(g, t, derive_seed(check_seed(seed, "plan-degree/" + instance), i));
      const auto d = plan.max_degree(g);
      worst = std::max(worst, d);
      violations += d > t;
    }
    std::vector<CheckEntry> entries;
    entries.push_back(make_entry("plans with degree > t", static_cast<double>(violations), 0.0, 0.0,
                                 Comparison::kAtMost));
    out.push_back(finish_report("plan_max_degree", instance, std::move(entries), trials, true,
                                "largest degree seen " + std::to_string(worst) + ", t=" + std::to_string(t)));
  }
  {
    const auto x = estimate_x(g, x_trials, check_seed(seed, "plan-floor-x/" + instance));
    const auto q = estimate_q(g, t, trials, check_seed(seed, "plan-floor-q/" + instance));
    std::vector<CheckEntry> entries;
    const double td = static_cast<double>(t);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      const double lin = td * x[e].value / 3.0;
      const double floor = std::min(1.0 / 3.0, lin);
      const double floor_se = lin < 1.0 / 3.0 ? td * x[e].std_err / 3.0 : 0.0;
      entries.push_back(make_entry(edge_label(g, e), q[e].value, std::hypot(q[e].std_err, floor_se),
                                   floor, Comparison::kAtLeast));
    }
    out.push_back(finish_report("plan_coverage_floor", instance, std::move(entries), trials));
  }
  return out;
}

CheckReport check_var_Z(const Gadget& gd, std::span<const SyntheticEdge> synthetic, double tau,
                        std::uint64_t trials, std::uint64_t seed, double slack) {
  const StochasticGraph& g = *gd.graph;
  const std::size_t n = g.num_vertices();
  std::vector<VertexPair> pairs;
  std::vector<double> xsum(n, 0.0);
  for (const auto& s : synthetic) {
    if (s.u >= n || s.v >= n || s.u == s.v) throw Error("synthetic edge out of range");
    if (!(s.x >= 0.0 && s.x <= tau)) throw Error("synthetic x must lie in [0, tau]");
    const auto e = g.find_edge(s.u, s.v);
    if (e && gd.crucial.test(*e)) throw Error("synthetic edge coincides with a crucial edge");
    xsum[s.u] += s.x;
    xsum[s.v] += s.x;
    pairs.push_back(make_pair_key(s.u, s.v));
  }
  for (double v : xsum) {
    if (v > 1.0 + 1e-12) throw Error("synthetic x is not a fractional matching");
  }
  std::vector<CheckEntry> entries;
  if (pairs.empty()) {
    entries.push_back(make_entry("no synthetic edges: Var(Z)=0", 0.0, 0.0, 0.0, Comparison::kAtMost));
    return finish_report("var_Z", gd.name, std::move(entries), trials);
  }
  const auto alive = estimate_pair_alive(gd.view(), *gd.law, pairs, trials,
                                         check_seed(seed, "varz-pairs/" + gd.name));
  double delta_hat = 1.0;
  for (const auto& a : alive) delta_hat = std::min(delta_hat, a.estimate.value);
  if (delta_hat <= 0.0) {
    CheckReport r = finish_report("var_Z", gd.name, {}, trials, true, "a pair was never alive");
    r.verdict = Verdict::kInconclusive;
    return r;
  }
  std::vector<double> h;
  for (std::size_t k = 0; k < pairs.size(); ++k) h.push_back(synthetic[k].x / alive[k].estimate.value);
  const std::uint64_t s = check_seed(seed, "varz-runs/" + gd.name);
  const GraphView view = gd.view();
  const Moments mom = parallel_reduce(
      trials, 1, Moments(n),
      [&](std::size_t i, Moments& acc) {
        Rng rng = Rng::stream(s, streams::kVb, i);
        const auto out = run_vb(view, *gd.law, rng);
        std::vector<double> z(n, 0.0);
        for (std::size_t k = 0; k < synthetic.size(); ++k) {
          if (out.alive[synthetic[k].u]) z[synthetic[k].v] += h[k];
          if (out.alive[synthetic[k].v]) z[synthetic[k].u] += h[k];
        }
        for (VertexId v = 0; v < n; ++v) acc.add(v, z[v]);
      },
      [](Moments& into, const Moments& from) { into.merge(from); });
  const double bound = 10.0 * tau / (delta_hat * delta_hat) * (1.0 + slack);
  for (VertexId v = 0; v < n; ++v) {
    entries.push_back(make_entry("Var(Z_" + std::to_string(v) + ")", mom.var(v, trials), 0.0, bound,
                                 Comparison::kAtMost));
  }
  return finish_report("var_Z", gd.name, std::move(entries), trials, true,
                       "delta_hat=" + fmt(delta_hat) + " tau=" + fmt(tau));
}

CheckReport check_concentration_Y(const PipelineSetup& setup, const Params& params,
                                  std::uint64_t t, std::uint64_t trials, std::uint64_t seed) {
  const StochasticGraph& g = *setup.graph;
  const std::size_t n = g.num_vertices();
  const GTable table = g_table_for(setup, t, false);
  const std::uint64_t s = check_seed(seed, "concentration");
  std::vector<std::vector<double>> y(trials, std::vector<double>(n, 0.0));
  for (std::uint64_t i = 0; i < trials; ++i) {
    const std::uint64_t run_seed = derive_seed(s, streams::kRun, i);
    Rng real_rng = Rng::stream(run_seed, streams::kRealization);
    const Realization r = sample_realization(g, real_rng);
    const QueryPlan plan = build_query_plan(g, t, run_seed);
    Rng vb_rng = Rng::stream(run_seed, streams::kVb);
    const VBOutput vb = run_vb(setup.crucial, *setup.law, vb_rng, &r);
    for (EdgeId e : setup.classes.noncrucial.indices()) {
      if (!plan.edges.test(e) || !r.contains(e)) continue;
      const Edge& ed = g.edge(e);
      if (vb.alive[ed.u]) y[i][ed.v] += table.g[e];
      if (vb.alive[ed.v]) y[i][ed.u] += table.g[e];
    }
  }
  std::vector<CheckEntry> entries;
  for (VertexId v = 0; v < n; ++v) {
    double mean = 0.0;
    for (std::uint64_t i = 0; i < trials; ++i) mean += y[i][v];
    mean /= static_cast<double>(trials);
    std::uint64_t dev = 0;
    std::uint64_t high = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
      dev += std::abs(y[i][v] - mean) >= params.eta;
      high += y[i][v] >= 1.0 + 3.0 * params.eta;
    }
    const auto pd = ProbEstimate::from_count(dev, trials);
    const auto ph = ProbEstimate::from_count(high, trials);
    entries.push_back(make_entry("Pr[|Y_" + std::to_string(v) + "-E|>=eta]", pd.value, pd.std_err,
                                 params.beta, Comparison::kAtMost));
    entries.push_back(make_entry("Pr[Y_" + std::to_string(v) + ">=1+3eta]", ph.value, ph.std_err,
                                 params.beta, Comparison::kAtMost));
  }
  CheckReport r = finish_report("concentration_Y", "t=" + std::to_string(t), std::move(entries),
                                trials, false, "reported only");
  if (r.verdict == Verdict::kPass) r.verdict = Verdict::kInconclusive;
  return r;
}

std::vector<CheckReport> check_fractional_stage(const PipelineSetup& setup, const Params& params,
                                                std::uint64_t t, std::uint64_t trials,
                                                std::uint64_t seed, int workers) {
  const StochasticGraph& g = *setup.graph;
  const std::size_t m = g.num_edges();
  const GTable table = g_table_for(setup, t, false);
  const std::uint64_t s = check_seed(seed, "fractional");
  struct Acc {
    Moments f;
    std::uint64_t degree_bad = 0;
    std::uint64_t rounding_checked = 0;
    std::uint64_t rounding_bad = 0;
    std::uint64_t combine_bad = 0;
    std::uint64_t overloaded_vertices = 0;
  };
  Acc init;
  init.f = Moments(m);
  const Acc acc = parallel_reduce(
      trials, workers, init,
      [&](std::size_t i, Acc& a) {
        const RunDetail d = run_detailed(setup, table, params, t, false, s, i);
        const RunRecord rec = summarize_run(d, g, params, i, 0);
        for (EdgeId e = 0; e < m; ++e) a.f.add(e, d.fractional.f[e]);
        a.degree_bad += !rec.degree_ok;
        a.rounding_checked += rec.rounding_checked;
        a.rounding_bad += !rec.rounding_ok;
        const double best = std::max(d.combined.weight_crucial, d.combined.weight_mixed);
        a.combine_bad += rec.alg < best - 1e-12;
        for (bool o : d.fractional.survival.overloaded) a.overloaded_vertices += o;
      },
      [](Acc& into, const Acc& from) {
        into.f.merge(from.f);
        into.degree_bad += from.degree_bad;
        into.rounding_checked += from.rounding_checked;
        into.rounding_bad += from.rounding_bad;
        into.combine_bad += from.combine_bad;
        into.overloaded_vertices += from.overloaded_vertices;
      });
  std::vector<CheckReport> out;
  const std::string inst = "t=" + std::to_string(t);
  out.push_back(finish_report("fractional_degree_cap", inst,
                              {make_entry("runs with degree > 1", static_cast<double>(acc.degree_bad),
                                          0.0, 0.0, Comparison::kAtMost)},
                              trials));
  out.push_back(finish_report("rounding_bound", inst,
                              {make_entry("violations", static_cast<double>(acc.rounding_bad), 0.0, 0.0,
                                          Comparison::kAtMost)},
                              trials, true,
                              "runs with max f <= eps^3: " + std::to_string(acc.rounding_checked)));
  out.push_back(finish_report("combiner_dominance", inst,
                              {make_entry("violations", static_cast<double>(acc.combine_bad), 0.0, 0.0,
                                          Comparison::kAtMost)},
                              trials));
  std::vector<CheckEntry> ef;
  const double factor = 1.0 - params.epsilon / 2.0;
  for (const GEntry& ent : table.entries) {
    const EdgeId e = ent.edge;
    if (ent.zero_denominator) continue;
    const double mean = acc.f.mean(e, trials);
    const double se_run = std::sqrt(acc.f.var(e, trials) / static_cast<double>(trials));
    // The denominators of g_e are estimates; their relative error carries
    // over to f_e one for one.
    const double rel_pair = ent.pair.value > 0.0 ? ent.pair.std_err / ent.pair.value : 0.0;
    const double rel_q = ent.queried.value > 0.0 ? ent.queried.std_err / ent.queried.value : 0.0;
    const double se = std::sqrt(se_run * se_run + mean * mean * (rel_pair * rel_pair + rel_q * rel_q));
    ef.push_back(make_entry(edge_label(g, e), mean, se, factor * ent.x, Comparison::kAtLeast));
  }
  out.push_back(finish_report("expected_f_lower_bound", inst, std::move(ef), trials, true,
                              "overloaded vertex-runs: " + std::to_string(acc.overloaded_vertices)));
  const double e3 = std::pow(params.epsilon, 3);
  const double e2 = params.epsilon * params.epsilon;
  std::vector<CheckEntry> gent;
  gent.push_back(make_entry("max g_e vs eps^3", table.max_g(), 0.0, e3, Comparison::kAtMost));
  gent.push_back(make_entry("max g_e vs eps^2", table.max_g(), 0.0, e2, Comparison::kAtMost));
  out.push_back(finish_report("g_threshold", inst, std::move(gent), 0, false,
                              std::to_string(table.count_above(e3)) + " of " +
                                  std::to_string(table.entries.size()) + " above eps^3, " +
                                  std::to_string(table.count_above(e2)) + " above eps^2"));
  return out;
}

std::vector<CheckReport> check_end_to_end(const PipelineSetup& setup, const Params& params,
                                          std::uint64_t trials, std::uint64_t seed, int workers) {
  const StochasticGraph& g = *setup.graph;
  std::vector<CheckReport> out;
  const std::uint64_t s = check_seed(seed, "end-to-end");
  const auto full = end_to_end(setup, params, 0, true, trials, s, workers);
  out.push_back(finish_report("control_ratio_full_query", "Q=E",
                              {make_entry("mm_Q/mm_G", full.summary.ratio, full.summary.ratio_se, 1.0,
                                          Comparison::kWithin, 1e-12)},
                              trials));
  const auto t_big = static_cast<std::uint64_t>(std::ceil(8.0 / g.p_min()));
  const auto one = end_to_end(setup, params, 1, false, trials, s, workers);
  const auto big = end_to_end(setup, params, t_big, false, trials, s, workers);
  // Same run index -> same realization, so mm_G cancels in the difference.
  std::vector<double> diff;
  double sum_g = 0.0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    diff.push_back(big.runs[i].mm_q - one.runs[i].mm_q);
    sum_g += big.runs[i].mm_g;
  }
  const double n = static_cast<double>(trials);
  const double md = std::accumulate(diff.begin(), diff.end(), 0.0) / n;
  double ss = 0.0;
  for (double d : diff) ss += (d - md) * (d - md);
  const double mean_g = sum_g / n;
  const double se = trials > 1 && mean_g > 0 ? std::sqrt(ss / (n - 1) / n) / mean_g : 0.0;
  out.push_back(finish_report(
      "ratio_monotone_in_t", "t=1 vs t=" + std::to_string(t_big),
      {make_entry("ratio(t) - ratio(1)", big.summary.ratio - one.summary.ratio, se, 0.0,
                  Comparison::kAtLeast)},
      trials, true,
      "ratio(1)=" + fmt(one.summary.ratio) + " ratio(t)=" + fmt(big.summary.ratio)));
  std::vector<CheckEntry> ref;
  ref.push_back(make_entry("mm_Q/mm_G at t=1", one.summary.ratio, one.summary.ratio_se, 0.681,
                           Comparison::kAtLeast));
  ref.push_back(make_entry("mm_Q/mm_G at t=" + std::to_string(t_big), big.summary.ratio,
                           big.summary.ratio_se, 0.681, Comparison::kAtLeast));
  ref.push_back(make_entry("alg/mm_G at t=" + std::to_string(t_big), big.summary.alg_ratio,
                           big.summary.alg_ratio_se, 0.681, Comparison::kAtLeast));
  ref.push_back(make_entry("alg/mm_G with Q=E", full.summary.alg_ratio, full.summary.alg_ratio_se,
                           0.681, Comparison::kAtLeast));
  out.push_back(finish_report("ratio_vs_0.681_reference", "desk scale", std::move(ref), trials, false,
                              "worst-case guarantee at theory-scale t; reported only"));
  return out;
}

// ------------------------------------------------------------------- suite

RelaxedSuite relaxed_suite() {
  // Four heavy edges forming a perfect matching, plus light cross edges.
  RelaxedSuite s{StochasticGraph(8, {{0, 1, 3.0, 0.85},
                                     {2, 3, 3.0, 0.85},
                                     {4, 5, 3.0, 0.85},
                                     {6, 7, 3.0, 0.85},
                                     {0, 2, 0.8, 0.6},
                                     {1, 3, 0.7, 0.6},
                                     {2, 4, 0.9, 0.6},
                                     {3, 5, 0.6, 0.6},
                                     {4, 6, 0.8, 0.6},
                                     {5, 7, 0.7, 0.6},
                                     {6, 0, 0.9, 0.6},
                                     {7, 1, 0.6, 0.6},
                                     {0, 5, 0.5, 0.6},
                                     {3, 6, 0.5, 0.6}}),
                 Params{}};
  s.params = Params::derive(0.12, 0.25, s.graph.p_min(), 60, 0.2);
  return s;
}

std::vector<CheckReport> run_default_suite(const SuiteOptions& opt) {
  std::vector<CheckReport> out;
  const std::uint64_t trials = opt.trials;
  out.push_back(check_mwm_oracle(500, opt.seed));
  for (const Gadget& gd : bundled_gadgets()) {
    if (gd.crucial.any()) out.push_back(check_activation(gd, trials, opt.seed));
    out.push_back(check_pair_alive(gd, trials, opt.seed));
    if (gd.crucial.any()) {
      for (auto& r : check_selectability(gd, trials, opt.seed)) out.push_back(std::move(r));
      out.push_back(check_influential_independence(gd, trials, opt.seed));
    }
  }
  {
    CheckReport two = check_two_point_covariance();
    two.gated = false;
    out.push_back(std::move(two));
  }
  const StochasticGraph bench = benchmark_graph();
  out.push_back(check_negative_association(bench, 3, trials, opt.seed, nullptr, "benchmark6 t=3"));
  StochasticGraph star(5, {{0, 1, 1.0, 0.5}, {0, 2, 1.5, 0.6}, {0, 3, 2.0, 0.4}, {0, 4, 0.8, 0.7}});
  out.push_back(check_negative_association(star, 3, trials, opt.seed, nullptr, "star4 t=3"));
  if (opt.negative_control) {
    const auto fx = shared_bonus_fixture();
    out.push_back(check_negative_association(fx.graph, fx.t, trials, opt.seed, &fx.shared,
                                             "shared-bonus star"));
  }
  const auto t_bench = static_cast<std::uint64_t>(std::ceil(8.0 / bench.p_min()));
  for (auto& r : check_query_plan_laws(bench, "benchmark6", t_bench, trials, std::min<std::uint64_t>(trials, 5000),
                                       opt.seed)) {
    out.push_back(std::move(r));
  }

  const RelaxedSuite rs = relaxed_suite();
  PipelineOptions po;
  po.params = rs.params;
  po.x_trials = std::max<std::uint64_t>(trials, 20000);
  po.pair_trials = std::max<std::uint64_t>(trials, 20000);
  po.seed = opt.seed;
  po.workers = opt.workers;
  const PipelineSetup setup = prepare_pipeline(rs.graph, po);
  {
    const auto cov = check_crucial_coverage(rs.graph, setup.classes, setup.estimates.x_hat,
                                            rs.params.epsilon, rs.params.t,
                                            std::min<std::uint64_t>(trials, 2000),
                                            check_seed(opt.seed, "coverage"), opt.workers);
    std::vector<CheckEntry> entries;
    for (const auto& e : cov.entries) {
      if (!e.crucial) continue;
      entries.push_back(make_entry(edge_label(rs.graph, e.edge), e.coverage.value, e.coverage.std_err,
                                   1.0 - rs.params.epsilon, Comparison::kAtLeast));
    }
    out.push_back(finish_report("crucial_coverage", "relaxed8", std::move(entries),
                                std::min<std::uint64_t>(trials, 2000), cov.precondition_met,
                                cov.precondition_met ? "" : "t < 1/(tau eps); reported only"));
  }
  for (auto& r : check_fractional_stage(setup, rs.params, rs.params.t, std::min<std::uint64_t>(trials, 20000),
                                        opt.seed, opt.workers)) {
    out.push_back(std::move(r));
  }
  out.push_back(check_concentration_Y(setup, rs.params, rs.params.t, std::min<std::uint64_t>(trials, 5000),
                                      opt.seed));
  {
    Gadget gd;
    gd.name = "relaxed8";
    gd.graph = std::shared_ptr<const StochasticGraph>(&rs.graph, [](const StochasticGraph*) {});
    gd.crucial = setup.classes.crucial;
    gd.law = setup.law;
    const double tau = rs.params.tau;
    std::vector<SyntheticEdge> syn;
    std::vector<std::size_t> deg(rs.graph.num_vertices(), 0);
    std::vector<VertexPair> cand;
    for (VertexId a = 0; a < rs.graph.num_vertices(); ++a) {
      for (VertexId b = a + 1; b < rs.graph.num_vertices(); ++b) {
        const auto e = rs.graph.find_edge(a, b);
        if (e && gd.crucial.test(*e)) continue;
        cand.push_back({a, b});
        ++deg[a];
        ++deg[b];
      }
    }
    const double cap = static_cast<double>(*std::max_element(deg.begin(), deg.end()));
    for (const auto& p : cand) syn.push_back({p.first, p.second, std::min(tau, 1.0 / cap)});
    out.push_back(check_var_Z(gd, syn, tau, trials, opt.seed));
  }
  {
    PipelineOptions bo;
    bo.params = Params::derive(0.12, 0.25, bench.p_min(), t_bench, 0.2);
    bo.x_trials = std::max<std::uint64_t>(trials, 20000);
    bo.pair_trials = std::max<std::uint64_t>(trials, 20000);
    bo.seed = opt.seed;
    bo.workers = opt.workers;
    const PipelineSetup bs = prepare_pipeline(bench, bo);
    for (auto& r : check_end_to_end(bs, bo.params, std::min<std::uint64_t>(trials, 5000), opt.seed,
                                    opt.workers)) {
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace stochmatch
