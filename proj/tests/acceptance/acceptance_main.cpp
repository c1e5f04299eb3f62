// One PASS/FAIL line per acceptance criterion. Tolerances and budgets are
// pinned below; the process exits nonzero if any criterion fails, except the
// ones listed as known-unattainable.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "stochmatch/augmenter.hpp"
#include "stochmatch/cli.hpp"
#include "stochmatch/graph_io.hpp"
#include "stochmatch/verifier.hpp"

using namespace stochmatch;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20261015;
constexpr std::size_t kMwmInstances = 500;
constexpr std::uint64_t kVbTrials = 100000;
constexpr std::uint64_t kPlanTrials = 5000;
constexpr std::uint64_t kPlanXTrials = 20000;
constexpr std::uint64_t kNegAssocTrials = 20000;
constexpr std::uint64_t kFractionalTrials = 20000;
constexpr std::uint64_t kRoundingInstances = 2000;
constexpr std::uint64_t kEndToEndTrials = 5000;
constexpr std::uint64_t kDeterminismRuns = 400;
constexpr double kRuntime1 = 60, kRuntime2 = 120, kRuntime3 = 120, kRuntime4 = 120, kRuntime5 = 60,
                 kRuntime6 = 60, kRuntime7 = 300, kRuntime8 = 180, kRuntime9 = 300, kRuntime10 = 120;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  bool known_unattainable;
  std::function<Outcome()> body;
};

bool all_pass(const std::vector<CheckReport>& rs, std::ostringstream& why) {
  bool ok = true;
  for (const auto& r : rs) {
    if (!r.gated) continue;
    if (r.verdict != Verdict::kPass) {
      ok = false;
      for (const auto& e : r.entries) {
        if (!e.ok) {
          why << " [" << r.name << "/" << r.instance << " " << e.label << " est=" << e.estimate
              << " se=" << e.std_err << " thr=" << e.threshold << "]";
        }
      }
    }
  }
  return ok;
}

Outcome from_reports(const std::vector<CheckReport>& rs, const std::string& what) {
  std::ostringstream why;
  const bool ok = all_pass(rs, why);
  std::size_t entries = 0;
  for (const auto& r : rs) entries += r.entries.size();
  return {ok, what + ": " + std::to_string(rs.size()) + " reports, " + std::to_string(entries) +
                  " comparisons" + why.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Map of relative path -> bytes for every file under `dir`.
std::vector<std::pair<std::string, std::string>> snapshot(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& ent : fs::recursive_directory_iterator(dir)) {
    if (ent.is_regular_file()) out.emplace_back(fs::relative(ent.path(), dir).string(), slurp(ent.path()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome c1() {
  const auto r = check_mwm_oracle(kMwmInstances, kSeed);
  return from_reports({r}, std::to_string(r.trials) + " graphs, " + r.note);
}

Outcome c2() {
  std::vector<CheckReport> rs;
  for (const auto& gd : bundled_gadgets()) {
    if (gd.name == "edge-y1" || gd.name == "edge-y0.5" || gd.name == "path3-exact" ||
        gd.name == "path3-uniform") {
      rs.push_back(check_activation(gd, kVbTrials, kSeed));
    }
  }
  std::ostringstream os;
  os << "edge-y1 active freq " << rs[0].entries[0].estimate << " vs g(1)=0.6";
  return from_reports(rs, os.str());
}

Outcome c3() {
  std::vector<CheckReport> rs;
  double lowest = 1.0;
  for (const auto& gd : bundled_gadgets()) {
    rs.push_back(check_pair_alive(gd, kVbTrials, kSeed));
    for (const auto& e : rs.back().entries) {
      if (e.label.find("floor") != std::string::npos) lowest = std::min(lowest, e.estimate);
    }
  }
  std::ostringstream os;
  os << "lowest non-adjacent pair " << lowest << " vs floor " << 1.0 / 576.0;
  return from_reports(rs, os.str());
}

Outcome c4() {
  std::vector<CheckReport> rs;
  for (const auto& gd : bundled_gadgets()) {
    if (!gd.crucial.any()) continue;
    for (auto& r : check_selectability(gd, kVbTrials, kSeed)) rs.push_back(std::move(r));
  }
  return from_reports(rs, "enumeration agreement on every gadget, 8/15 gated on single edges");
}

Outcome c5() {
  std::vector<CheckReport> rs;
  rs.push_back(check_two_point_covariance());
  rs.push_back(check_negative_association(benchmark_graph(), 3, kNegAssocTrials, kSeed, nullptr,
                                          "benchmark6 t=3"));
  StochasticGraph star(5, {{0, 1, 1.0, 0.5}, {0, 2, 1.5, 0.6}, {0, 3, 2.0, 0.4}, {0, 4, 0.8, 0.7}});
  rs.push_back(check_negative_association(star, 3, kNegAssocTrials, kSeed, nullptr, "star4 t=3"));
  std::ostringstream os;
  os << "two-point cov " << rs[0].entries[0].estimate << " (required -0.25); Monte Carlo pairs "
     << (rs[1].verdict == Verdict::kPass && rs[2].verdict == Verdict::kPass ? "pass" : "fail");
  return from_reports(rs, os.str());
}

Outcome c6() {
  std::vector<CheckReport> rs;
  std::vector<std::pair<std::string, StochasticGraph>> instances;
  instances.emplace_back("benchmark6", benchmark_graph());
  instances.emplace_back("relaxed8", relaxed_suite().graph);
  for (const auto& gd : bundled_gadgets()) {
    if (gd.graph->num_edges() > 0) instances.emplace_back(gd.name, *gd.graph);
  }
  for (const auto& [name, g] : instances) {
    const auto t = static_cast<std::uint64_t>(std::ceil(8.0 / g.p_min()));
    for (auto& r : check_query_plan_laws(g, name, t, kPlanXTrials, kPlanTrials, kSeed)) {
      rs.push_back(std::move(r));
    }
  }
  return from_reports(rs, std::to_string(instances.size()) + " instances");
}

// Random fractional matchings with max f <= eps^3: weight(round) >= (1-eps/2) f.w.
CheckReport synthetic_rounding(double eps) {
  std::uint64_t bad = 0;
  for (std::uint64_t k = 0; k < kRoundingInstances; ++k) {
    Rng rng = Rng::stream(kSeed, fnv1a("acceptance-rounding"), k);
    const std::size_t n = 2 + rng.below(11);
    const auto g = gen_random_graph(n, 0.3 + 0.7 * rng.uniform(), Law::parse("uniform:0:2"),
                                    Law::parse("const:1"), derive_seed(kSeed, k));
    FractionalMatching f(g.num_edges());
    const double cap = std::pow(eps, 3);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      if (rng.uniform() < 0.7) f.set(e, cap * rng.uniform());
    }
    const double lhs = weight_of(round_fractional(g, f), g);
    bad += lhs < (1.0 - eps / 2.0) * f.dot(g) - 1e-12;
  }
  return finish_report("synthetic_rounding", "random n<=12", {make_entry("violations", static_cast<double>(bad), 0.0, 0.0, Comparison::kAtMost)},
                       kRoundingInstances);
}

Outcome c7() {
  const RelaxedSuite rs = relaxed_suite();
  PipelineOptions po;
  po.params = rs.params;
  po.seed = kSeed;
  const PipelineSetup setup = prepare_pipeline(rs.graph, po);
  auto reports = check_fractional_stage(setup, rs.params, rs.params.t, kFractionalTrials, kSeed, 1);
  std::string note;
  for (const auto& r : reports) {
    if (r.name == "rounding_bound") note = r.note;
  }
  reports.push_back(synthetic_rounding(rs.params.epsilon));
  return from_reports(reports, "relaxed8 eps=" + std::to_string(rs.params.epsilon) + " t=" +
                                   std::to_string(rs.params.t) + ", " + note);
}

Outcome c8() {
  const RelaxedSuite rs = relaxed_suite();
  PipelineOptions po;
  po.params = rs.params;
  po.seed = kSeed;
  const PipelineSetup setup = prepare_pipeline(rs.graph, po);
  Gadget gd;
  gd.name = "relaxed8";
  gd.graph = std::make_shared<const StochasticGraph>(rs.graph);
  gd.crucial = setup.classes.crucial;
  gd.law = setup.law;
  const double tau = rs.params.tau;
  std::vector<SyntheticEdge> syn;
  const std::size_t n = rs.graph.num_vertices();
  std::vector<std::size_t> deg(n, 0);
  std::vector<VertexPair> pairs;
  for (VertexId a = 0; a < n; ++a) {
    for (VertexId b = a + 1; b < n; ++b) {
      const auto e = rs.graph.find_edge(a, b);
      if (e && gd.crucial.test(*e)) continue;
      pairs.push_back({a, b});
      ++deg[a];
      ++deg[b];
    }
  }
  const double maxdeg = static_cast<double>(*std::max_element(deg.begin(), deg.end()));
  for (const auto& p : pairs) syn.push_back({p.first, p.second, std::min(tau, 1.0 / maxdeg)});
  const auto r = check_var_Z(gd, syn, tau, kVbTrials, kSeed);
  std::ostringstream os;
  os << "largest Var(Z_v) " << r.estimate << " vs bound " << r.threshold << " (" << r.note << ")";
  return from_reports({r}, os.str());
}

Outcome c9() {
  const StochasticGraph g = benchmark_graph();
  const auto t = static_cast<std::uint64_t>(std::ceil(8.0 / g.p_min()));
  PipelineOptions po;
  po.params = Params::derive(0.12, 0.25, g.p_min(), t, 0.2);
  po.seed = kSeed;
  const PipelineSetup setup = prepare_pipeline(g, po);
  const auto rs = check_end_to_end(setup, po.params, kEndToEndTrials, kSeed, 1);
  std::ostringstream os;
  os << rs[1].note << "; vs 0.681 (reported):";
  for (const auto& e : rs[2].entries) os << " " << e.label << "=" << std::setprecision(4) << e.estimate;
  return from_reports(rs, os.str());
}

Outcome c10() {
  const fs::path root = fs::absolute("acceptance_determinism");
  fs::remove_all(root);
  ExperimentConfig cfg;
  cfg.graph.builtin = "benchmark6";
  cfg.epsilon = 0.12;
  cfg.delta = 0.25;
  cfg.tau = 0.1;
  cfg.t_values = {1, 4, 27};
  cfg.runs = kDeterminismRuns;
  cfg.x_trials = cfg.y_trials = cfg.pair_trials = 5000;
  cfg.cond_trials = 500;
  cfg.seed = kSeed;
  std::ostringstream sink;
  std::vector<std::vector<std::pair<std::string, std::string>>> snaps;
  for (int w : {1, 8, 1}) {
    cfg.workers = w;
    cfg.out = (root / ("w" + std::to_string(w) + "_" + std::to_string(snaps.size()))).string();
    cmd_run(cfg, sink);
    snaps.push_back(snapshot(cfg.out));
  }
  const bool same = snaps[0] == snaps[1] && snaps[0] == snaps[2] && !snaps[0].empty();
  std::size_t bytes = 0;
  for (const auto& f : snaps[0]) bytes += f.second.size();
  fs::remove_all(root);
  return {same, std::to_string(snaps[0].size()) + " files, " + std::to_string(bytes) +
                    " bytes, workers 1/8/1 " + (same ? "byte-identical" : "DIFFER")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "MWM oracle equivalence", kRuntime1, false, c1},
      {2, "activation law", kRuntime2, false, c2},
      {3, "pair-alive floor", kRuntime3, false, c3},
      {4, "selectability", kRuntime4, false, c4},
      {5, "negative association", kRuntime5, true, c5},
      {6, "query-plan laws", kRuntime6, false, c6},
      {7, "fractional-stage contracts", kRuntime7, false, c7},
      {8, "Var(Z_v) gate", kRuntime8, false, c8},
      {9, "end-to-end ratios", kRuntime9, false, c9},
      {10, "determinism", kRuntime10, false, c10},
  };
  int hard_failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    std::ostringstream line;
    line << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail
         << "; " << std::fixed << std::setprecision(1) << secs << "s of " << c.budget_s << "s";
    if (!pass && c.known_unattainable) line << " [known unattainable, not counted]";
    std::cout << line.str() << std::endl;
    if (!pass && !c.known_unattainable) ++hard_failures;
  }
  std::cout << (hard_failures == 0 ? "acceptance: all attainable criteria pass" : "acceptance: failures")
            << std::endl;
  return hard_failures == 0 ? 0 : 1;
}
