#include "stochmatch/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "stochmatch/graph_io.hpp"
#include "stochmatch/parallel.hpp"
#include "stochmatch/pipeline.hpp"
#include "stochmatch/verifier.hpp"

namespace stochmatch {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok |= it.key() == k;
    if (!ok) throw Error(std::string("config: unknown key '") + it.key() + "' in " + where);
  }
}

LawKind parse_law(const std::string& s) {
  if (s == "auto") return LawKind::kAuto;
  if (s == "exact") return LawKind::kExact;
  if (s == "sampled") return LawKind::kSampled;
  throw Error("law must be auto, exact or sampled");
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write '" + p.string() + "'");
  return os;
}

void write_json(const fs::path& p, const json& j) {
  auto os = open_out(p);
  os << j.dump(2) << '\n';
}

json summary_json(const RunSummary& s) {
  return {{"t", s.full ? json("full") : json(s.t)},
          {"trials", s.trials},
          {"mean_alg", s.mean_alg},
          {"mean_mm_Q", s.mean_mm_q},
          {"mean_mm_G", s.mean_mm_g},
          {"ratio", s.ratio},
          {"ratio_se", s.ratio_se},
          {"alg_ratio", s.alg_ratio},
          {"alg_ratio_se", s.alg_ratio_se},
          {"scheme_mixed", s.scheme_mixed},
          {"degree_violations", s.degree_violations},
          {"rounding_checked", s.rounding_checked},
          {"rounding_violations", s.rounding_violations},
          {"clip_events", s.clip_events}};
}

}  // namespace

// ------------------------------------------------------------------ config

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  reject_unknown(j, {"graph", "epsilon", "delta", "tau", "t", "control", "trials", "law", "seed",
                     "workers", "out"},
                 "top level");
  ExperimentConfig c;
  if (j.contains("graph")) {
    const json& g = j.at("graph");
    reject_unknown(g, {"file", "builtin", "generate"}, "graph");
    if (g.size() != 1) throw Error("config: graph needs exactly one of file, builtin, generate");
    if (g.contains("file")) c.graph.file = g.at("file").get<std::string>();
    if (g.contains("builtin")) c.graph.builtin = g.at("builtin").get<std::string>();
    if (g.contains("generate")) {
      const json& gen = g.at("generate");
      reject_unknown(gen, {"n", "density", "weights", "probs", "seed"}, "graph.generate");
      c.graph.generate = true;
      c.graph.n = gen.value("n", c.graph.n);
      c.graph.density = gen.value("density", c.graph.density);
      c.graph.weights = gen.value("weights", c.graph.weights);
      c.graph.probs = gen.value("probs", c.graph.probs);
      if (gen.contains("seed") && !gen.at("seed").is_null()) c.graph.gen_seed = gen.at("seed").get<std::uint64_t>();
    }
  }
  c.epsilon = j.value("epsilon", c.epsilon);
  c.delta = j.value("delta", c.delta);
  if (j.contains("tau") && !j.at("tau").is_null()) c.tau = j.at("tau").get<double>();
  if (j.contains("t")) {
    const json& t = j.at("t");
    c.t_values = t.is_array() ? t.get<std::vector<std::uint64_t>>()
                              : std::vector<std::uint64_t>{t.get<std::uint64_t>()};
  }
  c.control = j.value("control", c.control);
  if (j.contains("trials")) {
    const json& tr = j.at("trials");
    reject_unknown(tr, {"runs", "x", "y", "conditional", "pair"}, "trials");
    c.runs = tr.value("runs", c.runs);
    c.x_trials = tr.value("x", c.x_trials);
    c.y_trials = tr.value("y", c.y_trials);
    c.cond_trials = tr.value("conditional", c.cond_trials);
    c.pair_trials = tr.value("pair", c.pair_trials);
  }
  c.law = j.value("law", c.law);
  if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("workers") && !j.at("workers").is_null()) c.workers = j.at("workers").get<int>();
  c.out = j.value("out", c.out);
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error("config '" + path + "': " + e.what());
  }
}

json ExperimentConfig::to_json() const {
  json j;
  json g = json::object();
  if (graph.file) g["file"] = *graph.file;
  if (graph.builtin) g["builtin"] = *graph.builtin;
  if (graph.generate) {
    g["generate"] = {{"n", graph.n},
                     {"density", graph.density},
                     {"weights", graph.weights},
                     {"probs", graph.probs},
                     {"seed", graph.gen_seed ? json(*graph.gen_seed) : json(nullptr)}};
  }
  j["graph"] = g;
  j["epsilon"] = epsilon;
  j["delta"] = delta;
  j["tau"] = tau ? json(*tau) : json(nullptr);
  j["t"] = t_values;
  j["control"] = control;
  j["trials"] = {{"runs", runs},
                 {"x", x_trials},
                 {"y", y_trials},
                 {"conditional", cond_trials},
                 {"pair", pair_trials}};
  j["law"] = law;
  j["seed"] = seed ? json(*seed) : json(nullptr);
  j["workers"] = workers ? json(*workers) : json(nullptr);
  j["out"] = out;
  return j;
}

void ExperimentConfig::validate() const {
  if (!seed) throw Error("a seed is required (--seed or \"seed\" in the config)");
  const int sources = (graph.file ? 1 : 0) + (graph.builtin ? 1 : 0) + (graph.generate ? 1 : 0);
  if (sources > 1) throw Error("choose one graph source");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("epsilon must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0,1)");
  if (tau && !(*tau >= 0.0)) throw Error("tau must be >= 0");
  if (t_values.empty()) throw Error("t list is empty");
  for (auto t : t_values) {
    if (t < 1) throw Error("every t must be >= 1");
  }
  if (runs < 1 || x_trials < 1 || y_trials < 1 || cond_trials < 1 || pair_trials < 1) {
    throw Error("trial budgets must be >= 1");
  }
  if (workers && *workers < 1) throw Error("workers must be >= 1");
  parse_law(law);
}

std::string ExperimentConfig::hash() const {
  json j = to_json();
  j.erase("workers");
  j.erase("out");
  return hex64(mix64(fnv1a(j.dump())));
}

StochasticGraph load_source(const ExperimentConfig& cfg) {
  if (cfg.graph.file) return load_graph_file(*cfg.graph.file);
  if (cfg.graph.builtin) {
    if (*cfg.graph.builtin == "benchmark6") return benchmark_graph();
    if (*cfg.graph.builtin == "relaxed8") return relaxed_suite().graph;
    throw Error("unknown builtin graph '" + *cfg.graph.builtin + "'");
  }
  if (cfg.graph.generate) {
    const std::uint64_t s = cfg.graph.gen_seed ? *cfg.graph.gen_seed : cfg.seed.value_or(0);
    return gen_random_graph(cfg.graph.n, cfg.graph.density, Law::parse(cfg.graph.weights),
                            Law::parse(cfg.graph.probs), s);
  }
  throw Error("no graph configured (file, builtin or generate)");
}

// ---------------------------------------------------------------- commands

std::string cmd_generate(const ExperimentConfig& cfg) {
  if (!cfg.seed && !cfg.graph.gen_seed) throw Error("a seed is required");
  ExperimentConfig c = cfg;
  c.graph.generate = true;
  c.graph.file.reset();
  c.graph.builtin.reset();
  const StochasticGraph g = load_source(c);
  fs::create_directories(c.out);
  const fs::path path = fs::path(c.out) / "graph.txt";
  save_graph_file(path.string(), g, "config_hash=" + c.hash());
  return path.string();
}

void cmd_run(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const StochasticGraph g = load_source(cfg);
  const int workers = resolve_workers(cfg.workers);
  const std::string hash = cfg.hash();
  const fs::path out(cfg.out);
  fs::create_directories(out);

  auto params_for = [&](std::uint64_t t) {
    return Params::derive(cfg.epsilon, cfg.delta, g.p_min(), t, cfg.tau);
  };
  PipelineOptions po;
  po.params = params_for(cfg.t_values.front());
  po.x_trials = cfg.x_trials;
  po.y_trials = cfg.y_trials;
  po.cond_trials = cfg.cond_trials;
  po.pair_trials = cfg.pair_trials;
  po.law = parse_law(cfg.law);
  po.seed = *cfg.seed;
  po.workers = workers;
  const PipelineSetup setup = prepare_pipeline(g, po);
  log << "graph: n=" << g.num_vertices() << " m=" << g.num_edges()
      << " crucial=" << setup.classes.crucial.count() << " tau=" << po.params.tau
      << " law=" << setup.law->name() << " workers=" << workers << '\n';

  std::vector<RunSummary> rows;
  auto run_one = [&](std::uint64_t t, bool full) {
    const Params p = params_for(full ? cfg.t_values.front() : t);
    const EndToEnd res = end_to_end(setup, p, t, full, cfg.runs, *cfg.seed, workers);
    json runs = json::array();
    for (const auto& r : res.runs) runs.push_back(r.to_json());
    const std::string name = full ? "runs_full.json" : "runs_t" + std::to_string(t) + ".json";
    write_json(out / name, {{"config_hash", hash}, {"summary", summary_json(res.summary)}, {"runs", runs}});
    log << (full ? std::string("t=full") : "t=" + std::to_string(t)) << " ratio=" << res.summary.ratio
        << " +- " << res.summary.ratio_se << " alg_ratio=" << res.summary.alg_ratio << '\n';
    rows.push_back(res.summary);
  };
  for (auto t : cfg.t_values) run_one(t, false);
  if (cfg.control) run_one(0, true);

  {
    auto os = open_out(out / "aggregate.csv");
    os << "# config_hash=" << hash << '\n';
    os << "seed,t,ratio,alg_weight,mmQ_weight,mmG_weight,scheme\n";
    for (const auto& s : rows) {
      // The scheme column names the combiner choice made in most runs.
      const bool mixed = 2 * s.scheme_mixed > s.trials;
      os << *cfg.seed << ',' << (s.full ? std::string("full") : std::to_string(s.t)) << ','
         << format_double(s.ratio) << ',' << format_double(s.mean_alg) << ','
         << format_double(s.mean_mm_q) << ',' << format_double(s.mean_mm_g) << ','
         << (mixed ? "mixed" : "crucial") << '\n';
    }
  }
  auto curve = [&](const char* file, const char* what, auto value, auto se) {
    auto os = open_out(out / file);
    os << "# config_hash=" << hash << '\n' << "# t " << what << " std_err\n";
    for (const auto& s : rows) {
      if (!s.full) os << s.t << ' ' << format_double(value(s)) << ' ' << format_double(se(s)) << '\n';
    }
  };
  curve("ratio_vs_t.txt", "ratio", [](const RunSummary& s) { return s.ratio; },
        [](const RunSummary& s) { return s.ratio_se; });
  curve("alg_ratio_vs_t.txt", "alg_ratio", [](const RunSummary& s) { return s.alg_ratio; },
        [](const RunSummary& s) { return s.alg_ratio_se; });
  {
    EstimateTable est = setup.estimates;
    est.q_hat = q_from_x(est.x_hat, cfg.t_values.back());
    auto os = open_out(out / "estimates.csv");
    os << "# config_hash=" << hash << " q_hat_t=" << cfg.t_values.back() << '\n';
    est.write_csv(os, g);
  }
  json sj;
  sj["config_hash"] = hash;
  sj["config"] = cfg.to_json();
  sj["config"].erase("workers");
  sj["config"].erase("out");
  sj["graph"] = {{"n", g.num_vertices()}, {"m", g.num_edges()}, {"token", hex64(g.token())}};
  sj["params"] = {{"epsilon", po.params.epsilon}, {"delta", po.params.delta}, {"p", po.params.p},
                  {"tau", po.params.tau},         {"eta", po.params.eta},     {"beta", po.params.beta},
                  {"gamma", po.params.gamma},     {"t_theory", po.params.t_theory}};
  sj["crucial_edges"] = setup.classes.crucial.indices();
  sj["law"] = setup.law->name();
  sj["rows"] = json::array();
  for (const auto& s : rows) sj["rows"].push_back(summary_json(s));
  write_json(out / "summary.json", sj);
}

int cmd_verify(const ExperimentConfig& cfg, bool negative_control, std::ostream& os) {
  if (!cfg.seed) throw Error("a seed is required (--seed or \"seed\" in the config)");
  SuiteOptions opt;
  opt.seed = *cfg.seed;
  opt.trials = cfg.runs;
  opt.workers = resolve_workers(cfg.workers);
  opt.negative_control = negative_control;
  std::vector<CheckReport> reports = run_default_suite(opt);
  if (cfg.graph.file || cfg.graph.builtin || cfg.graph.generate) {
    const StochasticGraph g = load_source(cfg);
    const std::uint64_t t = cfg.t_values.back();
    const std::string inst = "config graph t=" + std::to_string(t);
    reports.push_back(check_negative_association(g, t, cfg.runs, opt.seed, nullptr, inst));
    for (auto& r : check_query_plan_laws(g, inst, t, cfg.x_trials, cfg.runs, opt.seed)) {
      reports.push_back(std::move(r));
    }
  }
  const std::string hash = cfg.hash();
  print_table(os, reports);
  const bool failed = any_gated_failure(reports);
  os << (failed ? "gated failure" : "all gated checks pass") << '\n';
  const fs::path out(cfg.out);
  fs::create_directories(out);
  write_json(out / "verify.json", {{"config_hash", hash}, {"reports", reports_to_json(reports)}});
  auto txt = open_out(out / "verify.txt");
  txt << "# config_hash=" << hash << '\n';
  print_table(txt, reports);
  return failed ? 1 : 0;
}

// -------------------------------------------------------------------- main

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<int> workers;
  std::optional<std::uint64_t> t;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<double> tau;
  std::optional<std::string> out;
  std::optional<std::string> graph;
  std::optional<std::string> builtin;
  // generate only
  std::optional<std::size_t> n;
  std::optional<double> density;
  std::optional<std::string> weights;
  std::optional<std::string> probs;
  bool negative_control = false;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--seed", o.seed, "master seed");
  app->add_option("--trials", o.trials, "runs per t (run) or trials per check (verify)");
  app->add_option("--workers", o.workers, "worker threads (default: STOCHMATCH_WORKERS)");
  app->add_option("--t", o.t, "single number of plan rounds (replaces the t list)");
  app->add_option("--epsilon", o.epsilon, "epsilon");
  app->add_option("--delta", o.delta, "delta");
  app->add_option("--tau", o.tau, "crucial threshold override");
  app->add_option("--out", o.out, "output directory");
}

ExperimentConfig resolve(const Overrides& o, bool verify) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(o.config);
  if (verify && o.config.empty()) c.runs = 20000;
  if (o.seed) c.seed = o.seed;
  if (o.trials) c.runs = *o.trials;
  if (o.workers) c.workers = o.workers;
  if (o.t) c.t_values = {*o.t};
  if (o.epsilon) c.epsilon = *o.epsilon;
  if (o.delta) c.delta = *o.delta;
  if (o.tau) c.tau = o.tau;
  if (o.out) c.out = *o.out;
  if (o.graph || o.builtin) c.graph = GraphSource{};
  if (o.graph) c.graph.file = o.graph;
  if (o.builtin) c.graph.builtin = o.builtin;
  if (o.n) c.graph.n = *o.n;
  if (o.density) c.graph.density = *o.density;
  if (o.weights) c.graph.weights = *o.weights;
  if (o.probs) c.graph.probs = *o.probs;
  return c;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"stochastic weighted matching: query plans, VB matching, verification"};
  app.require_subcommand(1);
  Overrides o;

  auto* gen = app.add_subcommand("generate", "write a seeded random graph");
  add_common(gen, o);
  gen->add_option("--n", o.n, "vertices");
  gen->add_option("--density", o.density, "edge density in [0,1]");
  gen->add_option("--weights", o.weights, "weight law: const:C | uniform:A:B | exp:RATE");
  gen->add_option("--probs", o.probs, "probability law: const:C | uniform:A:B");

  auto* run = app.add_subcommand("run", "estimate, sparsify and run the pipeline over a t sweep");
  add_common(run, o);
  run->add_option("--graph", o.graph, "graph file")->check(CLI::ExistingFile);
  run->add_option("--builtin", o.builtin, "built-in graph: benchmark6 | relaxed8");

  auto* ver = app.add_subcommand("verify", "run the statistical verification suite");
  add_common(ver, o);
  ver->add_option("--graph", o.graph, "extra graph to check")->check(CLI::ExistingFile);
  ver->add_option("--builtin", o.builtin, "built-in graph: benchmark6 | relaxed8");
  ver->add_flag("--negative-control", o.negative_control,
                "add a fixture whose covariance is positive by construction");

  CLI11_PARSE(app, argc, argv);
  try {
    if (gen->parsed()) {
      const ExperimentConfig c = resolve(o, false);
      std::cout << cmd_generate(c) << '\n';
      return 0;
    }
    if (run->parsed()) {
      cmd_run(resolve(o, false), std::cout);
      return 0;
    }
    return cmd_verify(resolve(o, true), o.negative_control, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace stochmatch
