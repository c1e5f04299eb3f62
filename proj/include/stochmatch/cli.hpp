#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stochmatch/graph.hpp"

namespace stochmatch {

// Graph source: exactly one of a file, a built-in name ("benchmark6",
// "relaxed8") or the random generator.
struct GraphSource {
  std::optional<std::string> file;
  std::optional<std::string> builtin;
  bool generate = false;
  std::size_t n = 6;
  double density = 0.5;
  std::string weights = "uniform:0:1";
  std::string probs = "uniform:0.2:1";
  std::optional<std::uint64_t> gen_seed;  // defaults to the master seed
};

// Precedence, lowest to highest: built-in defaults, the JSON config file,
// command-line flags. Workers fall back to STOCHMATCH_WORKERS, then to the
// OpenMP default.
struct ExperimentConfig {
  GraphSource graph;
  double epsilon = 0.1;
  double delta = 1.0 / 576.0;
  std::optional<double> tau;
  std::vector<std::uint64_t> t_values{1, 2, 4, 8};
  bool control = true;  // add the Q = E row
  std::uint64_t runs = 1000;
  std::uint64_t x_trials = 20000;
  std::uint64_t y_trials = 20000;
  std::uint64_t cond_trials = 2000;
  std::uint64_t pair_trials = 20000;
  std::string law = "auto";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out = "results";

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
  nlohmann::json to_json() const;
  // Checks budgets, parameter ranges and that a seed is present.
  void validate() const;
  // Hex digest of the canonical JSON without `workers` and `out`.
  std::string hash() const;
};

StochasticGraph load_source(const ExperimentConfig& cfg);

// Writes <out>/graph.txt. Returns the path.
std::string cmd_generate(const ExperimentConfig& cfg);

// Writes aggregate.csv, runs_t<T>.json (and runs_full.json), ratio_vs_t.txt,
// alg_ratio_vs_t.txt, estimates.csv and summary.json under <out>.
void cmd_run(const ExperimentConfig& cfg, std::ostream& log);

// Runs the verifier suite (plus per-graph checks when a graph is configured),
// prints the table, writes verify.json/verify.txt under <out>. Returns the
// process exit code.
int cmd_verify(const ExperimentConfig& cfg, bool negative_control, std::ostream& os);

int cli_main(int argc, char** argv);

}  // namespace stochmatch
