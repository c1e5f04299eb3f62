#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "stochmatch/graph.hpp"

namespace stochmatch {

// Distribution descriptor for weights or probabilities:
//   "const:C" | "uniform:A:B" | "exp:RATE" (exp only for weights).
struct Law {
  enum class Kind { kConstant, kUniform, kExponential };
  Kind kind = Kind::kConstant;
  double a = 1.0;
  double b = 1.0;

  static Law parse(std::string_view spec);
  std::string to_string() const;
  double sample(Rng& rng) const;
};

// Erdos-Renyi edge selection: each unordered pair {i<j}, in lexicographic
// order, becomes an edge with probability `density`; its weight and
// probability are then drawn from the given laws. Throws Error when the
// probability law can leave (0,1] or the weight law can go negative.
StochasticGraph gen_random_graph(std::size_t n, double density, const Law& weight_law,
                                 const Law& prob_law, std::uint64_t seed);

// Text format: "n m" header, then m lines "u v w p". Doubles are written in
// shortest round-trip form, so write -> read reproduces the graph bit for bit.
// Lines starting with '#' are comments and are skipped on read.
void write_graph(std::ostream& os, const StochasticGraph& g);
StochasticGraph read_graph(std::istream& is);
std::string graph_to_string(const StochasticGraph& g);
StochasticGraph graph_from_string(std::string_view text);

StochasticGraph load_graph_file(const std::string& path);
void save_graph_file(const std::string& path, const StochasticGraph& g,
                     std::string_view header_comment = {});

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

}  // namespace stochmatch
