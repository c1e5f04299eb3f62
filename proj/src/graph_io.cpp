#include "stochmatch/graph_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace stochmatch {

namespace {

double parse_double(std::string_view s) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error("cannot parse number '" + std::string(s) + "'");
  }
  return x;
}

std::uint64_t parse_uint(std::string_view s) {
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error("cannot parse integer '" + std::string(s) + "'");
  }
  return x;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

// -------------------------------------------------------------------- Law

Law Law::parse(std::string_view spec) {
  const auto parts = split(spec, ':');
  Law law;
  if (parts[0] == "const" && parts.size() == 2) {
    law.kind = Kind::kConstant;
    law.a = law.b = parse_double(parts[1]);
  } else if (parts[0] == "uniform" && parts.size() == 3) {
    law.kind = Kind::kUniform;
    law.a = parse_double(parts[1]);
    law.b = parse_double(parts[2]);
    if (!(law.a <= law.b)) throw Error("uniform law needs A <= B");
  } else if (parts[0] == "exp" && parts.size() == 2) {
    law.kind = Kind::kExponential;
    law.a = parse_double(parts[1]);
    if (!(law.a > 0.0)) throw Error("exp law needs a positive rate");
  } else {
    throw Error("bad distribution spec '" + std::string(spec) + "'");
  }
  if (!std::isfinite(law.a) || !std::isfinite(law.b)) throw Error("law parameters must be finite");
  return law;
}

std::string Law::to_string() const {
  switch (kind) {
    case Kind::kConstant:
      return "const:" + format_double(a);
    case Kind::kUniform:
      return "uniform:" + format_double(a) + ":" + format_double(b);
    case Kind::kExponential:
      return "exp:" + format_double(a);
  }
  return {};
}

double Law::sample(Rng& rng) const {
  switch (kind) {
    case Kind::kConstant:
      return a;
    case Kind::kUniform:
      return a + (b - a) * rng.uniform();
    case Kind::kExponential:
      return -std::log1p(-rng.uniform()) / a;
  }
  return a;
}

StochasticGraph gen_random_graph(std::size_t n, double density, const Law& weight_law,
                                 const Law& prob_law, std::uint64_t seed) {
  if (!(density >= 0.0 && density <= 1.0)) throw Error("density must lie in [0,1]");
  if (weight_law.a < 0.0) throw Error("weight law can produce negative weights");
  switch (prob_law.kind) {
    case Law::Kind::kExponential:
      throw Error("probability law must be const or uniform");
    case Law::Kind::kConstant:
    case Law::Kind::kUniform:
      // uniform draws a + (b-a)U with U in [0,1), so a itself is reachable.
      if (!(prob_law.a > 0.0) || prob_law.b > 1.0) {
        throw Error("probability law can leave (0,1]");
      }
      break;
  }
  Rng rng(derive_seed(seed, fnv1a("gen-random-graph")));
  std::vector<Edge> edges;
  for (VertexId i = 0; i < n; ++i) {
    for (VertexId j = i + 1; j < n; ++j) {
      // Always draw three numbers so that the stream layout is independent of
      // which pairs are selected.
      const bool take = rng.uniform() < density;
      const double w = weight_law.sample(rng);
      const double p = prob_law.sample(rng);
      if (take) edges.push_back(Edge{i, j, w, p});
    }
  }
  return StochasticGraph(n, std::move(edges));
}

// ------------------------------------------------------------- text format

void write_graph(std::ostream& os, const StochasticGraph& g) {
  os << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) {
    os << e.u << ' ' << e.v << ' ' << format_double(e.w) << ' ' << format_double(e.p)
       << '\n';
  }
}

StochasticGraph read_graph(std::istream& is) {
  std::string line;
  auto next_line = [&](std::vector<std::string_view>& toks) {
    while (std::getline(is, line)) {
      toks = tokens(line);
      if (toks.empty() || toks[0].front() == '#') continue;
      return true;
    }
    return false;
  };
  std::vector<std::string_view> toks;
  if (!next_line(toks) || toks.size() != 2) throw Error("graph file: missing 'n m' header");
  const auto n = parse_uint(toks[0]);
  const auto m = parse_uint(toks[1]);
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    if (!next_line(toks) || toks.size() != 4) {
      throw Error("graph file: expected 'u v w p' on edge line " + std::to_string(i));
    }
    const auto u = parse_uint(toks[0]);
    const auto v = parse_uint(toks[1]);
    if (u >= n || v >= n) throw Error("graph file: vertex id out of range");
    edges.push_back(Edge{static_cast<VertexId>(u), static_cast<VertexId>(v),
                         parse_double(toks[2]), parse_double(toks[3])});
  }
  if (next_line(toks)) throw Error("graph file: trailing content after edge list");
  return StochasticGraph(n, std::move(edges));
}

std::string graph_to_string(const StochasticGraph& g) {
  std::ostringstream os;
  write_graph(os, g);
  return os.str();
}

StochasticGraph graph_from_string(std::string_view text) {
  std::istringstream is{std::string(text)};
  return read_graph(is);
}

StochasticGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file '" + path + "'");
  return read_graph(in);
}

void save_graph_file(const std::string& path, const StochasticGraph& g,
                     std::string_view header_comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write graph file '" + path + "'");
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  write_graph(out, g);
}

}  // namespace stochmatch
