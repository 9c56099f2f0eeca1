#include "qpack/problems.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <span>
#include <tuple>

#include "qpack/errors.hpp"
#include "qpack/random.hpp"
#include "qpack/simkit.hpp"

namespace qpack {

namespace {

std::vector<std::uint64_t> closed_neighborhood_masks(const Graph& graph) {
  std::vector<std::uint64_t> masks(graph.n);
  for (std::uint32_t v = 0; v < graph.n; ++v) masks[v] = std::uint64_t{1} << v;
  for (const Edge& e : graph.edges) {
    masks[e.u] |= std::uint64_t{1} << e.v;
    masks[e.v] |= std::uint64_t{1} << e.u;
  }
  return masks;
}

double dsp_cost_from_masks(std::span<const std::uint64_t> masks, std::uint32_t n, std::uint64_t z) {
  std::uint32_t dominated = 0;
  for (std::uint32_t v = 0; v < n; ++v) dominated += (z & masks[v]) != 0 ? 1U : 0U;
  const std::uint32_t selected = static_cast<std::uint32_t>(std::popcount(z));
  return static_cast<double>(dominated) +
         static_cast<double>(n - selected) / static_cast<double>(n + 1);
}

void require_length(std::string_view bits, std::size_t expected, const char* what) {
  if (bits.size() != expected) {
    throw ValidationError(std::string(what) + ": bitstring has length " +
                          std::to_string(bits.size()) + ", expected " + std::to_string(expected));
  }
}

template <typename BitAt>
std::optional<double> tour_length(const TspInstance& inst, BitAt bit) {
  const std::uint32_t n = inst.n;
  std::vector<std::uint32_t> city(n);
  std::vector<bool> used(n, false);
  for (std::uint32_t t = 0; t < n; ++t) {
    std::uint32_t ones = 0;
    for (std::uint32_t c = 0; c < n; ++c) {
      if (bit(t * n + c)) {
        ++ones;
        city[t] = c;
      }
    }
    if (ones != 1 || used[city[t]]) return std::nullopt;
    used[city[t]] = true;
  }
  double length = 0.0;
  for (std::uint32_t t = 0; t < n; ++t) length += inst.at(city[t], city[(t + 1) % n]);
  return length;
}

Graph read_graph_body(std::istream& in, std::uint32_t n, std::size_t m) {
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Edge e;
    if (!(in >> e.u >> e.v >> e.w)) {
      throw ValidationError("graph file: expected " + std::to_string(m) + " edge lines, got " +
                            std::to_string(i));
    }
    edges.push_back(e);
  }
  return make_graph(n, std::move(edges));
}

}  // namespace

std::vector<std::uint32_t> Graph::closed_neighborhood(std::uint32_t v) const {
  std::vector<std::uint32_t> out{v};
  for (const Edge& e : edges) {
    if (e.u == v) out.push_back(e.v);
    if (e.v == v) out.push_back(e.u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void validate(const Graph& graph) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const Edge& e : graph.edges) {
    detail::require(e.u < graph.n && e.v < graph.n, "graph: edge endpoint out of range");
    detail::require(e.u != e.v, "graph: self-loop on vertex " + std::to_string(e.u));
    detail::require(std::isfinite(e.w) && e.w > 0.0, "graph: edge weights must be finite and > 0");
    const auto key = std::minmax(e.u, e.v);
    detail::require(seen.insert(key).second, "graph: duplicate edge " + std::to_string(key.first) +
                                                 "-" + std::to_string(key.second));
  }
}

Graph make_graph(std::uint32_t n, std::vector<Edge> edges) {
  for (Edge& e : edges) {
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });
  Graph g{n, std::move(edges)};
  validate(g);
  return g;
}

bool is_connected(const Graph& graph) {
  if (graph.n == 0) return true;
  std::vector<std::uint32_t> parent(graph.n);
  for (std::uint32_t i = 0; i < graph.n; ++i) parent[i] = i;
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::uint32_t components = graph.n;
  for (const Edge& e : graph.edges) {
    const auto a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

void validate(const TspInstance& inst) {
  detail::require(inst.weights.size() == std::size_t{inst.n} * inst.n,
                  "tsp: weight matrix must be n x n");
  for (std::uint32_t i = 0; i < inst.n; ++i) {
    detail::require(inst.at(i, i) == 0.0, "tsp: diagonal must be zero");
    for (std::uint32_t j = 0; j < inst.n; ++j) {
      const double w = inst.at(i, j);
      detail::require(std::isfinite(w) && w >= 0.0, "tsp: weights must be finite and >= 0");
      detail::require(w == inst.at(j, i), "tsp: weight matrix must be symmetric");
    }
  }
}

std::string_view app_name(App app) {
  switch (app) {
    case App::MCP:
      return "maxcut";
    case App::DSP:
      return "dsp";
    case App::TSP:
      return "tsp";
  }
  return "?";
}

App app_from_name(std::string_view name) {
  if (name == "maxcut" || name == "mcp") return App::MCP;
  if (name == "dsp") return App::DSP;
  if (name == "tsp") return App::TSP;
  throw ValidationError("unknown application '" + std::string(name) + "'");
}

const Graph& ProblemInstance::graph() const {
  if (const auto* g = std::get_if<Graph>(&payload); g != nullptr && app != App::TSP) return *g;
  throw ValidationError("problem instance does not carry a graph");
}

const TspInstance& ProblemInstance::tsp() const {
  if (const auto* t = std::get_if<TspInstance>(&payload); t != nullptr && app == App::TSP) return *t;
  throw ValidationError("problem instance does not carry a TSP matrix");
}

std::uint32_t ProblemInstance::size() const {
  return app == App::TSP ? tsp().n : graph().n;
}

Graph generate_graph(std::uint32_t n, std::uint64_t seed) { return generate_graph(n, n, seed); }

Graph generate_graph(std::uint32_t n, std::uint32_t m, std::uint64_t seed) {
  detail::require(n >= 3, "generate_graph: need at least 3 vertices");
  const std::uint64_t max_edges = std::uint64_t{n} * (n - 1) / 2;
  detail::require(m >= n - 1 && m <= max_edges,
                  "generate_graph: edge count must lie in [n-1, n(n-1)/2]");
  Rng rng(derive_seed(seed, n));

  // Decode a uniform Pruefer sequence into a spanning tree.
  std::vector<std::uint32_t> pruefer(n - 2);
  for (auto& x : pruefer) x = static_cast<std::uint32_t>(uniform_index(rng, n));
  std::vector<std::uint32_t> degree(n, 1);
  for (auto x : pruefer) ++degree[x];
  std::set<std::pair<std::uint32_t, std::uint32_t>> present;
  std::vector<Edge> edges;
  for (auto x : pruefer) {
    std::uint32_t leaf = 0;
    while (degree[leaf] != 1) ++leaf;
    edges.push_back({leaf, x, 1.0});
    present.insert(std::minmax(leaf, x));
    --degree[leaf];
    --degree[x];
  }
  std::uint32_t a = n, b = n;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (degree[v] == 1) (a == n ? a : b) = v;
  }
  edges.push_back({a, b, 1.0});
  present.insert(std::minmax(a, b));

  while (edges.size() < m) {
    const auto u = static_cast<std::uint32_t>(uniform_index(rng, n));
    const auto v = static_cast<std::uint32_t>(uniform_index(rng, n));
    if (u == v) continue;
    if (present.insert(std::minmax(u, v)).second) edges.push_back({u, v, 1.0});
  }
  return make_graph(n, std::move(edges));
}

TspInstance generate_tsp(std::uint32_t n, std::uint64_t seed) {
  detail::require(n >= 3, "generate_tsp: need at least 3 cities");
  Rng rng(derive_seed(seed, 0x7590000ULL + n));
  TspInstance inst{n, std::vector<double>(std::size_t{n} * n, 0.0)};
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      const double w = 1.0 + static_cast<double>(uniform_index(rng, 10));
      inst.weights[i * n + j] = w;
      inst.weights[j * n + i] = w;
    }
  }
  return inst;
}

ProblemInstance generate_instance(App app, std::uint32_t n, std::uint64_t seed) {
  ProblemInstance inst;
  inst.app = app;
  inst.seed = seed;
  if (app == App::TSP) {
    inst.payload = generate_tsp(n, seed);
  } else {
    inst.payload = generate_graph(n, seed);
  }
  return inst;
}

double maxcut_cost(const Graph& graph, std::string_view z) {
  require_length(z, graph.n, "maxcut_cost");
  double cut = 0.0;
  for (const Edge& e : graph.edges) {
    if (z[e.u] != z[e.v]) cut += e.w;
  }
  return cut;
}

double maxcut_cost_bits(const Graph& graph, std::uint64_t z) {
  double cut = 0.0;
  for (const Edge& e : graph.edges) {
    if (((z >> e.u) ^ (z >> e.v)) & 1U) cut += e.w;
  }
  return cut;
}

double dsp_cost(const Graph& graph, std::string_view z) {
  require_length(z, graph.n, "dsp_cost");
  return dsp_cost_bits(graph, from_bitstring(z));
}

double dsp_cost_bits(const Graph& graph, std::uint64_t z) {
  const auto masks = closed_neighborhood_masks(graph);
  return dsp_cost_from_masks(masks, graph.n, z);
}

std::optional<double> tsp_cost(const TspInstance& inst, std::string_view x) {
  require_length(x, std::size_t{inst.n} * inst.n, "tsp_cost");
  return tour_length(inst, [&](std::size_t i) { return x[i] == '1'; });
}

std::optional<double> tsp_cost_bits(const TspInstance& inst, std::uint64_t x) {
  return tour_length(inst, [&](std::size_t i) { return ((x >> i) & 1U) != 0; });
}

OracleResult brute_force_maxcut(const Graph& graph) {
  if (graph.n > kMaxExhaustiveVertices) {
    throw CapacityError("brute_force_maxcut: " + std::to_string(graph.n) +
                        " vertices exceeds exhaustive bound " +
                        std::to_string(kMaxExhaustiveVertices));
  }
  OracleResult result;
  result.optimum = -std::numeric_limits<double>::infinity();
  std::vector<std::uint64_t> best;
  for (std::uint64_t z = 0; z < (std::uint64_t{1} << graph.n); ++z) {
    const double c = maxcut_cost_bits(graph, z);
    if (c > result.optimum) {
      result.optimum = c;
      best.clear();
    }
    if (c == result.optimum) best.push_back(z);
  }
  for (auto z : best) result.witnesses.push_back(to_bitstring(z, graph.n));
  return result;
}

OracleResult brute_force_dsp(const Graph& graph) {
  if (graph.n > kMaxExhaustiveVertices) {
    throw CapacityError("brute_force_dsp: " + std::to_string(graph.n) +
                        " vertices exceeds exhaustive bound " +
                        std::to_string(kMaxExhaustiveVertices));
  }
  const auto masks = closed_neighborhood_masks(graph);
  OracleResult result;
  result.optimum = -std::numeric_limits<double>::infinity();
  std::vector<std::uint64_t> best;
  for (std::uint64_t z = 0; z < (std::uint64_t{1} << graph.n); ++z) {
    const double c = dsp_cost_from_masks(masks, graph.n, z);
    if (c > result.optimum) {
      result.optimum = c;
      best.clear();
    }
    if (c == result.optimum) best.push_back(z);
  }
  for (auto z : best) result.witnesses.push_back(to_bitstring(z, graph.n));
  return result;
}

OracleResult exact_tsp(const TspInstance& inst) {
  validate(inst);
  const std::uint32_t n = inst.n;
  if (n > kMaxHeldKarpCities) {
    throw CapacityError("exact_tsp: " + std::to_string(n) + " cities exceeds bound " +
                        std::to_string(kMaxHeldKarpCities));
  }
  detail::require(n >= 2, "exact_tsp: need at least 2 cities");
  // Subsets over cities 1..n-1; dp[mask][j] = shortest path 0 -> ... -> j visiting mask.
  const std::uint32_t k = n - 1;
  const std::size_t subsets = std::size_t{1} << k;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dp(subsets * k, kInf);
  std::vector<std::int32_t> prev(subsets * k, -1);
  for (std::uint32_t j = 0; j < k; ++j) dp[(std::size_t{1} << j) * k + j] = inst.at(0, j + 1);
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    for (std::uint32_t j = 0; j < k; ++j) {
      if (!((mask >> j) & 1U)) continue;
      const double base = dp[mask * k + j];
      if (base == kInf) continue;
      for (std::uint32_t nxt = 0; nxt < k; ++nxt) {
        if ((mask >> nxt) & 1U) continue;
        const std::size_t to = mask | (std::size_t{1} << nxt);
        const double cand = base + inst.at(j + 1, nxt + 1);
        if (cand < dp[to * k + nxt]) {
          dp[to * k + nxt] = cand;
          prev[to * k + nxt] = static_cast<std::int32_t>(j);
        }
      }
    }
  }
  const std::size_t full = subsets - 1;
  double best = kInf;
  std::uint32_t last = 0;
  for (std::uint32_t j = 0; j < k; ++j) {
    const double total = dp[full * k + j] + inst.at(j + 1, 0);
    if (total < best) {
      best = total;
      last = j;
    }
  }
  std::vector<std::uint32_t> tour(n, 0);
  std::size_t mask = full;
  std::int32_t cur = static_cast<std::int32_t>(last);
  for (std::uint32_t t = n - 1; t >= 1; --t) {
    tour[t] = static_cast<std::uint32_t>(cur) + 1;
    const std::int32_t p = prev[mask * k + cur];
    mask &= ~(std::size_t{1} << cur);
    cur = p;
  }
  std::string witness(std::size_t{n} * n, '0');
  for (std::uint32_t t = 0; t < n; ++t) witness[t * n + tour[t]] = '1';

  OracleResult result;
  result.optimum = best;
  result.method = OracleMethod::HeldKarp;
  result.witnesses.push_back(std::move(witness));
  return result;
}

OracleResult solve_exact(const ProblemInstance& inst) {
  switch (inst.app) {
    case App::MCP:
      return brute_force_maxcut(inst.graph());
    case App::DSP:
      return brute_force_dsp(inst.graph());
    case App::TSP:
      return exact_tsp(inst.tsp());
  }
  throw ValidationError("solve_exact: unknown application");
}

ApproximationRatio approximation_ratio(double found, double optimum, double m) {
  detail::require(optimum > 0.0, "approximation_ratio: optimum must be positive");
  detail::require(m > 0.0, "approximation_ratio: clause count must be positive");
  return {found / optimum, found / m};
}

void write_graph(std::ostream& out, const Graph& graph) {
  out << graph.n << ' ' << graph.m() << '\n';
  for (const Edge& e : graph.edges) out << e.u << ' ' << e.v << ' ' << e.w << '\n';
}

Graph read_graph(std::istream& in) {
  std::uint32_t n = 0;
  std::size_t m = 0;
  if (!(in >> n >> m)) throw ValidationError("graph file: missing 'n m' header");
  return read_graph_body(in, n, m);
}

void write_tsp(std::ostream& out, const TspInstance& inst) {
  out << inst.n << ' ' << std::size_t{inst.n} * (inst.n - 1) / 2 << '\n';
  for (std::uint32_t i = 0; i < inst.n; ++i) {
    for (std::uint32_t j = 0; j < inst.n; ++j) out << (j ? " " : "") << inst.at(i, j);
    out << '\n';
  }
}

TspInstance read_tsp(std::istream& in) {
  std::uint32_t n = 0;
  std::size_t m = 0;
  if (!(in >> n >> m)) throw ValidationError("tsp file: missing 'n m' header");
  TspInstance inst{n, std::vector<double>(std::size_t{n} * n)};
  for (auto& w : inst.weights) {
    if (!(in >> w)) throw ValidationError("tsp file: expected " + std::to_string(n * n) + " weights");
  }
  validate(inst);
  return inst;
}

}  // namespace qpack
