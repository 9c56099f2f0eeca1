#pragma once

// Benchmark problem instances, their classical cost functions and exact
// oracles.
//
// Bitstrings follow the simulator convention: character i is vertex i (MaxCut,
// DSP) or, for TSP, character t*n + c is "city c is visited at step t".

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qpack {

struct Edge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  double w = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Simple weighted undirected graph. Edges are stored with u < v, sorted.
struct Graph {
  std::uint32_t n = 0;
  std::vector<Edge> edges;

  std::size_t m() const { return edges.size(); }
  /// Closed neighbourhood N[v] = {v} + neighbours, ascending.
  std::vector<std::uint32_t> closed_neighborhood(std::uint32_t v) const;

  friend bool operator==(const Graph&, const Graph&) = default;
};

/// Throws ValidationError on self-loops, duplicates, bad indices or weights.
void validate(const Graph& graph);
/// Builds, canonicalizes (u < v, sorted) and validates.
Graph make_graph(std::uint32_t n, std::vector<Edge> edges);
bool is_connected(const Graph& graph);

struct TspInstance {
  std::uint32_t n = 0;
  std::vector<double> weights;  // row-major n x n

  double at(std::uint32_t i, std::uint32_t j) const { return weights[i * n + j]; }

  friend bool operator==(const TspInstance&, const TspInstance&) = default;
};

void validate(const TspInstance& inst);

enum class App { MCP, DSP, TSP };

std::string_view app_name(App app);  // "maxcut", "dsp", "tsp"
App app_from_name(std::string_view name);

struct ProblemInstance {
  App app = App::MCP;
  std::variant<Graph, TspInstance> payload;
  std::uint64_t seed = 0;

  const Graph& graph() const;
  const TspInstance& tsp() const;
  /// Vertex count or city count.
  std::uint32_t size() const;

  friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;
};

/// Connected graph with n vertices and exactly n unit-weight edges: a uniform
/// random spanning tree (Pruefer sequence) plus uniformly chosen extra edges.
/// Requires n >= 3.
Graph generate_graph(std::uint32_t n, std::uint64_t seed);
/// Same construction with an arbitrary edge count n-1 <= m <= n(n-1)/2.
Graph generate_graph(std::uint32_t n, std::uint32_t m, std::uint64_t seed);

/// Complete symmetric instance with integer weights uniform in [1, 10].
TspInstance generate_tsp(std::uint32_t n, std::uint64_t seed);

ProblemInstance generate_instance(App app, std::uint32_t n, std::uint64_t seed);

// Cost evaluators. The *_bits forms take a basis index (bit i = character i)
// and skip length validation; they are what the oracles and simulators use.

double maxcut_cost(const Graph& graph, std::string_view z);
double maxcut_cost_bits(const Graph& graph, std::uint64_t z);

/// Number of dominated vertices plus 1/(n+1) per unselected vertex.
double dsp_cost(const Graph& graph, std::string_view z);
double dsp_cost_bits(const Graph& graph, std::uint64_t z);

/// Cyclic tour length, or nullopt if x is not a permutation matrix.
std::optional<double> tsp_cost(const TspInstance& inst, std::string_view x);
std::optional<double> tsp_cost_bits(const TspInstance& inst, std::uint64_t x);

enum class OracleMethod { Exhaustive, HeldKarp };

struct OracleResult {
  double optimum = 0.0;
  std::vector<std::string> witnesses;
  OracleMethod method = OracleMethod::Exhaustive;
};

inline constexpr std::uint32_t kMaxExhaustiveVertices = 24;
inline constexpr std::uint32_t kMaxHeldKarpCities = 14;

OracleResult brute_force_maxcut(const Graph& graph);
OracleResult brute_force_dsp(const Graph& graph);
/// Held-Karp. The witness is the optimal tour starting at city 0 at step 0.
OracleResult exact_tsp(const TspInstance& inst);
/// Dispatches on the instance's application.
OracleResult solve_exact(const ProblemInstance& inst);

struct ApproximationRatio {
  double r_opt = 0.0;      // found / optimum
  double r_clauses = 0.0;  // found / clause count
};

ApproximationRatio approximation_ratio(double found, double optimum, double m);

// Plain-text instance files: a header line "n m", then one "u v w" line per
// edge. TSP files carry "n m" with m = n(n-1)/2, then n rows of n weights.
void write_graph(std::ostream& out, const Graph& graph);
Graph read_graph(std::istream& in);
void write_tsp(std::ostream& out, const TspInstance& inst);
TspInstance read_tsp(std::istream& in);

}  // namespace qpack
