#pragma once

// The benchmark engine: bias test, per-instance QAOA runs with a four-stage
// timing breakdown, success probability, max-p search and the scaling sweep
// with its stop rules.

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qpack/circuits.hpp"
#include "qpack/optim.hpp"
#include "qpack/problems.hpp"
#include "qpack/simkit.hpp"

namespace qpack {

/// Stage times in seconds from a steady clock. classical_s is whatever part
/// of total_s is not compile, communication or quantum time, so the four
/// stages add up to total_s up to rounding.
struct TimingBreakdown {
  double compile_s = 0.0;
  double classical_s = 0.0;
  double communication_s = 0.0;
  double quantum_s = 0.0;
  double total_s = 0.0;

  double stage_sum() const { return compile_s + classical_s + communication_s + quantum_s; }

  friend bool operator==(const TimingBreakdown&, const TimingBreakdown&) = default;
};

/// Allowed excess of stage_sum() over total_s.
inline constexpr double kTimingSlack = 1e-6;

struct BiasReport {
  std::uint32_t n_qubits = 0;
  std::uint64_t shots = 0;
  double ones_fraction = 0.5;
  double bias = 0.0;  // ones_fraction - 0.5
  double ci_halfwidth = 0.0;

  bool detected() const { return std::abs(bias) > ci_halfwidth; }

  friend bool operator==(const BiasReport&, const BiasReport&) = default;
};

/// H on every qubit, sample, pool the per-bit ones fraction. The CI is the
/// binomial 95% half-width 1.96 * sqrt(f (1 - f) / (n * shots)).
/// readout_flip turns each measured 1 into 0 with that probability; it is a
/// hook for exercising the detector, not a noise model.
BiasReport bias_test(std::uint32_t n, std::uint64_t shots, std::uint64_t seed,
                     double readout_flip = 0.0);

// ---------------------------------------------------------------------------
// Backend dispatch

/// What crosses the dispatch boundary: a serialized circuit and how to read
/// it out. Readout covers qubits 0..readout_qubits-1.
struct ExecutionRequest {
  std::vector<std::uint8_t> circuit;
  std::uint32_t readout_qubits = 0;
  std::uint64_t shots = 0;  // 0 asks for exact marginal probabilities
  std::uint64_t seed = 0;
};

struct ExecutionResponse {
  std::vector<std::uint8_t> payload;
  double quantum_s = 0.0;  // time the backend spent simulating and sampling
  std::uint64_t statevector_bytes = 0;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  virtual ExecutionResponse execute(const ExecutionRequest& request) = 0;
};

/// In-process dense state-vector backend.
class LocalSimulatorBackend final : public Backend {
 public:
  explicit LocalSimulatorBackend(std::uint32_t max_qubits = default_max_qubits());
  std::string name() const override { return "local-statevector"; }
  ExecutionResponse execute(const ExecutionRequest& request) override;

 private:
  std::uint32_t max_qubits_;
};

std::vector<std::uint8_t> encode_circuit(const Circuit& circuit);
Circuit decode_circuit(std::span<const std::uint8_t> bytes);

/// Decoded backend output: sorted (readout index, count) pairs when shots > 0,
/// otherwise a probability per readout index.
struct Measurement {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> counts;
  std::vector<double> probabilities;
  std::uint64_t statevector_bytes = 0;
};

/// Serialize, execute, deserialize. Adds the dispatch time minus the
/// backend's own time to *communication_s and the backend time to *quantum_s.
Measurement dispatch(Backend& backend, const Circuit& circuit, std::uint32_t readout_qubits,
                     std::uint64_t shots, std::uint64_t seed, double* communication_s,
                     double* quantum_s);

// ---------------------------------------------------------------------------
// Single instances

/// The QAOA circuit for an instance: MCP and DSP from the graph, TSP from the
/// weight matrix with `tsp` options.
BuiltCircuit build_qaoa_circuit(const ProblemInstance& inst, const QaoaParams& params,
                                const TspCircuitOptions& tsp = {},
                                std::uint32_t max_qubits = default_max_qubits());

/// Classical value of each readout basis index: cut size (MCP), dominated
/// count plus size reward (DSP), Ising energy including the column penalty
/// (TSP). Indexed by the problem-qubit bits.
std::vector<double> value_table(const ProblemInstance& inst, const TspCircuitOptions& tsp = {});

/// +1 when larger values are better (MCP, DSP), -1 for TSP.
double value_sense(App app);

/// Exact QAOA objective (sense-adjusted, larger is better) without timing or
/// dispatch; for landscape scans and tests.
class ExactLandscape {
 public:
  ExactLandscape(ProblemInstance inst, TspCircuitOptions tsp = {},
                 std::uint32_t max_qubits = default_max_qubits());

  const ProblemInstance& instance() const { return inst_; }
  double score(const QaoaParams& params) const;

 private:
  ProblemInstance inst_;
  TspCircuitOptions tsp_;
  std::uint32_t max_qubits_;
  std::vector<double> table_;
};

/// Angle bounds in the flat [gammas, betas] layout.
std::vector<Bound> qaoa_bounds(std::size_t p);

/// Best p=1 point on a grid_points x grid_points grid over [0,2pi] x [0,pi].
QaoaParams grid_search_p1(const ExactLandscape& landscape, std::uint32_t grid_points);

/// Grid-assisted optimum at depth p. p = 1 starts Nelder-Mead from the grid
/// maximum; deeper levels start from `warm` padded with a zero-angle layer
/// (an identity layer, so the result never scores below `warm`).
struct DepthOptimum {
  QaoaParams params;
  double score = 0.0;
};
DepthOptimum optimize_depth(const ExactLandscape& landscape, std::uint32_t p,
                            const std::optional<QaoaParams>& warm, const OptConfig& cfg,
                            std::uint32_t grid_points = 24);

struct RunConfig {
  std::uint32_t p = 1;
  std::uint64_t shots = 100;
  OptimizerSpec optimizer;
  OptConfig opt;
  /// Objective evaluations use exact marginal probabilities instead of shots.
  bool exact_expectation = false;
  std::uint32_t max_qubits = default_max_qubits();
  TspCircuitOptions tsp;
  /// Starting angles in the flat layout; empty means a seeded random point.
  std::vector<double> x0;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

void validate(const RunConfig& cfg);

struct InstanceResult {
  App app = App::MCP;
  std::uint32_t n = 0;
  std::uint32_t p = 1;
  std::uint64_t shots = 0;
  std::string optimizer;
  /// Expectation of the problem value at the optimized angles, in the
  /// problem's own sense (cut size, DSP score, tour energy).
  double expectation_best = 0.0;
  double r_opt = 0.0;
  double r_clauses = 0.0;
  bool success = false;
  double oracle_optimum = 0.0;
  std::string modal;
  std::vector<double> angles;
  std::uint64_t evals = 0;
  std::uint32_t qubits = 0;
  std::uint64_t statevector_bytes = 0;
  TimingBreakdown timings;
  std::uint64_t seed = 0;
};

/// One hybrid run: optimizer over the angles, each evaluation dispatched to
/// the backend, then a final sampling at the best angles. The instance seed
/// drives the optimizer and sampling streams. Throws CapacityError when the
/// circuit does not fit and ConfigurationError when no exact oracle covers
/// the instance size.
/// `seed` defaults to the instance seed.
InstanceResult run_instance(const ProblemInstance& inst, const RunConfig& cfg, Backend& backend,
                            std::optional<std::uint64_t> seed = std::nullopt);
InstanceResult run_instance(const ProblemInstance& inst, const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Sizes, depth search, sweeps

/// Aggregate over the runs at one size.
struct SizeRecord {
  std::uint32_t n = 0;
  std::uint32_t p = 1;
  std::uint32_t runs = 0;
  std::uint32_t qubits = 0;
  double success_probability = 0.0;
  double mean_r_opt = 0.0;
  double mean_expectation = 0.0;
  TimingBreakdown mean_timings;
  std::uint64_t peak_statevector_bytes = 0;

  friend bool operator==(const SizeRecord&, const SizeRecord&) = default;
};

/// Run r of a size uses seed base_seed + r for its optimizer and sampling
/// streams. Its instance is generated from the same seed, or from base_seed
/// for every r when pinned.
struct RepetitionPlan {
  std::uint32_t runs = 1;
  std::uint64_t base_seed = 1;
  bool pin_instance = false;
  /// Use this instance for every run instead of generating one.
  std::optional<ProblemInstance> fixed;
};

ProblemInstance repetition_instance(App app, std::uint32_t n, const RepetitionPlan& plan,
                                    std::uint32_t run);

SizeRecord evaluate_size(App app, std::uint32_t n, const RepetitionPlan& plan,
                         const RunConfig& cfg, Backend& backend);

/// Fraction of successful runs from evaluate_size.
double success_probability(App app, std::uint32_t n, const RepetitionPlan& plan,
                           const RunConfig& cfg, Backend& backend);

struct MaxPResult {
  std::uint32_t p_star = 1;
  std::vector<double> trace;  // best value at p = 1, 2, ...
};

inline constexpr std::uint32_t kDefaultPCap = 8;

/// Raises p from 1 until the best value fails to improve on the previous
/// depth by more than tol, or p reaches cap. p_star is the last improving p.
MaxPResult find_max_p(const std::function<double(std::uint32_t)>& best_at_p, std::uint32_t cap,
                      double tol);

/// Instance form on the exact landscape, warm-starting each depth from the
/// previous optimum.
MaxPResult find_max_p(const ProblemInstance& inst, const RunConfig& cfg,
                      std::uint32_t cap = kDefaultPCap, double tol = 1e-3);

enum class StopReason { QubitLimit, SuccessBelowHalf, SizeCap };

std::string_view stop_reason_name(StopReason reason);  // qubit_limit, ...
StopReason stop_reason_from_name(std::string_view name);

struct ScalingReport {
  App app = App::MCP;
  std::uint32_t p = 1;
  std::vector<SizeRecord> sizes;
  StopReason stop_reason = StopReason::SizeCap;

  friend bool operator==(const ScalingReport&, const ScalingReport&) = default;
};

using SizeEvaluator = std::function<SizeRecord(std::uint32_t n)>;
using QubitCounter = std::function<std::uint32_t(std::uint32_t n)>;

/// The sweep loop. For n = n_min, n_min+1, ...: stop with size_cap past
/// size_cap, with qubit_limit when qubits_for(n) exceeds max_qubits,
/// otherwise evaluate and stop with success_below_half when the success
/// probability is strictly below 0.5.
ScalingReport scaling_sweep(App app, std::uint32_t p, std::uint32_t n_min, std::uint32_t size_cap,
                            std::uint32_t max_qubits, const QubitCounter& qubits_for,
                            const SizeEvaluator& evaluate);

enum class PPolicy { Fixed, Sweep, Auto };

std::string_view p_policy_name(PPolicy policy);  // fixed, sweep, auto
PPolicy p_policy_from_name(std::string_view name);

struct BenchConfig {
  std::vector<App> apps = {App::MCP, App::DSP, App::TSP};
  std::uint32_t n_min = 3;
  std::uint32_t n_max = 8;  // size cap, mandatory
  PPolicy p_policy = PPolicy::Sweep;
  std::uint32_t p_fixed = 1;
  std::vector<std::uint32_t> p_sweep = {1, 2, 3, 4};
  std::uint32_t p_cap = kDefaultPCap;
  double p_tol = 1e-3;
  std::uint32_t runs = 30;
  std::uint64_t seed = 1;
  bool pin_instance = false;
  /// Benchmark this instance instead of generated ones (single size).
  std::optional<ProblemInstance> problem;
  std::uint32_t bias_qubits = 5;
  std::uint64_t bias_shots = 10000;
  RunConfig run;

  friend bool operator==(const BenchConfig&, const BenchConfig&) = default;
};

void validate(const BenchConfig& cfg);

/// The depths a sweep runs for an app under cfg's p policy. Auto resolves
/// p* with find_max_p on the n_min instance.
std::vector<std::uint32_t> resolve_depths(App app, const BenchConfig& cfg);

/// Real sweep for one app and depth.
ScalingReport scaling_sweep(App app, std::uint32_t p, const BenchConfig& cfg, Backend& backend);

struct BenchmarkReport;

/// Bias test, then a scaling sweep per app and depth.
BenchmarkReport full_benchmark(const BenchConfig& cfg, Backend& backend);
BenchmarkReport full_benchmark(const BenchConfig& cfg);

}  // namespace qpack
