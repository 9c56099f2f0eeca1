#include "qpack/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <numbers>

#include "qpack/errors.hpp"
#include "qpack/random.hpp"
#include "qpack/report.hpp"

namespace qpack {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Byte buffers are written in host order; both ends live in one process.
class Writer {
 public:
  template <typename T>
  void put(T value) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    bytes.insert(bytes.end(), p, p + sizeof(T));
  }
  std::vector<std::uint8_t> bytes;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw ValidationError("decode: truncated buffer");
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_oracle_bounds(const ProblemInstance& inst) {
  const std::uint32_t n = inst.size();
  if (inst.app == App::TSP ? n > kMaxHeldKarpCities : n > kMaxExhaustiveVertices) {
    throw ConfigurationError("no exact oracle for " + std::string(app_name(inst.app)) +
                             " at n=" + std::to_string(n));
  }
}

bool oracle_covers(App app, std::uint32_t n) {
  return app == App::TSP ? n <= kMaxHeldKarpCities : n <= kMaxExhaustiveVertices;
}

std::uint32_t readout_width(const ProblemInstance& inst) {
  return inst.app == App::TSP ? inst.size() * inst.size() : inst.size();
}

// Most frequent outcome; ties go to the lexicographically smallest bitstring.
std::string modal_bitstring(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& counts,
                            std::uint32_t width) {
  std::string best;
  std::uint64_t best_count = 0;
  for (const auto& [idx, c] : counts) {
    std::string bits = to_bitstring(idx, width);
    if (c > best_count || (c == best_count && bits < best)) {
      best = std::move(bits);
      best_count = c;
    }
  }
  return best;
}

TimingBreakdown mean_of(const std::vector<TimingBreakdown>& ts) {
  TimingBreakdown m;
  if (ts.empty()) return m;
  for (const auto& t : ts) {
    m.compile_s += t.compile_s;
    m.classical_s += t.classical_s;
    m.communication_s += t.communication_s;
    m.quantum_s += t.quantum_s;
    m.total_s += t.total_s;
  }
  const double k = static_cast<double>(ts.size());
  m.compile_s /= k;
  m.classical_s /= k;
  m.communication_s /= k;
  m.quantum_s /= k;
  m.total_s /= k;
  return m;
}

}  // namespace

BiasReport bias_test(std::uint32_t n, std::uint64_t shots, std::uint64_t seed,
                     double readout_flip) {
  detail::require(n >= 1, "bias_test: need at least one qubit");
  detail::require(shots >= 100, "bias_test: need at least 100 shots");
  detail::require(readout_flip >= 0.0 && readout_flip <= 1.0,
                  "bias_test: readout flip rate must be in [0, 1]");
  Circuit c(n);
  for (Qubit q = 0; q < n; ++q) c.h(q);
  StateVector state = new_state(n);
  run_circuit(state, c);
  const auto outcomes = sample_indices(state, shots, derive_seed(seed, 0xb1a5));
  Rng flips(derive_seed(seed, 0xf11b));
  std::uint64_t ones = 0;
  for (std::uint64_t idx : outcomes) {
    for (Qubit q = 0; q < n; ++q) {
      if (((idx >> q) & 1U) == 0) continue;
      if (readout_flip > 0.0 && uniform01(flips) < readout_flip) continue;
      ++ones;
    }
  }
  const double total = static_cast<double>(n) * static_cast<double>(shots);
  BiasReport r;
  r.n_qubits = n;
  r.shots = shots;
  r.ones_fraction = static_cast<double>(ones) / total;
  r.bias = r.ones_fraction - 0.5;
  r.ci_halfwidth = 1.96 * std::sqrt(r.ones_fraction * (1.0 - r.ones_fraction) / total);
  return r;
}

// ---------------------------------------------------------------------------
// Dispatch

LocalSimulatorBackend::LocalSimulatorBackend(std::uint32_t max_qubits) : max_qubits_(max_qubits) {}

std::vector<std::uint8_t> encode_circuit(const Circuit& circuit) {
  Writer w;
  w.put<std::uint32_t>(circuit.n_qubits());
  w.put<std::uint64_t>(circuit.size());
  for (const Gate& g : circuit.gates()) {
    w.put<std::uint8_t>(static_cast<std::uint8_t>(g.kind));
    for (Qubit q : g.qubits) w.put<std::uint32_t>(q);
    w.put<double>(g.angle);
  }
  return std::move(w.bytes);
}

Circuit decode_circuit(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  Circuit c(r.get<std::uint32_t>());
  const auto count = r.get<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto raw = r.get<std::uint8_t>();
    detail::require(raw < kAllGateKinds.size(), "decode_circuit: unknown gate kind");
    Gate g;
    g.kind = static_cast<GateKind>(raw);
    for (Qubit& q : g.qubits) q = r.get<std::uint32_t>();
    g.angle = r.get<double>();
    c.add(g);
  }
  detail::require(r.done(), "decode_circuit: trailing bytes");
  return c;
}

ExecutionResponse LocalSimulatorBackend::execute(const ExecutionRequest& request) {
  const Circuit circuit = decode_circuit(request.circuit);
  detail::require(request.readout_qubits >= 1 && request.readout_qubits <= circuit.n_qubits(),
                  "execute: readout width out of range");
  const std::uint64_t mask = (std::uint64_t{1} << request.readout_qubits) - 1;

  const auto start = Clock::now();
  StateVector state = new_state(circuit.n_qubits(), max_qubits_);
  run_circuit(state, circuit);
  std::map<std::uint64_t, std::uint64_t> tally;
  std::vector<double> marginal;
  if (request.shots > 0) {
    for (std::uint64_t idx : sample_indices(state, request.shots, request.seed)) ++tally[idx & mask];
  } else {
    marginal.assign(mask + 1, 0.0);
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) marginal[i & mask] += std::norm(amps[i]);
  }
  ExecutionResponse response;
  response.quantum_s = seconds_since(start);
  response.statevector_bytes = state.bytes();

  Writer w;
  if (request.shots > 0) {
    w.put<std::uint64_t>(tally.size());
    for (const auto& [idx, c] : tally) {
      w.put<std::uint64_t>(idx);
      w.put<std::uint64_t>(c);
    }
  } else {
    w.put<std::uint64_t>(marginal.size());
    for (double p : marginal) w.put<double>(p);
  }
  response.payload = std::move(w.bytes);
  return response;
}

Measurement dispatch(Backend& backend, const Circuit& circuit, std::uint32_t readout_qubits,
                     std::uint64_t shots, std::uint64_t seed, double* communication_s,
                     double* quantum_s) {
  const auto start = Clock::now();
  ExecutionRequest request{encode_circuit(circuit), readout_qubits, shots, seed};
  const ExecutionResponse response = backend.execute(request);
  Measurement m;
  m.statevector_bytes = response.statevector_bytes;
  Reader r(response.payload);
  const auto count = r.get<std::uint64_t>();
  if (shots > 0) {
    m.counts.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      const auto idx = r.get<std::uint64_t>();
      const auto c = r.get<std::uint64_t>();
      m.counts.emplace_back(idx, c);
    }
  } else {
    m.probabilities.resize(count);
    for (double& p : m.probabilities) p = r.get<double>();
  }
  const double elapsed = seconds_since(start);
  if (quantum_s != nullptr) *quantum_s += response.quantum_s;
  if (communication_s != nullptr) *communication_s += std::max(0.0, elapsed - response.quantum_s);
  return m;
}

// ---------------------------------------------------------------------------
// Instances

BuiltCircuit build_qaoa_circuit(const ProblemInstance& inst, const QaoaParams& params,
                                const TspCircuitOptions& tsp, std::uint32_t max_qubits) {
  const std::uint32_t need = required_qubits(inst, tsp);
  if (need > std::min(max_qubits, kHardQubitLimit)) {
    throw CapacityError(std::string(app_name(inst.app)) + " n=" + std::to_string(inst.size()) +
                        " needs " + std::to_string(need) + " qubits, capacity is " +
                        std::to_string(std::min(max_qubits, kHardQubitLimit)));
  }
  switch (inst.app) {
    case App::MCP: {
      const std::uint32_t n = inst.graph().n;
      return {build_maxcut_circuit(inst.graph(), params), {n, 0, n}};
    }
    case App::DSP:
      return build_dsp_circuit(inst.graph(), params);
    case App::TSP:
      return build_tsp_circuit(inst.tsp(), params, tsp, max_qubits);
  }
  throw ValidationError("build_qaoa_circuit: unknown app");
}

std::vector<double> value_table(const ProblemInstance& inst, const TspCircuitOptions& tsp) {
  const std::uint32_t width = readout_width(inst);
  if (width > kHardQubitLimit) throw CapacityError("value_table: readout register too wide");
  std::vector<double> table(std::size_t{1} << width);
  switch (inst.app) {
    case App::MCP:
      for (std::size_t z = 0; z < table.size(); ++z) table[z] = maxcut_cost_bits(inst.graph(), z);
      break;
    case App::DSP:
      for (std::size_t z = 0; z < table.size(); ++z) table[z] = dsp_cost_bits(inst.graph(), z);
      break;
    case App::TSP: {
      const double penalty = resolved_column_penalty(inst.tsp(), tsp);
      for (std::size_t x = 0; x < table.size(); ++x) table[x] = tsp_energy_bits(inst.tsp(), penalty, x);
      break;
    }
  }
  return table;
}

double value_sense(App app) { return app == App::TSP ? -1.0 : 1.0; }

ExactLandscape::ExactLandscape(ProblemInstance inst, TspCircuitOptions tsp, std::uint32_t max_qubits)
    : inst_(std::move(inst)), tsp_(tsp), max_qubits_(max_qubits), table_(value_table(inst_, tsp_)) {}

double ExactLandscape::score(const QaoaParams& params) const {
  const BuiltCircuit built = build_qaoa_circuit(inst_, params, tsp_, max_qubits_);
  StateVector state = new_state(built.layout.total, max_qubits_);
  run_circuit(state, built.circuit);
  return value_sense(inst_.app) * expectation_diagonal(state, table_);
}

std::vector<Bound> qaoa_bounds(std::size_t p) {
  detail::require(p >= 1, "qaoa_bounds: p must be at least 1");
  std::vector<Bound> b(2 * p);
  for (std::size_t i = 0; i < p; ++i) {
    b[i] = {0.0, kTwoPi};
    b[p + i] = {0.0, std::numbers::pi};
  }
  return b;
}

QaoaParams grid_search_p1(const ExactLandscape& landscape, std::uint32_t grid_points) {
  detail::require(grid_points >= 2, "grid_search_p1: need at least 2 grid points");
  QaoaParams best{{0.0}, {0.0}};
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::uint32_t i = 0; i < grid_points; ++i) {
    for (std::uint32_t j = 0; j < grid_points; ++j) {
      const QaoaParams q{{kTwoPi * i / (grid_points - 1)}, {std::numbers::pi * j / (grid_points - 1)}};
      const double s = landscape.score(q);
      if (s > best_score) {
        best_score = s;
        best = q;
      }
    }
  }
  return best;
}

DepthOptimum optimize_depth(const ExactLandscape& landscape, std::uint32_t p,
                            const std::optional<QaoaParams>& warm, const OptConfig& cfg,
                            std::uint32_t grid_points) {
  detail::require(p >= 1, "optimize_depth: p must be at least 1");
  QaoaParams start = warm ? *warm : grid_search_p1(landscape, grid_points);
  detail::require(start.p() <= p, "optimize_depth: warm start deeper than p");
  while (start.p() < p) {
    start.gammas.push_back(0.0);
    start.betas.push_back(0.0);
  }
  Objective obj(qaoa_bounds(p), [&](std::span<const double> x) {
    return -landscape.score(QaoaParams::from_vector(x));
  });
  const OptResult r = nelder_mead(obj, start.to_vector(), cfg);
  return {QaoaParams::from_vector(r.x_best), -r.f_best};
}

void validate(const RunConfig& cfg) {
  detail::require(cfg.p >= 1, "run config: p must be at least 1");
  detail::require(cfg.shots >= 1, "run config: shots must be at least 1");
  detail::require(cfg.max_qubits >= 1, "run config: max_qubits must be positive");
  detail::require(cfg.x0.empty() || cfg.x0.size() == 2 * cfg.p,
                  "run config: x0 must hold 2p angles");
  validate(cfg.opt);
}

InstanceResult run_instance(const ProblemInstance& inst, const RunConfig& cfg, Backend& backend,
                            std::optional<std::uint64_t> seed) {
  validate(cfg);
  const std::uint32_t qubits = required_qubits(inst, cfg.tsp);
  if (qubits > std::min(cfg.max_qubits, kHardQubitLimit)) {
    throw CapacityError(std::string(app_name(inst.app)) + " n=" + std::to_string(inst.size()) +
                        " needs " + std::to_string(qubits) + " qubits, capacity is " +
                        std::to_string(std::min(cfg.max_qubits, kHardQubitLimit)));
  }
  check_oracle_bounds(inst);
  const OracleResult oracle = solve_exact(inst);
  const std::uint64_t run_seed = seed.value_or(inst.seed);
  const std::uint32_t width = readout_width(inst);
  const double sense = value_sense(inst.app);

  InstanceResult res;
  res.app = inst.app;
  res.n = inst.size();
  res.p = cfg.p;
  res.shots = cfg.shots;
  res.optimizer = std::string(optimizer_name(cfg.optimizer.kind));
  res.oracle_optimum = oracle.optimum;
  res.qubits = qubits;
  res.seed = run_seed;

  TimingBreakdown t;
  const auto start = Clock::now();
  const std::vector<double> table = value_table(inst, cfg.tsp);

  auto mean_value = [&](const Measurement& m) {
    if (!m.probabilities.empty()) {
      double e = 0.0;
      for (std::size_t i = 0; i < m.probabilities.size(); ++i) e += m.probabilities[i] * table[i];
      return e;
    }
    double sum = 0.0;
    std::uint64_t shots = 0;
    for (const auto& [idx, c] : m.counts) {
      sum += static_cast<double>(c) * table[idx];
      shots += c;
    }
    return sum / static_cast<double>(shots);
  };
  auto build = [&](std::span<const double> x) {
    const auto c0 = Clock::now();
    BuiltCircuit b = build_qaoa_circuit(inst, QaoaParams::from_vector(x), cfg.tsp, cfg.max_qubits);
    t.compile_s += seconds_since(c0);
    return b;
  };

  const std::uint64_t eval_stream = derive_seed(run_seed, 3);
  std::uint64_t eval_index = 0;
  Objective obj(qaoa_bounds(cfg.p), [&](std::span<const double> x) {
    const BuiltCircuit b = build(x);
    const Measurement m =
        dispatch(backend, b.circuit, width, cfg.exact_expectation ? 0 : cfg.shots,
                 derive_seed(eval_stream, eval_index++), &t.communication_s, &t.quantum_s);
    res.statevector_bytes = std::max(res.statevector_bytes, m.statevector_bytes);
    return -sense * mean_value(m);
  });

  std::vector<double> x0 = cfg.x0;
  if (x0.empty()) {
    Rng rng(derive_seed(run_seed, 1));
    for (const Bound& b : obj.bounds()) x0.push_back(uniform_real(rng, b.lo, b.hi));
  }
  OptConfig opt = cfg.opt;
  opt.seed = derive_seed(run_seed, 2 + cfg.opt.seed);
  const OptResult best = run_optimizer(cfg.optimizer, obj, x0, opt);
  res.angles = best.x_best;
  res.evals = obj.eval_count();

  // Final sampling at the best angles.
  const BuiltCircuit final_circuit = build(best.x_best);
  const Measurement samples = dispatch(backend, final_circuit.circuit, width, cfg.shots,
                                       derive_seed(run_seed, 4), &t.communication_s, &t.quantum_s);
  std::optional<Measurement> exact;
  if (cfg.exact_expectation) {
    exact = dispatch(backend, final_circuit.circuit, width, 0, 0, &t.communication_s, &t.quantum_s);
  }
  const Measurement& basis = exact ? *exact : samples;
  res.expectation_best = mean_value(basis);
  res.statevector_bytes = std::max(res.statevector_bytes, samples.statevector_bytes);

  res.modal = modal_bitstring(samples.counts, width);
  const std::uint64_t modal_index = from_bitstring(res.modal);
  switch (inst.app) {
    case App::MCP: {
      res.success = maxcut_cost_bits(inst.graph(), modal_index) == oracle.optimum;
      const double m = static_cast<double>(inst.graph().m());
      res.r_opt = oracle.optimum > 0.0 ? res.expectation_best / oracle.optimum : 1.0;
      res.r_clauses = m > 0.0 ? res.expectation_best / m : 1.0;
      break;
    }
    case App::DSP: {
      res.success = dsp_cost_bits(inst.graph(), modal_index) == oracle.optimum;
      res.r_opt = res.expectation_best / oracle.optimum;
      res.r_clauses = res.expectation_best / static_cast<double>(inst.graph().n);
      break;
    }
    case App::TSP: {
      const auto tour = tsp_cost_bits(inst.tsp(), modal_index);
      res.success = tour.has_value() && *tour == oracle.optimum;
      res.r_opt = res.expectation_best > 0.0 ? oracle.optimum / res.expectation_best : 0.0;
      double valid = 0.0;
      if (exact) {
        for (std::size_t i = 0; i < exact->probabilities.size(); ++i) {
          if (exact->probabilities[i] > 0.0 && tsp_cost_bits(inst.tsp(), i)) valid += exact->probabilities[i];
        }
      } else {
        for (const auto& [idx, c] : samples.counts) {
          if (tsp_cost_bits(inst.tsp(), idx)) valid += static_cast<double>(c);
        }
        valid /= static_cast<double>(cfg.shots);
      }
      res.r_clauses = valid;
      break;
    }
  }

  t.total_s = seconds_since(start);
  t.classical_s = std::max(0.0, t.total_s - t.compile_s - t.communication_s - t.quantum_s);
  res.timings = t;
  return res;
}

InstanceResult run_instance(const ProblemInstance& inst, const RunConfig& cfg) {
  LocalSimulatorBackend backend(cfg.max_qubits);
  return run_instance(inst, cfg, backend);
}

// ---------------------------------------------------------------------------
// Sizes and sweeps

ProblemInstance repetition_instance(App app, std::uint32_t n, const RepetitionPlan& plan,
                                    std::uint32_t run) {
  if (plan.fixed) return *plan.fixed;
  return generate_instance(app, n, plan.pin_instance ? plan.base_seed : plan.base_seed + run);
}

SizeRecord evaluate_size(App app, std::uint32_t n, const RepetitionPlan& plan,
                         const RunConfig& cfg, Backend& backend) {
  detail::require(plan.runs >= 1, "evaluate_size: runs must be at least 1");
  SizeRecord rec;
  rec.n = n;
  rec.p = cfg.p;
  rec.runs = plan.runs;
  std::vector<TimingBreakdown> timings;
  std::uint32_t successes = 0;
  double r_sum = 0.0, e_sum = 0.0;
  for (std::uint32_t r = 0; r < plan.runs; ++r) {
    const ProblemInstance inst = repetition_instance(app, n, plan, r);
    const InstanceResult res = run_instance(inst, cfg, backend, plan.base_seed + r);
    successes += res.success ? 1 : 0;
    r_sum += res.r_opt;
    e_sum += res.expectation_best;
    timings.push_back(res.timings);
    rec.qubits = std::max(rec.qubits, res.qubits);
    rec.peak_statevector_bytes = std::max(rec.peak_statevector_bytes, res.statevector_bytes);
  }
  const double runs = static_cast<double>(plan.runs);
  rec.success_probability = successes / runs;
  rec.mean_r_opt = r_sum / runs;
  rec.mean_expectation = e_sum / runs;
  rec.mean_timings = mean_of(timings);
  return rec;
}

double success_probability(App app, std::uint32_t n, const RepetitionPlan& plan,
                           const RunConfig& cfg, Backend& backend) {
  return evaluate_size(app, n, plan, cfg, backend).success_probability;
}

MaxPResult find_max_p(const std::function<double(std::uint32_t)>& best_at_p, std::uint32_t cap,
                      double tol) {
  detail::require(cap >= 1, "find_max_p: cap must be at least 1");
  detail::require(tol >= 0.0, "find_max_p: tol must be non-negative");
  MaxPResult out;
  out.trace.push_back(best_at_p(1));
  out.p_star = 1;
  for (std::uint32_t p = 2; p <= cap; ++p) {
    const double v = best_at_p(p);
    const double prev = out.trace.back();
    out.trace.push_back(v);
    if (v - prev > tol) {
      out.p_star = p;
    } else {
      break;
    }
  }
  return out;
}

MaxPResult find_max_p(const ProblemInstance& inst, const RunConfig& cfg, std::uint32_t cap,
                      double tol) {
  const ExactLandscape landscape(inst, cfg.tsp, cfg.max_qubits);
  std::optional<QaoaParams> warm;
  return find_max_p(
      [&](std::uint32_t p) {
        const DepthOptimum d = optimize_depth(landscape, p, warm, cfg.opt);
        warm = d.params;
        return d.score;
      },
      cap, tol);
}

std::string_view stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::QubitLimit:
      return "qubit_limit";
    case StopReason::SuccessBelowHalf:
      return "success_below_half";
    case StopReason::SizeCap:
      return "size_cap";
  }
  return "?";
}

StopReason stop_reason_from_name(std::string_view name) {
  for (auto r : {StopReason::QubitLimit, StopReason::SuccessBelowHalf, StopReason::SizeCap}) {
    if (stop_reason_name(r) == name) return r;
  }
  throw ValidationError("unknown stop reason '" + std::string(name) + "'");
}

ScalingReport scaling_sweep(App app, std::uint32_t p, std::uint32_t n_min, std::uint32_t size_cap,
                            std::uint32_t max_qubits, const QubitCounter& qubits_for,
                            const SizeEvaluator& evaluate) {
  detail::require(n_min >= 1, "scaling_sweep: n_min must be positive");
  detail::require(size_cap >= n_min, "scaling_sweep: size cap below n_min");
  ScalingReport report;
  report.app = app;
  report.p = p;
  for (std::uint32_t n = n_min;; ++n) {
    if (n > size_cap) {
      report.stop_reason = StopReason::SizeCap;
      break;
    }
    if (qubits_for(n) > max_qubits) {
      report.stop_reason = StopReason::QubitLimit;
      break;
    }
    SizeRecord rec = evaluate(n);
    rec.n = n;
    const bool below = rec.success_probability < 0.5;
    report.sizes.push_back(std::move(rec));
    if (below) {
      report.stop_reason = StopReason::SuccessBelowHalf;
      break;
    }
  }
  return report;
}

std::string_view p_policy_name(PPolicy policy) {
  switch (policy) {
    case PPolicy::Fixed:
      return "fixed";
    case PPolicy::Sweep:
      return "sweep";
    case PPolicy::Auto:
      return "auto";
  }
  return "?";
}

PPolicy p_policy_from_name(std::string_view name) {
  for (auto p : {PPolicy::Fixed, PPolicy::Sweep, PPolicy::Auto}) {
    if (p_policy_name(p) == name) return p;
  }
  throw ValidationError("unknown p policy '" + std::string(name) + "'");
}

void validate(const BenchConfig& cfg) {
  detail::require(!cfg.apps.empty(), "bench config: no applications selected");
  detail::require(cfg.n_min >= 3, "bench config: n_min must be at least 3");
  detail::require(cfg.n_max >= cfg.n_min, "bench config: n_max below n_min");
  detail::require(cfg.runs >= 1, "bench config: runs must be at least 1");
  detail::require(cfg.p_fixed >= 1, "bench config: p must be at least 1");
  detail::require(cfg.p_cap >= 1, "bench config: p cap must be at least 1");
  detail::require(!cfg.p_sweep.empty(), "bench config: empty p sweep");
  for (std::uint32_t p : cfg.p_sweep) detail::require(p >= 1, "bench config: p must be at least 1");
  if (cfg.problem) {
    detail::require(cfg.apps.size() == 1 && cfg.apps.front() == cfg.problem->app,
                    "bench config: a problem file fixes a single application");
  }
  validate(cfg.run);
}

std::vector<std::uint32_t> resolve_depths(App app, const BenchConfig& cfg) {
  switch (cfg.p_policy) {
    case PPolicy::Fixed:
      return {cfg.p_fixed};
    case PPolicy::Sweep:
      return cfg.p_sweep;
    case PPolicy::Auto: {
      const std::uint32_t n = cfg.problem ? cfg.problem->size() : cfg.n_min;
      const ProblemInstance inst =
          cfg.problem ? *cfg.problem : generate_instance(app, n, cfg.seed);
      return {find_max_p(inst, cfg.run, cfg.p_cap, cfg.p_tol).p_star};
    }
  }
  return {cfg.p_fixed};
}

ScalingReport scaling_sweep(App app, std::uint32_t p, const BenchConfig& cfg, Backend& backend) {
  RepetitionPlan plan{cfg.runs, cfg.seed, cfg.pin_instance, cfg.problem};
  RunConfig run = cfg.run;
  run.p = p;
  if (!run.x0.empty() && run.x0.size() != 2 * p) run.x0.clear();
  const std::uint32_t n_min = cfg.problem ? cfg.problem->size() : cfg.n_min;
  std::uint32_t size_cap = cfg.problem ? n_min : cfg.n_max;
  // Sizes without an exact oracle are treated as beyond the cap.
  while (size_cap > n_min && !oracle_covers(app, size_cap)) --size_cap;

  auto qubits_for = [&](std::uint32_t n) {
    std::uint32_t q = 0;
    for (std::uint32_t r = 0; r < plan.runs; ++r) {
      q = std::max(q, required_qubits(repetition_instance(app, n, plan, r), run.tsp));
      if (plan.fixed || plan.pin_instance) break;
    }
    return q;
  };
  auto evaluate = [&](std::uint32_t n) { return evaluate_size(app, n, plan, run, backend); };
  const std::uint32_t capacity = std::min(run.max_qubits, kHardQubitLimit);
  return scaling_sweep(app, p, n_min, size_cap, capacity, qubits_for, evaluate);
}

BenchmarkReport full_benchmark(const BenchConfig& cfg, Backend& backend) {
  validate(cfg);
  const auto start = Clock::now();
  BenchmarkReport report;
  report.config = cfg;
  report.bias = bias_test(cfg.bias_qubits, cfg.bias_shots, cfg.seed);
  report.peak_statevector_bytes = std::uint64_t{16} << cfg.bias_qubits;
  for (App app : cfg.apps) {
    for (std::uint32_t p : resolve_depths(app, cfg)) {
      ScalingReport sweep = scaling_sweep(app, p, cfg, backend);
      for (const SizeRecord& rec : sweep.sizes) {
        report.peak_statevector_bytes = std::max(report.peak_statevector_bytes, rec.peak_statevector_bytes);
      }
      report.sweeps.push_back(std::move(sweep));
    }
  }
  report.wall_clock_s = seconds_since(start);
  // Reals are kept at the precision the JSON form stores.
  return canonical(report);
}

BenchmarkReport full_benchmark(const BenchConfig& cfg) {
  LocalSimulatorBackend backend(cfg.run.max_qubits);
  return full_benchmark(cfg, backend);
}

}  // namespace qpack
