#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <vector>

#include "qpack/bench.hpp"
#include "qpack/errors.hpp"
#include "qpack/report.hpp"

using namespace qpack;

namespace {

constexpr double kPi = std::numbers::pi;

ProblemInstance triangle() {
  return ProblemInstance{App::MCP, make_graph(3, {{0, 1}, {1, 2}, {0, 2}}), 7};
}

// Closed-form p=1 expectation of an unweighted MaxCut edge with endpoint
// degrees du, dv and lambda common neighbours.
double edge_p1(double g, double b, int du, int dv, int lambda) {
  const double c = std::cos(g);
  return 0.5 + 0.25 * std::sin(4 * b) * std::sin(g) * (std::pow(c, du - 1) + std::pow(c, dv - 1)) -
         0.25 * std::pow(std::sin(2 * b), 2) * std::pow(c, du + dv - 2 - 2 * lambda) *
             (1 - std::pow(std::cos(2 * g), lambda));
}

double triangle_p1(double g, double b) { return 3 * edge_p1(g, b, 2, 2, 1); }

double triangle_grid_optimum() {
  double best = -1e300;
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) {
      best = std::max(best, triangle_p1(2 * kPi * i / 63, kPi * j / 63));
    }
  }
  return best;
}

// Counts requests and forwards them to the local simulator.
class CountingBackend final : public Backend {
 public:
  std::string name() const override { return "counting"; }
  ExecutionResponse execute(const ExecutionRequest& r) override {
    ++calls;
    return inner.execute(r);
  }
  LocalSimulatorBackend inner;
  std::uint64_t calls = 0;
};

SizeRecord forced(std::uint32_t n, double success) {
  SizeRecord rec;
  rec.n = n;
  rec.runs = 10;
  rec.success_probability = success;
  return rec;
}

}  // namespace

TEST_CASE("bias test calibration") {
  int within = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const BiasReport b = bias_test(5, 10000, seed);
    CHECK(b.ones_fraction >= 0.0);
    CHECK(b.ones_fraction <= 1.0);
    CHECK(b.bias == doctest::Approx(b.ones_fraction - 0.5));
    within += !b.detected();
  }
  CHECK(within >= 18);
}

TEST_CASE("bias test sees an injected readout flip") {
  // A fair bit read as 0 with probability 0.1 when it is 1: P(1) = 0.45.
  const double sigma = std::sqrt(0.45 * 0.55 / (5.0 * 10000));
  int detected = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const BiasReport b = bias_test(5, 10000, seed, 0.1);
    detected += b.detected();
    if (seed == 1) CHECK(std::abs(b.bias + 0.05) < 2 * sigma);
  }
  CHECK(detected >= 18);
}

TEST_CASE("bias test on one qubit and small shot counts") {
  const BiasReport b = bias_test(1, 100, 3);
  CHECK(b.n_qubits == 1);
  CHECK(b.shots == 100);
  CHECK(b.ones_fraction >= 0.0);
  CHECK(b.ones_fraction <= 1.0);
  CHECK(b.ci_halfwidth > 0.0);
  CHECK_THROWS_AS(bias_test(0, 100, 1), ValidationError);
  CHECK_THROWS_AS(bias_test(2, 99, 1), ValidationError);
}

TEST_CASE("circuit encoding round-trips") {
  Circuit c(4);
  c.h(0).crz(1, 2, 0.75).ccx(0, 1, 3).rxx(2, 3, -1.25);
  const Circuit back = decode_circuit(encode_circuit(c));
  CHECK(back == c);
  std::vector<std::uint8_t> bytes = encode_circuit(c);
  bytes.pop_back();
  CHECK_THROWS_AS(decode_circuit(bytes), ValidationError);
}

TEST_CASE("dispatch reports probabilities and counts") {
  Circuit c(2);
  c.h(0).cnot(0, 1);
  LocalSimulatorBackend backend;
  double comm = 0, quantum = 0;
  const Measurement exact = dispatch(backend, c, 2, 0, 1, &comm, &quantum);
  REQUIRE(exact.probabilities.size() == 4);
  CHECK(exact.probabilities[0] == doctest::Approx(0.5));
  CHECK(exact.probabilities[3] == doctest::Approx(0.5));
  CHECK(exact.statevector_bytes == 64);
  const Measurement sampled = dispatch(backend, c, 2, 1000, 1, &comm, &quantum);
  std::uint64_t total = 0;
  for (const auto& [idx, count] : sampled.counts) {
    CHECK((idx == 0 || idx == 3));
    total += count;
  }
  CHECK(total == 1000);
  CHECK(quantum > 0.0);
  CHECK(comm >= 0.0);
}

TEST_CASE("exact landscape agrees with the closed form on the triangle") {
  const ExactLandscape land(triangle());
  for (int i = 0; i < 10; ++i) {
    const double g = 0.37 + 0.6 * i, b = 0.11 + 0.3 * i;
    CHECK(land.score(QaoaParams{{g}, {b}}) == doctest::Approx(triangle_p1(g, b)).epsilon(1e-9));
  }
}

TEST_CASE("run_instance: sampled_global on the triangle reaches the grid optimum") {
  RunConfig cfg;
  cfg.exact_expectation = true;
  cfg.optimizer = {OptimizerKind::SampledGlobal, 4, 64, 3};
  cfg.opt = {600, 1e-10, 0};
  const InstanceResult r = run_instance(triangle(), cfg);
  CHECK(std::abs(r.expectation_best - triangle_grid_optimum()) < 1e-2);
  CHECK(r.r_opt <= 1 + 1e-9);
  CHECK(r.oracle_optimum == 2.0);
}

TEST_CASE("run_instance: one evaluation at zero angles gives m/2") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ProblemInstance inst = generate_instance(App::MCP, 4 + seed, seed);
    RunConfig cfg;
    cfg.exact_expectation = true;
    cfg.x0 = {0.0, 0.0};
    cfg.opt.max_evals = 1;
    const InstanceResult r = run_instance(inst, cfg);
    CHECK(r.evals == 1);
    CHECK(r.expectation_best == doctest::Approx(inst.graph().m() / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("run_instance: timings are positive and additive") {
  RunConfig cfg;
  cfg.opt.max_evals = 40;
  for (App app : {App::MCP, App::DSP}) {
    const InstanceResult r = run_instance(generate_instance(app, 4, 2), cfg);
    const TimingBreakdown& t = r.timings;
    CHECK(t.compile_s > 0.0);
    CHECK(t.classical_s > 0.0);
    CHECK(t.communication_s > 0.0);
    CHECK(t.quantum_s > 0.0);
    CHECK(t.stage_sum() <= t.total_s + kTimingSlack);
  }
}

TEST_CASE("run_instance: every evaluation goes through the backend") {
  CountingBackend backend;
  RunConfig cfg;
  cfg.opt.max_evals = 25;
  const InstanceResult r = run_instance(generate_instance(App::MCP, 5, 3), cfg, backend);
  CHECK(backend.calls == r.evals + 1);
  cfg.exact_expectation = true;
  backend.calls = 0;
  const InstanceResult e = run_instance(generate_instance(App::MCP, 5, 3), cfg, backend);
  CHECK(backend.calls == e.evals + 2);
}

TEST_CASE("run_instance: success is sound and non-timing fields repeat") {
  RunConfig cfg;
  cfg.opt.max_evals = 60;
  cfg.tsp.row_weight = 1;
  const std::vector<ProblemInstance> insts = {generate_instance(App::MCP, 6, 4),
                                              generate_instance(App::DSP, 5, 4),
                                              generate_instance(App::TSP, 3, 4)};
  for (const ProblemInstance& inst : insts) {
    const InstanceResult a = run_instance(inst, cfg);
    const InstanceResult b = run_instance(inst, cfg);
    CHECK(a.modal == b.modal);
    CHECK(a.angles == b.angles);
    CHECK(a.expectation_best == b.expectation_best);
    CHECK(a.success == b.success);
    CHECK(a.r_opt >= 0.0);
    const std::uint64_t z = from_bitstring(a.modal);
    double value = 0.0;
    bool valid = true;
    if (inst.app == App::MCP) {
      for (const Edge& e : inst.graph().edges) value += ((z >> e.u) & 1) != ((z >> e.v) & 1) ? e.w : 0.0;
    } else if (inst.app == App::DSP) {
      value = dsp_cost_bits(inst.graph(), z);
    } else {
      const auto cost = tsp_cost_bits(inst.tsp(), z);
      valid = cost.has_value();
      value = cost.value_or(0.0);
    }
    if (a.success) {
      CHECK(valid);
      CHECK(value == a.oracle_optimum);
    } else {
      CHECK((!valid || value != a.oracle_optimum));
    }
  }
}

TEST_CASE("run_instance: capacity and oracle errors") {
  RunConfig cfg;
  cfg.max_qubits = 8;
  CHECK_THROWS_AS(run_instance(generate_instance(App::TSP, 3, 1), cfg), CapacityError);
  RunConfig ok;
  ok.max_qubits = 30;
  CHECK_THROWS_AS(run_instance(generate_instance(App::MCP, 25, 1), ok), ConfigurationError);
  RunConfig bad;
  bad.p = 0;
  CHECK_THROWS_AS(validate(bad), ValidationError);
}

TEST_CASE("success probability on the triangle") {
  LocalSimulatorBackend backend;
  RunConfig cfg;
  cfg.shots = 100;
  cfg.opt.max_evals = 60;
  const RepetitionPlan plan{20, 1, false, triangle()};
  const double p = success_probability(App::MCP, 3, plan, cfg, backend);
  CHECK(p >= 0.5);
  CHECK(success_probability(App::MCP, 3, plan, cfg, backend) == p);
  const RepetitionPlan one{1, 5, false, std::nullopt};
  const double q = success_probability(App::MCP, 5, one, cfg, backend);
  CHECK((q == 0.0 || q == 1.0));
}

TEST_CASE("repetition instances follow the seed plan") {
  const RepetitionPlan fresh{3, 10, false, std::nullopt};
  CHECK(repetition_instance(App::MCP, 6, fresh, 2) == generate_instance(App::MCP, 6, 12));
  const RepetitionPlan pinned{3, 10, true, std::nullopt};
  CHECK(repetition_instance(App::MCP, 6, pinned, 2) == generate_instance(App::MCP, 6, 10));
}

TEST_CASE("find_max_p") {
  RunConfig cfg;
  cfg.opt = {400, 1e-10, 0};
  const MaxPResult r = find_max_p(triangle(), cfg, 4, 1e-3);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] >= r.trace[i - 1] - 1e-9);
  CHECK(r.p_star >= 1);

  CHECK(find_max_p(triangle(), cfg, 1, 1e-3).p_star == 1);

  std::vector<std::uint32_t> asked;
  const MaxPResult flat = find_max_p(
      [&](std::uint32_t p) {
        asked.push_back(p);
        return 1.5;
      },
      8, 1e-3);
  CHECK(flat.p_star == 1);
  CHECK(asked == std::vector<std::uint32_t>{1, 2});

  const MaxPResult rising = find_max_p([](std::uint32_t p) { return p < 4 ? double(p) : 3.0; }, 8, 1e-3);
  CHECK(rising.p_star == 3);
  CHECK(rising.trace.size() == 4);
}

TEST_CASE("scaling sweep stop rules") {
  auto flat_qubits = [](std::uint32_t n) { return n; };
  SUBCASE("success below half") {
    const ScalingReport r = scaling_sweep(
        App::MCP, 1, 3, 20, 24, flat_qubits,
        [](std::uint32_t n) { return forced(n, n == 6 ? 0.4 : 0.9); });
    CHECK(r.stop_reason == StopReason::SuccessBelowHalf);
    REQUIRE(r.sizes.size() == 4);
    CHECK(r.sizes.back().n == 6);
  }
  SUBCASE("exactly one half continues") {
    const ScalingReport r =
        scaling_sweep(App::MCP, 1, 3, 5, 24, flat_qubits, [](std::uint32_t n) { return forced(n, 0.5); });
    CHECK(r.stop_reason == StopReason::SizeCap);
    CHECK(r.sizes.size() == 3);
  }
  SUBCASE("qubit capacity") {
    const ScalingReport r = scaling_sweep(
        App::TSP, 1, 3, 10, 20,
        [](std::uint32_t n) { return required_qubits(generate_instance(App::TSP, n, 1)); },
        [](std::uint32_t n) { return forced(n, 1.0); });
    CHECK(r.stop_reason == StopReason::QubitLimit);
    REQUIRE(r.sizes.size() == 2);
    CHECK(r.sizes.back().n == 4);
  }
  SUBCASE("sizes strictly increase") {
    const ScalingReport r =
        scaling_sweep(App::DSP, 2, 3, 9, 24, flat_qubits, [](std::uint32_t n) { return forced(n, 1.0); });
    for (std::size_t i = 1; i < r.sizes.size(); ++i) CHECK(r.sizes[i].n > r.sizes[i - 1].n);
    CHECK(r.stop_reason == StopReason::SizeCap);
  }
}

TEST_CASE("real TSP sweep at 20 qubits stops before n=5") {
  BenchConfig cfg;
  cfg.apps = {App::TSP};
  cfg.n_min = 5;
  cfg.n_max = 8;
  cfg.runs = 1;
  cfg.run.max_qubits = 20;
  LocalSimulatorBackend backend(20);
  const ScalingReport r = scaling_sweep(App::TSP, 1, cfg, backend);
  CHECK(r.stop_reason == StopReason::QubitLimit);
  CHECK(r.sizes.empty());
}

TEST_CASE("stop reason and p policy names") {
  for (StopReason s : {StopReason::QubitLimit, StopReason::SuccessBelowHalf, StopReason::SizeCap}) {
    CHECK(stop_reason_from_name(stop_reason_name(s)) == s);
  }
  CHECK(stop_reason_name(StopReason::QubitLimit) == "qubit_limit");
  for (PPolicy p : {PPolicy::Fixed, PPolicy::Sweep, PPolicy::Auto}) {
    CHECK(p_policy_from_name(p_policy_name(p)) == p);
  }
}

TEST_CASE("depth resolution") {
  BenchConfig cfg;
  CHECK(resolve_depths(App::MCP, cfg) == std::vector<std::uint32_t>{1, 2, 3, 4});
  cfg.p_policy = PPolicy::Fixed;
  cfg.p_fixed = 3;
  CHECK(resolve_depths(App::MCP, cfg) == std::vector<std::uint32_t>{3});
  cfg.p_policy = PPolicy::Auto;
  cfg.p_cap = 1;
  CHECK(resolve_depths(App::MCP, cfg) == std::vector<std::uint32_t>{1});
}

TEST_CASE("full benchmark at a single size") {
  BenchConfig cfg;
  cfg.n_min = 3;
  cfg.n_max = 3;
  cfg.p_policy = PPolicy::Fixed;
  cfg.runs = 2;
  cfg.run.opt.max_evals = 20;
  cfg.run.tsp.row_weight = 1;
  cfg.bias_shots = 1000;
  const BenchmarkReport r = full_benchmark(cfg);
  REQUIRE(r.sweeps.size() == 3);
  for (const ScalingReport& s : r.sweeps) CHECK(s.sizes.size() == 1);
  CHECK(r.sweeps[2].app == App::TSP);
  CHECK(r.bias.n_qubits == 5);
  CHECK(r.peak_statevector_bytes == 16u << 9);
  CHECK(deserialize_report(serialize_report(r)) == r);
}

TEST_CASE("MCP reaches larger sizes than TSP at 24 qubits") {
  auto qubits = [](App app) {
    return [app](std::uint32_t n) { return required_qubits(generate_instance(app, n, 1)); };
  };
  auto pass = [](std::uint32_t n) { return forced(n, 1.0); };
  const ScalingReport mcp = scaling_sweep(App::MCP, 1, 3, 40, 24, qubits(App::MCP), pass);
  const ScalingReport tsp = scaling_sweep(App::TSP, 1, 3, 40, 24, qubits(App::TSP), pass);
  CHECK(mcp.sizes.back().n > tsp.sizes.back().n);
  CHECK(tsp.sizes.back().n == 4);
}

TEST_CASE("bench config validation") {
  BenchConfig cfg;
  cfg.n_min = 2;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg = {};
  cfg.n_max = 2;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg = {};
  cfg.runs = 0;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg = {};
  cfg.apps.clear();
  CHECK_THROWS_AS(validate(cfg), ValidationError);
}
