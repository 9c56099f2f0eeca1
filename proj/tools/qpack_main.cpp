// qpack command line: run the benchmark, probe readout bias, print gate
// resources.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qpack/bench.hpp"
#include "qpack/circuits.hpp"
#include "qpack/errors.hpp"
#include "qpack/problems.hpp"
#include "qpack/report.hpp"

namespace {

using namespace qpack;
using nlohmann::json;

std::uint32_t parse_count(const std::string& s) {
  std::uint32_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
    throw ValidationError("--p: expected a positive integer, got '" + s + "'");
  }
  return v;
}

// "3" fixes p, "1..4" sweeps a range, "auto" searches for p*.
void apply_p(const std::string& spec, BenchConfig& cfg) {
  if (spec == "auto") {
    cfg.p_policy = PPolicy::Auto;
    return;
  }
  const auto dots = spec.find("..");
  if (dots == std::string::npos) {
    cfg.p_policy = PPolicy::Fixed;
    cfg.p_fixed = parse_count(spec);
    return;
  }
  const std::uint32_t lo = parse_count(spec.substr(0, dots));
  const std::uint32_t hi = parse_count(spec.substr(dots + 2));
  if (hi < lo) throw ValidationError("--p: empty range '" + spec + "'");
  cfg.p_policy = PPolicy::Sweep;
  cfg.p_sweep.clear();
  for (std::uint32_t p = lo; p <= hi; ++p) cfg.p_sweep.push_back(p);
}

ProblemInstance load_problem(App app, const std::string& path, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open problem file " + path);
  ProblemInstance inst;
  inst.app = app;
  inst.seed = seed;
  if (app == App::TSP) {
    inst.payload = read_tsp(in);
  } else {
    inst.payload = read_graph(in);
  }
  return inst;
}

json counts_json(const GateCounts& counts) {
  json j = json::object();
  for (const auto& [kind, n] : counts) j[std::string(gate_name(kind))] = n;
  return j;
}

struct RunArgs {
  std::string app = "all";
  std::uint32_t n_min = 3;
  std::uint32_t n_max = 8;
  std::string p = "1..4";
  std::uint64_t shots = 100;
  std::uint32_t runs = 30;
  std::string optimizer = "nelder-mead";
  std::uint64_t seed = 1;
  bool exact = false;
  bool pin = false;
  std::string out;
  std::string problem_file;
  std::uint32_t starts = 4;
  std::uint32_t samples = 32;
  std::uint32_t refine = 2;
  double tol = 1e-6;
  std::uint64_t max_evals = 300;
  std::uint32_t max_qubits = 0;
  std::uint32_t tsp_row_weight = 2;
  std::uint32_t tsp_mixer_pairs = 2;
  double tsp_penalty = -1.0;
  std::uint32_t p_cap = kDefaultPCap;
  std::uint32_t bias_qubits = 5;
  std::uint64_t bias_shots = 10000;
};

int do_run(const RunArgs& a) {
  BenchConfig cfg;
  if (a.app == "all") {
    cfg.apps = {App::MCP, App::DSP, App::TSP};
  } else {
    cfg.apps = {app_from_name(a.app)};
  }
  cfg.n_min = a.n_min;
  cfg.n_max = a.n_max;
  apply_p(a.p, cfg);
  cfg.p_cap = a.p_cap;
  cfg.runs = a.runs;
  cfg.seed = a.seed;
  cfg.pin_instance = a.pin;
  cfg.bias_qubits = a.bias_qubits;
  cfg.bias_shots = a.bias_shots;
  cfg.run.shots = a.shots;
  cfg.run.exact_expectation = a.exact;
  cfg.run.optimizer = {optimizer_from_name(a.optimizer), a.starts, a.samples, a.refine};
  cfg.run.opt.tol = a.tol;
  cfg.run.opt.max_evals = a.max_evals;
  if (a.max_qubits > 0) cfg.run.max_qubits = a.max_qubits;
  cfg.run.tsp.row_weight = a.tsp_row_weight;
  cfg.run.tsp.mixer_pairs_per_row = a.tsp_mixer_pairs;
  cfg.run.tsp.column_penalty = a.tsp_penalty;
  if (!a.problem_file.empty()) {
    if (cfg.apps.size() != 1) throw ValidationError("--problem-file needs a single --app");
    cfg.problem = load_problem(cfg.apps.front(), a.problem_file, a.seed);
    cfg.n_min = cfg.n_max = std::max<std::uint32_t>(3, cfg.problem->size());
  }

  const BenchmarkReport report = full_benchmark(cfg);
  if (a.out.empty()) {
    std::cout << serialize_report(report);
    return 0;
  }
  const std::filesystem::path path(a.out);
  if (path.extension() == ".csv") {
    write_csv(report, path);
  } else {
    write_json(report, path);
  }
  std::cout << summarize(report);
  return 0;
}

int do_bias(std::uint32_t qubits, std::uint64_t shots, std::uint64_t seed) {
  const BiasReport b = bias_test(qubits, shots, seed);
  const json j = {{"n_qubits", b.n_qubits},   {"shots", b.shots},
                  {"ones_fraction", b.ones_fraction}, {"bias", b.bias},
                  {"ci_halfwidth", b.ci_halfwidth},   {"detected", b.detected()}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int do_resources(const std::string& app_text, std::uint32_t n, std::uint32_t m, std::uint32_t p,
                 std::uint64_t seed) {
  const App app = app_from_name(app_text);
  QaoaParams params;
  for (std::uint32_t i = 0; i < p; ++i) {
    params.gammas.push_back(0.5);
    params.betas.push_back(0.25);
  }
  json j = {{"app", std::string(app_name(app))}, {"n", n}, {"p", p}};
  if (app == App::TSP) {
    const TspInstance inst = generate_tsp(n, seed);
    const BuiltCircuit built = build_tsp_circuit(inst, params, {}, kHardQubitLimit);
    j["formula_prep"] = counts_json(paper_resource_formula(ResourceTable::TspPrep, n, 0, p));
    j["formula_cycles"] = counts_json(paper_resource_formula(ResourceTable::TspCycles, n, 0, p));
    j["builder"] = counts_json(count_gates(built.circuit));
  } else {
    if (m == 0) m = n;
    const Graph g = generate_graph(n, m, seed);
    j["m"] = m;
    if (app == App::MCP) {
      j["formula"] = counts_json(paper_resource_formula(ResourceTable::MCP, n, m, p));
      j["builder"] = counts_json(count_gates(build_maxcut_circuit(g, params)));
    } else {
      const GateCounts raw = count_gates(build_dsp_circuit(g, params).circuit);
      j["formula"] = counts_json(paper_resource_formula(ResourceTable::DSP, n, m, p));
      j["builder"] = counts_json(raw);
      j["builder_paper_rate"] = counts_json(paper_rate_counts(raw));
    }
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"QAOA benchmark suite for state-vector simulators"};
  cli.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = cli.add_subcommand("run", "Bias test plus scaling sweeps");
  run_cmd->add_option("--app", run.app, "maxcut, dsp, tsp or all")
      ->check(CLI::IsMember({"maxcut", "mcp", "dsp", "tsp", "all"}));
  run_cmd->add_option("--n-min", run.n_min, "Smallest problem size")->check(CLI::Range(3u, 64u));
  run_cmd->add_option("--n-max", run.n_max, "Size cap")->check(CLI::Range(3u, 64u));
  run_cmd->add_option("--p", run.p, "Depth: k, a range lo..hi, or auto");
  run_cmd->add_option("--p-cap", run.p_cap, "Upper bound for --p auto")->check(CLI::PositiveNumber);
  run_cmd->add_option("--shots", run.shots, "Shots per circuit execution")->check(CLI::PositiveNumber);
  run_cmd->add_option("--runs", run.runs, "Repetitions per size")->check(CLI::PositiveNumber);
  run_cmd->add_option("--optimizer", run.optimizer, "nelder-mead, restart-nm, annealing, sampled-global")
      ->check(CLI::IsMember({"nelder-mead", "restart-nm", "annealing", "sampled-global"}));
  run_cmd->add_option("--seed", run.seed, "Base seed");
  run_cmd->add_flag("--exact-expectation", run.exact, "Optimize on exact expectations");
  run_cmd->add_flag("--pin-instance", run.pin, "Reuse one instance for every repetition");
  run_cmd->add_option("--out", run.out, "Output file; .csv writes CSV, anything else JSON");
  run_cmd->add_option("--problem-file", run.problem_file, "Benchmark this instance instead")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--starts", run.starts, "restart-nm starts")->check(CLI::PositiveNumber);
  run_cmd->add_option("--samples", run.samples, "sampled-global samples")->check(CLI::PositiveNumber);
  run_cmd->add_option("--refine", run.refine, "sampled-global refinements");
  run_cmd->add_option("--tol", run.tol, "Simplex convergence tolerance")->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-evals", run.max_evals, "Evaluation budget per optimization")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-qubits", run.max_qubits, "Capacity (default QPACK_MAX_QUBITS or 24)")
      ->check(CLI::Range(1u, kHardQubitLimit));
  run_cmd->add_option("--tsp-row-weight", run.tsp_row_weight, "Hamming weight per TSP row (1 = one-hot)")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--tsp-mixer-pairs", run.tsp_mixer_pairs, "XY mixer ring edges per row per layer")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--tsp-penalty", run.tsp_penalty, "Column penalty weight (negative = auto)");
  run_cmd->add_option("--bias-qubits", run.bias_qubits, "Qubits in the bias probe")->check(CLI::PositiveNumber);
  run_cmd->add_option("--bias-shots", run.bias_shots, "Shots in the bias probe")->check(CLI::Range(100u, 100000000u));

  std::uint32_t bias_qubits = 5;
  std::uint64_t bias_shots = 10000;
  std::uint64_t bias_seed = 1;
  auto* bias_cmd = cli.add_subcommand("bias", "Readout bias probe on a uniform superposition");
  bias_cmd->add_option("--qubits", bias_qubits, "Qubits")->check(CLI::Range(1u, kHardQubitLimit));
  bias_cmd->add_option("--shots", bias_shots, "Shots")->check(CLI::Range(100u, 100000000u));
  bias_cmd->add_option("--seed", bias_seed, "Seed");

  std::string res_app = "maxcut";
  std::uint32_t res_n = 5, res_m = 0, res_p = 1;
  std::uint64_t res_seed = 1;
  auto* res_cmd = cli.add_subcommand("resources", "Builder gate counts next to the closed forms");
  res_cmd->add_option("--app", res_app, "maxcut, dsp or tsp")
      ->check(CLI::IsMember({"maxcut", "mcp", "dsp", "tsp"}));
  res_cmd->add_option("--n", res_n, "Vertices or cities")->check(CLI::Range(3u, 24u));
  res_cmd->add_option("--m", res_m, "Edges (default n)");
  res_cmd->add_option("--p", res_p, "Depth")->check(CLI::PositiveNumber);
  res_cmd->add_option("--seed", res_seed, "Graph seed");

  CLI11_PARSE(cli, argc, argv);

  try {
    if (*run_cmd) return do_run(run);
    if (*bias_cmd) return do_bias(bias_qubits, bias_shots, bias_seed);
    if (*res_cmd) return do_resources(res_app, res_n, res_m, res_p, res_seed);
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
