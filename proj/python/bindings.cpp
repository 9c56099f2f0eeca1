// Python bindings for the benchmark core.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qpack/bench.hpp"
#include "qpack/circuits.hpp"
#include "qpack/errors.hpp"
#include "qpack/problems.hpp"
#include "qpack/report.hpp"

namespace py = pybind11;
using namespace qpack;

namespace {

std::map<std::string, std::uint64_t> named(const GateCounts& counts) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& [kind, count] : counts) out[std::string(gate_name(kind))] = count;
  return out;
}

ResourceTable table_from_name(const std::string& name) {
  if (name == "maxcut") return ResourceTable::MCP;
  if (name == "dsp") return ResourceTable::DSP;
  if (name == "tsp-prep") return ResourceTable::TspPrep;
  if (name == "tsp-cycles") return ResourceTable::TspCycles;
  throw ValidationError("unknown resource table '" + name + "'");
}

py::dict bias_dict(const BiasReport& b) {
  py::dict d;
  d["n_qubits"] = b.n_qubits;
  d["shots"] = b.shots;
  d["ones_fraction"] = b.ones_fraction;
  d["bias"] = b.bias;
  d["ci_halfwidth"] = b.ci_halfwidth;
  d["detected"] = b.detected();
  return d;
}

py::dict timings_dict(const TimingBreakdown& t) {
  py::dict d;
  d["compile_s"] = t.compile_s;
  d["classical_s"] = t.classical_s;
  d["communication_s"] = t.communication_s;
  d["quantum_s"] = t.quantum_s;
  d["total_s"] = t.total_s;
  return d;
}

RunConfig run_config(std::uint32_t p, std::uint64_t shots, const std::string& optimizer,
                     bool exact_expectation, std::uint64_t max_evals, std::uint32_t tsp_row_weight) {
  RunConfig cfg;
  cfg.p = p;
  cfg.shots = shots;
  cfg.optimizer.kind = optimizer_from_name(optimizer);
  cfg.exact_expectation = exact_expectation;
  cfg.opt.max_evals = max_evals;
  cfg.tsp.row_weight = tsp_row_weight;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_qpack, m) {
  m.doc() = "QAOA application benchmark on a dense state-vector simulator";
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);
  py::register_exception<ConfigurationError>(m, "ConfigurationError", PyExc_RuntimeError);
  m.attr("__version__") = std::string(tool_version());

  m.def("bias_test",
        [](std::uint32_t n, std::uint64_t shots, std::uint64_t seed, double readout_flip) {
          return bias_dict(bias_test(n, shots, seed, readout_flip));
        },
        py::arg("n_qubits"), py::arg("shots"), py::arg("seed"), py::arg("readout_flip") = 0.0);

  m.def("resource_formula",
        [](const std::string& table, std::uint64_t n, std::uint64_t m_edges, std::uint64_t p) {
          return named(paper_resource_formula(table_from_name(table), n, m_edges, p));
        },
        py::arg("table"), py::arg("n"), py::arg("m"), py::arg("p"));

  m.def("circuit_counts",
        [](const std::string& app, std::uint32_t n, std::uint32_t p, std::uint64_t seed) {
          const ProblemInstance inst = generate_instance(app_from_name(app), n, seed);
          const QaoaParams params{std::vector<double>(p, 0.5), std::vector<double>(p, 0.5)};
          return named(count_gates(build_qaoa_circuit(inst, params).circuit));
        },
        py::arg("app"), py::arg("n"), py::arg("p") = 1, py::arg("seed") = 1);

  m.def("solve_exact",
        [](const std::string& app, std::uint32_t n, std::uint64_t seed) {
          const OracleResult r = solve_exact(generate_instance(app_from_name(app), n, seed));
          py::dict d;
          d["optimum"] = r.optimum;
          d["witnesses"] = r.witnesses;
          return d;
        },
        py::arg("app"), py::arg("n"), py::arg("seed") = 1);

  m.def("run_instance",
        [](const std::string& app, std::uint32_t n, std::uint64_t seed, std::uint32_t p,
           std::uint64_t shots, const std::string& optimizer, bool exact_expectation,
           std::uint64_t max_evals, std::uint32_t tsp_row_weight) {
          const RunConfig cfg = run_config(p, shots, optimizer, exact_expectation, max_evals, tsp_row_weight);
          InstanceResult r;
          {
            py::gil_scoped_release release;
            r = run_instance(generate_instance(app_from_name(app), n, seed), cfg);
          }
          py::dict d;
          d["app"] = std::string(app_name(r.app));
          d["n"] = r.n;
          d["p"] = r.p;
          d["shots"] = r.shots;
          d["optimizer"] = r.optimizer;
          d["expectation_best"] = r.expectation_best;
          d["r_opt"] = r.r_opt;
          d["r_clauses"] = r.r_clauses;
          d["success"] = r.success;
          d["oracle_optimum"] = r.oracle_optimum;
          d["modal"] = r.modal;
          d["angles"] = r.angles;
          d["evals"] = r.evals;
          d["qubits"] = r.qubits;
          d["statevector_bytes"] = r.statevector_bytes;
          d["timings"] = timings_dict(r.timings);
          d["seed"] = r.seed;
          return d;
        },
        py::arg("app"), py::arg("n"), py::arg("seed") = 1, py::arg("p") = 1, py::arg("shots") = 100,
        py::arg("optimizer") = "nelder-mead", py::arg("exact_expectation") = false,
        py::arg("max_evals") = 300, py::arg("tsp_row_weight") = 2);

  m.def("benchmark_json",
        [](const std::vector<std::string>& apps, std::uint32_t n_min, std::uint32_t n_max,
           const std::vector<std::uint32_t>& depths, std::uint32_t runs, std::uint64_t shots,
           std::uint64_t seed, const std::string& optimizer, bool exact_expectation,
           std::uint64_t max_evals, std::uint32_t tsp_row_weight, std::uint64_t bias_shots) {
          BenchConfig cfg;
          cfg.apps.clear();
          for (const auto& a : apps) cfg.apps.push_back(app_from_name(a));
          cfg.n_min = n_min;
          cfg.n_max = n_max;
          cfg.p_policy = PPolicy::Sweep;
          cfg.p_sweep = depths;
          cfg.runs = runs;
          cfg.seed = seed;
          cfg.bias_shots = bias_shots;
          cfg.run = run_config(1, shots, optimizer, exact_expectation, max_evals, tsp_row_weight);
          py::gil_scoped_release release;
          return serialize_report(full_benchmark(cfg));
        },
        py::arg("apps"), py::arg("n_min"), py::arg("n_max"), py::arg("depths"), py::arg("runs"),
        py::arg("shots"), py::arg("seed"), py::arg("optimizer"), py::arg("exact_expectation"),
        py::arg("max_evals"), py::arg("tsp_row_weight"), py::arg("bias_shots"));

  m.def("report_csv",
        [](const std::string& json_text) {
          std::ostringstream out;
          write_csv(deserialize_report(json_text), out);
          return out.str();
        },
        py::arg("report_json"));

  m.def("summarize",
        [](const std::string& json_text) { return summarize(deserialize_report(json_text)); },
        py::arg("report_json"));

  m.def("fit_exponential",
        [](const std::vector<std::pair<double, double>>& points) {
          const ExpFit f = fit_exponential(points);
          return py::make_tuple(f.a, f.b, f.r_squared);
        },
        py::arg("points"));
}
