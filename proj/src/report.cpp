#include "qpack/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qpack/errors.hpp"

namespace qpack {

using nlohmann::json;

namespace {

json real(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round_sig9(v);
}

double get_real(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

json to_json(const TimingBreakdown& t) {
  return {{"compile_s", real(t.compile_s)},
          {"classical_s", real(t.classical_s)},
          {"communication_s", real(t.communication_s)},
          {"quantum_s", real(t.quantum_s)},
          {"total_s", real(t.total_s)}};
}

TimingBreakdown timing_from(const json& j) {
  return {get_real(j.at("compile_s")), get_real(j.at("classical_s")),
          get_real(j.at("communication_s")), get_real(j.at("quantum_s")),
          get_real(j.at("total_s"))};
}

json to_json(const BiasReport& b) {
  return {{"n_qubits", b.n_qubits},
          {"shots", b.shots},
          {"ones_fraction", real(b.ones_fraction)},
          {"bias", real(b.bias)},
          {"ci_halfwidth", real(b.ci_halfwidth)},
          {"detected", b.detected()}};
}

BiasReport bias_from(const json& j) {
  BiasReport b;
  b.n_qubits = j.at("n_qubits").get<std::uint32_t>();
  b.shots = j.at("shots").get<std::uint64_t>();
  b.ones_fraction = get_real(j.at("ones_fraction"));
  b.bias = get_real(j.at("bias"));
  b.ci_halfwidth = get_real(j.at("ci_halfwidth"));
  return b;
}

json to_json(const SizeRecord& r) {
  return {{"n", r.n},
          {"p", r.p},
          {"runs", r.runs},
          {"qubits", r.qubits},
          {"success_probability", real(r.success_probability)},
          {"mean_r_opt", real(r.mean_r_opt)},
          {"mean_expectation", real(r.mean_expectation)},
          {"mean_timings", to_json(r.mean_timings)},
          {"peak_statevector_bytes", r.peak_statevector_bytes}};
}

SizeRecord size_from(const json& j) {
  SizeRecord r;
  r.n = j.at("n").get<std::uint32_t>();
  r.p = j.at("p").get<std::uint32_t>();
  r.runs = j.at("runs").get<std::uint32_t>();
  r.qubits = j.at("qubits").get<std::uint32_t>();
  r.success_probability = get_real(j.at("success_probability"));
  r.mean_r_opt = get_real(j.at("mean_r_opt"));
  r.mean_expectation = get_real(j.at("mean_expectation"));
  r.mean_timings = timing_from(j.at("mean_timings"));
  r.peak_statevector_bytes = j.at("peak_statevector_bytes").get<std::uint64_t>();
  return r;
}

json to_json(const ScalingReport& s) {
  json sizes = json::array();
  for (const auto& r : s.sizes) sizes.push_back(to_json(r));
  return {{"app", std::string(app_name(s.app))},
          {"p", s.p},
          {"sizes", std::move(sizes)},
          {"stop_reason", std::string(stop_reason_name(s.stop_reason))}};
}

ScalingReport sweep_from(const json& j) {
  ScalingReport s;
  s.app = app_from_name(j.at("app").get<std::string>());
  s.p = j.at("p").get<std::uint32_t>();
  for (const auto& r : j.at("sizes")) s.sizes.push_back(size_from(r));
  s.stop_reason = stop_reason_from_name(j.at("stop_reason").get<std::string>());
  return s;
}

json to_json(const ProblemInstance& inst) {
  json j = {{"app", std::string(app_name(inst.app))}, {"seed", inst.seed}};
  if (inst.app == App::TSP) {
    json w = json::array();
    for (double x : inst.tsp().weights) w.push_back(real(x));
    j["tsp"] = {{"n", inst.tsp().n}, {"weights", std::move(w)}};
  } else {
    json edges = json::array();
    for (const Edge& e : inst.graph().edges) edges.push_back({e.u, e.v, real(e.w)});
    j["graph"] = {{"n", inst.graph().n}, {"edges", std::move(edges)}};
  }
  return j;
}

ProblemInstance instance_from(const json& j) {
  ProblemInstance inst;
  inst.app = app_from_name(j.at("app").get<std::string>());
  inst.seed = j.at("seed").get<std::uint64_t>();
  if (inst.app == App::TSP) {
    TspInstance t;
    t.n = j.at("tsp").at("n").get<std::uint32_t>();
    for (const auto& w : j.at("tsp").at("weights")) t.weights.push_back(get_real(w));
    inst.payload = std::move(t);
  } else {
    std::vector<Edge> edges;
    for (const auto& e : j.at("graph").at("edges")) {
      edges.push_back({e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>(), get_real(e.at(2))});
    }
    inst.payload = make_graph(j.at("graph").at("n").get<std::uint32_t>(), std::move(edges));
  }
  return inst;
}

json to_json(const RunConfig& c) {
  json x0 = json::array();
  for (double v : c.x0) x0.push_back(real(v));
  return {{"p", c.p},
          {"shots", c.shots},
          {"optimizer",
           {{"kind", std::string(optimizer_name(c.optimizer.kind))},
            {"starts", c.optimizer.starts},
            {"samples", c.optimizer.samples},
            {"refine", c.optimizer.refine}}},
          {"max_evals", c.opt.max_evals},
          {"tol", real(c.opt.tol)},
          {"optimizer_seed", c.opt.seed},
          {"exact_expectation", c.exact_expectation},
          {"max_qubits", c.max_qubits},
          {"tsp",
           {{"row_weight", c.tsp.row_weight},
            {"mixer_pairs_per_row", c.tsp.mixer_pairs_per_row},
            {"column_penalty", real(c.tsp.column_penalty)}}},
          {"x0", std::move(x0)}};
}

RunConfig run_config_from(const json& j) {
  RunConfig c;
  c.p = j.at("p").get<std::uint32_t>();
  c.shots = j.at("shots").get<std::uint64_t>();
  const json& o = j.at("optimizer");
  c.optimizer.kind = optimizer_from_name(o.at("kind").get<std::string>());
  c.optimizer.starts = o.at("starts").get<std::uint32_t>();
  c.optimizer.samples = o.at("samples").get<std::uint32_t>();
  c.optimizer.refine = o.at("refine").get<std::uint32_t>();
  c.opt.max_evals = j.at("max_evals").get<std::uint64_t>();
  c.opt.tol = get_real(j.at("tol"));
  c.opt.seed = j.at("optimizer_seed").get<std::uint64_t>();
  c.exact_expectation = j.at("exact_expectation").get<bool>();
  c.max_qubits = j.at("max_qubits").get<std::uint32_t>();
  const json& t = j.at("tsp");
  c.tsp.row_weight = t.at("row_weight").get<std::uint32_t>();
  c.tsp.mixer_pairs_per_row = t.at("mixer_pairs_per_row").get<std::uint32_t>();
  c.tsp.column_penalty = get_real(t.at("column_penalty"));
  for (const auto& v : j.at("x0")) c.x0.push_back(get_real(v));
  return c;
}

json to_json(const BenchConfig& c) {
  json apps = json::array();
  for (App a : c.apps) apps.push_back(std::string(app_name(a)));
  return {{"apps", std::move(apps)},
          {"n_min", c.n_min},
          {"n_max", c.n_max},
          {"p_policy", std::string(p_policy_name(c.p_policy))},
          {"p_fixed", c.p_fixed},
          {"p_sweep", c.p_sweep},
          {"p_cap", c.p_cap},
          {"p_tol", real(c.p_tol)},
          {"runs", c.runs},
          {"seed", c.seed},
          {"pin_instance", c.pin_instance},
          {"problem", c.problem ? to_json(*c.problem) : json(nullptr)},
          {"bias_qubits", c.bias_qubits},
          {"bias_shots", c.bias_shots},
          {"run", to_json(c.run)}};
}

BenchConfig bench_config_from(const json& j) {
  BenchConfig c;
  c.apps.clear();
  for (const auto& a : j.at("apps")) c.apps.push_back(app_from_name(a.get<std::string>()));
  c.n_min = j.at("n_min").get<std::uint32_t>();
  c.n_max = j.at("n_max").get<std::uint32_t>();
  c.p_policy = p_policy_from_name(j.at("p_policy").get<std::string>());
  c.p_fixed = j.at("p_fixed").get<std::uint32_t>();
  c.p_sweep = j.at("p_sweep").get<std::vector<std::uint32_t>>();
  c.p_cap = j.at("p_cap").get<std::uint32_t>();
  c.p_tol = get_real(j.at("p_tol"));
  c.runs = j.at("runs").get<std::uint32_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.pin_instance = j.at("pin_instance").get<bool>();
  if (!j.at("problem").is_null()) c.problem = instance_from(j.at("problem"));
  c.bias_qubits = j.at("bias_qubits").get<std::uint32_t>();
  c.bias_shots = j.at("bias_shots").get<std::uint64_t>();
  c.run = run_config_from(j.at("run"));
  return c;
}

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string_view tool_version() { return "0.1.0"; }

double round_sig9(double value) {
  if (value == 0.0) return 0.0;  // folds -0
  if (!std::isfinite(value)) return value;
  return std::strtod(fmt9(value).c_str(), nullptr);
}

ExpFit fit_exponential(const std::vector<std::pair<double, double>>& points) {
  detail::require(points.size() >= 3, "fit_exponential: need at least 3 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [n, t] : points) {
    detail::require(std::isfinite(n) && std::isfinite(t), "fit_exponential: non-finite point");
    detail::require(t > 0.0, "fit_exponential: ordinates must be positive");
    sx += n;
    sy += std::log(t);
  }
  const double k = static_cast<double>(points.size());
  const double mx = sx / k, my = sy / k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [n, t] : points) {
    const double dx = n - mx, dy = std::log(t) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  detail::require(sxx > 0.0, "fit_exponential: need at least two distinct n");
  ExpFit fit;
  fit.b = sxy / sxx;
  fit.a = std::exp(my - fit.b * mx);
  if (syy <= 0.0) {
    fit.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (const auto& [n, t] : points) {
      const double e = std::log(t) - (my + fit.b * (n - mx));
      ss_res += e * e;
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

std::string serialize_report(const BenchmarkReport& report) {
  json sweeps = json::array();
  for (const auto& s : report.sweeps) sweeps.push_back(to_json(s));
  const json j = {{"schema_version", kReportSchemaVersion},
                  {"tool", "qpack"},
                  {"version", report.version},
                  {"config", to_json(report.config)},
                  {"bias", to_json(report.bias)},
                  {"sweeps", std::move(sweeps)},
                  {"peak_statevector_bytes", report.peak_statevector_bytes},
                  {"wall_clock_s", real(report.wall_clock_s)}};
  return j.dump() + "\n";
}

BenchmarkReport deserialize_report(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("report: invalid JSON: ") + e.what());
  }
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kReportSchemaVersion) {
      throw ValidationError("report: unsupported schema_version " + std::to_string(version));
    }
    BenchmarkReport r;
    r.version = j.at("version").get<std::string>();
    r.config = bench_config_from(j.at("config"));
    r.bias = bias_from(j.at("bias"));
    for (const auto& s : j.at("sweeps")) r.sweeps.push_back(sweep_from(s));
    r.peak_statevector_bytes = j.at("peak_statevector_bytes").get<std::uint64_t>();
    r.wall_clock_s = get_real(j.at("wall_clock_s"));
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("report: malformed: ") + e.what());
  }
}

BenchmarkReport canonical(const BenchmarkReport& report) {
  return deserialize_report(serialize_report(report));
}

void write_csv(const BenchmarkReport& report, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& s : report.sweeps) {
    for (const auto& r : s.sizes) {
      const TimingBreakdown& t = r.mean_timings;
      out << app_name(s.app) << ',' << r.n << ',' << r.p << ',' << fmt9(r.success_probability)
          << ',' << fmt9(r.mean_r_opt) << ',' << fmt9(t.compile_s) << ',' << fmt9(t.classical_s)
          << ',' << fmt9(t.communication_s) << ',' << fmt9(t.quantum_s) << ','
          << fmt9(t.total_s) << '\n';
    }
  }
}

void write_csv(const BenchmarkReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(report, out);
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_json(const BenchmarkReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << serialize_report(report);
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string summarize(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "qpack " << report.version << "\n";
  for (const auto& s : report.sweeps) {
    out << app_name(s.app) << " p=" << s.p << ": ";
    std::uint32_t solved = 0;
    for (const auto& r : s.sizes) {
      if (r.success_probability >= 0.5) solved = r.n;
    }
    if (solved > 0) {
      out << "max solved n=" << solved;
    } else {
      out << "no size solved";
    }
    out << ", stopped: " << stop_reason_name(s.stop_reason) << "\n";
    if (s.sizes.size() >= 3) {
      std::vector<std::pair<double, double>> pts;
      bool positive = true;
      for (const auto& r : s.sizes) {
        positive = positive && r.mean_timings.total_s > 0.0;
        pts.emplace_back(r.n, r.mean_timings.total_s);
      }
      if (positive) {
        const ExpFit fit = fit_exponential(pts);
        out << "  total_s ~ a*exp(b*n): a=" << fmt9(fit.a) << " b=" << fmt9(fit.b)
            << " r2=" << fmt9(fit.r_squared) << "\n";
      } else {
        out << "  fit omitted: non-positive run-time\n";
      }
    } else {
      out << "  fit omitted: " << s.sizes.size() << " size(s), need at least 3\n";
    }
  }
  const BiasReport& b = report.bias;
  out << "bias: ones_fraction=" << fmt9(b.ones_fraction) << " bias=" << fmt9(b.bias)
      << " ci=" << fmt9(b.ci_halfwidth) << " -> "
      << (b.detected() ? "bias detected" : "no bias detected") << "\n";
  out << "peak state vector: " << report.peak_statevector_bytes << " bytes\n";
  return out.str();
}

}  // namespace qpack
