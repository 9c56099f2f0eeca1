#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "json.hpp"
#include "qpack/errors.hpp"
#include "qpack/random.hpp"
#include "qpack/report.hpp"

using namespace qpack;

namespace {

SizeRecord size_record(std::uint32_t n, double success, double total) {
  SizeRecord rec;
  rec.n = n;
  rec.p = 1;
  rec.runs = 5;
  rec.qubits = n;
  rec.success_probability = success;
  rec.mean_r_opt = 0.812345678912345;
  rec.mean_expectation = n / 3.0;
  rec.mean_timings = {total * 0.1, total * 0.2, total * 0.3, total * 0.4, total};
  rec.peak_statevector_bytes = std::uint64_t{16} << n;
  return rec;
}

ScalingReport sweep(App app, std::uint32_t n_min, std::uint32_t count, StopReason reason) {
  ScalingReport s;
  s.app = app;
  s.p = 1;
  for (std::uint32_t i = 0; i < count; ++i) {
    s.sizes.push_back(size_record(n_min + i, 0.9, 0.002 * std::exp(0.7 * (n_min + i))));
  }
  s.stop_reason = reason;
  return s;
}

BenchmarkReport sample_report() {
  BenchmarkReport r;
  r.config.run.x0 = {0.1, 1.0 / 3.0};
  r.config.problem = generate_instance(App::MCP, 5, 9);
  r.config.apps = {App::MCP};
  r.bias = {5, 10000, 0.5012, 0.0012, 0.0043827};
  r.sweeps = {sweep(App::MCP, 3, 5, StopReason::SizeCap), sweep(App::DSP, 3, 2, StopReason::SuccessBelowHalf)};
  r.peak_statevector_bytes = 16u << 7;
  r.wall_clock_s = 1.23456789012;
  return r;
}

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("exponential fit on exact data") {
  const ExpFit f = fit_exponential({{1, std::exp(1.0)}, {2, std::exp(2.0)}, {3, std::exp(3.0)}});
  CHECK(f.a == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.b == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-9));

  std::vector<std::pair<double, double>> pts;
  for (int n = 4; n <= 12; ++n) pts.emplace_back(n, 0.37 * std::exp(-0.21 * n));
  const ExpFit g = fit_exponential(pts);
  CHECK(std::abs(g.a / 0.37 - 1) < 1e-9);
  CHECK(std::abs(g.b / -0.21 - 1) < 1e-9);
}

TEST_CASE("exponential fit on a constant") {
  const ExpFit f = fit_exponential({{1, 5}, {2, 5}, {3, 5}});
  CHECK(f.a == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(std::abs(f.b) < 1e-12);
  CHECK(f.r_squared >= 0.0);
  CHECK(f.r_squared <= 1.0);
}

TEST_CASE("exponential fit recovers a noisy rate") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<std::pair<double, double>> pts;
    for (int n = 1; n <= 10; ++n) pts.emplace_back(n, 2 * std::exp(0.3 * n) * (1 + noise(rng)));
    const ExpFit f = fit_exponential(pts);
    CHECK(std::abs(f.b - 0.3) < 0.05);
    CHECK(f.r_squared > 0.9);
  }
}

TEST_CASE("exponential fit preconditions") {
  CHECK_THROWS_AS(fit_exponential({{1, 1}, {2, 2}}), ValidationError);
  CHECK_THROWS_AS(fit_exponential({{1, 1}, {2, 0}, {3, 2}}), ValidationError);
  CHECK_THROWS_AS(fit_exponential({{1, 1}, {2, -1}, {3, 2}}), ValidationError);
  CHECK_THROWS_AS(fit_exponential({{2, 1}, {2, 2}, {2, 3}}), ValidationError);
}

TEST_CASE("round_sig9") {
  CHECK(round_sig9(1.23456789012) == 1.23456789);
  CHECK(round_sig9(0.0) == 0.0);
  CHECK(round_sig9(-2.5e-7) == -2.5e-7);
  CHECK(round_sig9(123456789012.0) == 123456789000.0);
}

TEST_CASE("serialization is canonical and round-trips") {
  const BenchmarkReport r = canonical(sample_report());
  const std::string a = serialize_report(r);
  const std::string b = serialize_report(r);
  CHECK(a == b);
  CHECK(a.back() == '\n');
  CHECK(deserialize_report(a) == r);
  CHECK(serialize_report(deserialize_report(a)) == a);
  // Canonicalizing twice changes nothing.
  CHECK(canonical(r) == r);
  // The raw report serializes to the same bytes as its canonical form.
  CHECK(serialize_report(sample_report()) == a);
}

TEST_CASE("serialized keys are sorted and versioned") {
  const nlohmann::json j = nlohmann::json::parse(serialize_report(sample_report()));
  CHECK(j.at("schema_version") == kReportSchemaVersion);
  CHECK(j.at("version") == tool_version());
  CHECK(j.at("sweeps").size() == 2);
  CHECK(j.at("sweeps")[1].at("stop_reason") == "success_below_half");
  CHECK(j.at("sweeps")[0].at("app") == "maxcut");
  CHECK(j.at("sweeps")[0].at("sizes")[0].at("mean_r_opt").get<double>() == 0.812345679);
  const std::string text = serialize_report(sample_report());
  CHECK(text.find(' ') == std::string::npos);
  CHECK(text.find("\"bias\"") < text.find("\"config\""));
}

TEST_CASE("empty report has every required key") {
  const BenchmarkReport empty;
  const nlohmann::json j = nlohmann::json::parse(serialize_report(empty));
  for (const char* key : {"schema_version", "tool", "version", "config", "bias", "sweeps",
                          "peak_statevector_bytes", "wall_clock_s"}) {
    CHECK(j.contains(key));
  }
  CHECK(j.at("sweeps").empty());
  CHECK(deserialize_report(serialize_report(empty)) == empty);
}

TEST_CASE("deserialization rejects bad input") {
  CHECK_THROWS_AS(deserialize_report("not json"), ValidationError);
  CHECK_THROWS_AS(deserialize_report("{}"), ValidationError);
  nlohmann::json j = nlohmann::json::parse(serialize_report(BenchmarkReport{}));
  j["schema_version"] = 2;
  CHECK_THROWS_AS(deserialize_report(j.dump()), ValidationError);
}

TEST_CASE("csv rows") {
  BenchmarkReport one;
  one.sweeps = {sweep(App::MCP, 4, 1, StopReason::SizeCap)};
  std::ostringstream a;
  write_csv(one, a);
  CHECK(line_count(a.str()) == 2);
  CHECK(a.str().rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(a.str().find("\nmaxcut,4,1,") != std::string::npos);

  BenchmarkReport six;
  six.sweeps = {sweep(App::MCP, 3, 2, StopReason::SizeCap), sweep(App::DSP, 3, 2, StopReason::QubitLimit),
                sweep(App::TSP, 3, 2, StopReason::SuccessBelowHalf)};
  std::ostringstream b;
  write_csv(six, b);
  CHECK(line_count(b.str()) == 7);

  CHECK(std::string(kCsvHeader) ==
        "app,n,p,success_probability,mean_r_opt,mean_compile_s,mean_classical_s,"
        "mean_communication_s,mean_quantum_s,mean_total_s");
}

TEST_CASE("csv and json files") {
  const auto dir = std::filesystem::temp_directory_path() / "qpack_report_test";
  std::filesystem::create_directories(dir);
  const BenchmarkReport r = sample_report();
  write_csv(r, dir / "r.csv");
  write_json(r, dir / "r.json");
  std::ifstream in(dir / "r.json");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(deserialize_report(ss.str()) == canonical(r));
  std::ifstream csv(dir / "r.csv");
  std::stringstream cs;
  cs << csv.rdbuf();
  CHECK(line_count(cs.str()) == 1 + 5 + 2);
  std::filesystem::remove_all(dir);

  try {
    write_csv(r, std::filesystem::path("/nonexistent-dir/x/out.csv"));
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent-dir/x/out.csv") != std::string::npos);
  }
}

TEST_CASE("summary") {
  BenchmarkReport r = sample_report();
  const std::string text = summarize(r);
  CHECK(text.find("maxcut p=1: max solved n=7") != std::string::npos);
  CHECK(text.find("total_s ~ a*exp(b*n): a=0.002 b=0.7 r2=1") != std::string::npos);
  CHECK(text.find("fit omitted: 2 size(s), need at least 3") != std::string::npos);
  CHECK(text.find("stopped: success_below_half") != std::string::npos);
  CHECK(text.find("no bias detected") != std::string::npos);

  r.bias = {5, 10000, 0.45, -0.05, 0.0044};
  CHECK(summarize(r).find("-> bias detected") != std::string::npos);
}
