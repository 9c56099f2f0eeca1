#pragma once

// Benchmark reports: canonical JSON, CSV, exponential run-time fits and a
// plain-text summary.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qpack/bench.hpp"

namespace qpack {

inline constexpr int kReportSchemaVersion = 1;

std::string_view tool_version();

struct BenchmarkReport {
  std::string version{tool_version()};
  BenchConfig config;
  BiasReport bias;
  std::vector<ScalingReport> sweeps;
  /// Largest state vector allocated, 16 * 2^qubits bytes.
  std::uint64_t peak_statevector_bytes = 0;
  double wall_clock_s = 0.0;

  friend bool operator==(const BenchmarkReport&, const BenchmarkReport&) = default;
};

/// t = a * exp(b * n).
struct ExpFit {
  double a = 1.0;
  double b = 0.0;
  double r_squared = 0.0;  // in log space
};

/// Least squares on ln t = ln a + b n. Needs at least 3 points, positive t
/// and at least two distinct n.
ExpFit fit_exponential(const std::vector<std::pair<double, double>>& points);

/// Rounds to 9 significant digits, the precision reports are stored at.
double round_sig9(double value);

/// Canonical JSON: sorted keys, reals at 9 significant digits, no
/// insignificant whitespace, trailing newline.
std::string serialize_report(const BenchmarkReport& report);
BenchmarkReport deserialize_report(const std::string& text);

/// The report as it reads back from JSON (reals rounded).
BenchmarkReport canonical(const BenchmarkReport& report);

inline constexpr const char* kCsvHeader =
    "app,n,p,success_probability,mean_r_opt,mean_compile_s,mean_classical_s,"
    "mean_communication_s,mean_quantum_s,mean_total_s";

/// One row per (sweep, size).
void write_csv(const BenchmarkReport& report, std::ostream& out);
void write_csv(const BenchmarkReport& report, const std::filesystem::path& path);
void write_json(const BenchmarkReport& report, const std::filesystem::path& path);

/// Per sweep: largest size with success >= 0.5, stop reason, total-time fit
/// when at least 3 sizes exist; then the bias verdict.
std::string summarize(const BenchmarkReport& report);

}  // namespace qpack
