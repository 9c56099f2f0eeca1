#pragma once

/**
 * Dense state-vector simulator.
 *
 * Conventions:
 *  - qubit 0 is the least-significant bit of a basis-state index;
 *  - bitstrings are written with qubit 0 as the leftmost character, so the
 *    string "100" on three qubits is basis index 1;
 *  - RX/RY/RZ(t) = exp(-i t P / 2), RZZ/RXX/RYY(t) = exp(-i t PP / 2),
 *    CRZ applies RZ(t) to the target when the control is 1;
 *  - for controlled kinds the control qubits come first and the target last.
 *
 * Global phase is not tracked; only |amplitude|^2 and diagonal expectations
 * are meaningful across equivalent circuits.
 */

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qpack {

using Amplitude = std::complex<double>;
using Qubit = std::uint32_t;

enum class GateKind {
  H,
  X,
  T,
  Tdg,
  RX,
  RY,
  RZ,
  CNOT,
  CRZ,
  CCX,
  RZZ,
  RXX,
  RYY,
};

inline constexpr std::array<GateKind, 13> kAllGateKinds = {
    GateKind::H,   GateKind::X,   GateKind::T,   GateKind::Tdg, GateKind::RX,
    GateKind::RY,  GateKind::RZ,  GateKind::CNOT, GateKind::CRZ, GateKind::CCX,
    GateKind::RZZ, GateKind::RXX, GateKind::RYY};

std::string_view gate_name(GateKind kind);
std::optional<GateKind> gate_kind_from_name(std::string_view name);
/// Number of qubit operands (1, 2 or 3).
int gate_arity(GateKind kind);
bool gate_takes_angle(GateKind kind);

struct Gate {
  GateKind kind = GateKind::H;
  std::array<Qubit, 3> qubits{};
  double angle = 0.0;

  std::span<const Qubit> operands() const {
    return {qubits.data(), static_cast<std::size_t>(gate_arity(kind))};
  }
  /// The adjoint gate (angle negated, T <-> Tdg, self-inverse kinds unchanged).
  Gate inverse() const;

  friend bool operator==(const Gate&, const Gate&) = default;
};

Gate make_gate(GateKind kind, std::initializer_list<Qubit> qubits, double angle = 0.0);

/// Per-kind tally of a circuit. Kinds that do not occur are absent.
using GateCounts = std::map<GateKind, std::uint64_t>;

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(std::uint32_t n_qubits) : n_qubits_(n_qubits) {}

  std::uint32_t n_qubits() const { return n_qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }

  /// Validates operands against n_qubits() and appends.
  Circuit& add(const Gate& gate);

  Circuit& h(Qubit q) { return add(make_gate(GateKind::H, {q})); }
  Circuit& x(Qubit q) { return add(make_gate(GateKind::X, {q})); }
  Circuit& t(Qubit q) { return add(make_gate(GateKind::T, {q})); }
  Circuit& tdg(Qubit q) { return add(make_gate(GateKind::Tdg, {q})); }
  Circuit& rx(Qubit q, double a) { return add(make_gate(GateKind::RX, {q}, a)); }
  Circuit& ry(Qubit q, double a) { return add(make_gate(GateKind::RY, {q}, a)); }
  Circuit& rz(Qubit q, double a) { return add(make_gate(GateKind::RZ, {q}, a)); }
  Circuit& cnot(Qubit c, Qubit t) { return add(make_gate(GateKind::CNOT, {c, t})); }
  Circuit& crz(Qubit c, Qubit t, double a) { return add(make_gate(GateKind::CRZ, {c, t}, a)); }
  Circuit& ccx(Qubit c0, Qubit c1, Qubit t) { return add(make_gate(GateKind::CCX, {c0, c1, t})); }
  Circuit& rzz(Qubit a, Qubit b, double t) { return add(make_gate(GateKind::RZZ, {a, b}, t)); }
  Circuit& rxx(Qubit a, Qubit b, double t) { return add(make_gate(GateKind::RXX, {a, b}, t)); }
  Circuit& ryy(Qubit a, Qubit b, double t) { return add(make_gate(GateKind::RYY, {a, b}, t)); }

  /// Appends `other`, relabelling its qubit i as mapping[i].
  Circuit& append(const Circuit& other, std::span<const Qubit> mapping);
  /// Appends `other` acting on the same qubit labels.
  Circuit& append(const Circuit& other);

  /// Gates in reverse order, each replaced by its inverse.
  Circuit inverse() const;

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  std::uint32_t n_qubits_ = 0;
  std::vector<Gate> gates_;
};

GateCounts count_gates(const Circuit& circuit);

/// Largest register new_state() accepts unless told otherwise: the value of
/// QPACK_MAX_QUBITS when set, 24 otherwise. Never above kHardQubitLimit.
std::uint32_t default_max_qubits();
inline constexpr std::uint32_t kHardQubitLimit = 30;

class StateVector {
 public:
  std::uint32_t n_qubits() const { return n_qubits_; }
  std::size_t dimension() const { return amps_.size(); }
  std::span<const Amplitude> amplitudes() const { return amps_; }
  std::span<Amplitude> amplitudes() { return amps_; }
  /// Bytes held by the amplitude array (16 * 2^n).
  std::uint64_t bytes() const { return amps_.size() * sizeof(Amplitude); }

  double norm_squared() const;
  std::vector<double> probabilities() const;

  friend StateVector new_state(std::uint32_t n_qubits, std::uint32_t max_qubits);
  static StateVector from_amplitudes(std::vector<Amplitude> amps);

 private:
  std::uint32_t n_qubits_ = 0;
  std::vector<Amplitude> amps_;
};

/// |0...0> on n_qubits. Throws CapacityError for n = 0 or n > max_qubits.
StateVector new_state(std::uint32_t n_qubits, std::uint32_t max_qubits);
StateVector new_state(std::uint32_t n_qubits);

void apply_gate(StateVector& state, const Gate& gate);
void run_circuit(StateVector& state, const Circuit& circuit);

/// Sum over basis states of |amp_z|^2 * cost(z).
double expectation_diagonal(const StateVector& state,
                            const std::function<double(std::uint64_t)>& cost);
/// Same with a tabulated cost; the table is indexed by the low log2(size)
/// bits of the basis index, so a table over the first k qubits marginalizes
/// the rest. Size must be a power of two no larger than the state.
double expectation_diagonal(const StateVector& state, std::span<const double> cost_table);

struct SampleSet {
  std::uint64_t shots = 0;
  std::map<std::string, std::uint64_t> outcomes;

  /// Most frequent outcome; ties go to the lexicographically smallest string.
  const std::string& modal() const;

  friend bool operator==(const SampleSet&, const SampleSet&) = default;
};

/// Basis indices drawn from |amp|^2; a pure function of (state, shots, seed).
std::vector<std::uint64_t> sample_indices(const StateVector& state, std::uint64_t shots,
                                          std::uint64_t seed);
SampleSet sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed);
/// Keeps only the first `n_bits` characters (qubits 0..n_bits-1) of each outcome.
SampleSet marginalize(const SampleSet& samples, std::uint32_t n_bits);

std::string to_bitstring(std::uint64_t index, std::uint32_t n_bits);
std::uint64_t from_bitstring(std::string_view bits);

}  // namespace qpack
