#pragma once

// QAOA circuit builders for MaxCut, dominating set and TSP, plus the closed
// form gate-count tables the builders are compared against.

#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

#include "qpack/problems.hpp"
#include "qpack/simkit.hpp"

namespace qpack {

/// Angles for p QAOA layers: gammas in [0, 2pi], betas in [0, pi].
struct QaoaParams {
  std::vector<double> gammas;
  std::vector<double> betas;

  std::size_t p() const { return gammas.size(); }

  /// Flat layout used by the optimizers: [gamma_1..gamma_p, beta_1..beta_p].
  std::vector<double> to_vector() const;
  static QaoaParams from_vector(std::span<const double> x);
  static QaoaParams zeros(std::size_t p);

  friend bool operator==(const QaoaParams&, const QaoaParams&) = default;
};

/// Throws ValidationError unless p >= 1, lengths match and angles are in range.
void validate(const QaoaParams& params);

struct CircuitLayout {
  std::uint32_t n_problem_qubits = 0;
  std::uint32_t n_ancilla = 0;
  std::uint32_t total = 0;

  friend bool operator==(const CircuitLayout&, const CircuitLayout&) = default;
};

struct BuiltCircuit {
  Circuit circuit;
  CircuitLayout layout;
};

/// H on every vertex; per layer one CNOT-RZ-CNOT per edge and RX(2 beta) per
/// vertex. No ancillas.
Circuit build_maxcut_circuit(const Graph& graph, const QaoaParams& params);

// ---------------------------------------------------------------------------
// Logical OR

/// 2-input OR into a clean ancilla: CNOT(a,t) CNOT(b,t) CCX(a,b,t), since
/// a ^ b ^ ab = a | b. The block is its own inverse.
void append_or2(Circuit& circuit, Qubit a, Qubit b, Qubit target);

/// Chains 2-ORs so that ancillas.back() = OR(inputs). Needs
/// ancillas.size() == inputs.size() - 1 clean ancillas.
void append_or_compute(Circuit& circuit, std::span<const Qubit> inputs,
                       std::span<const Qubit> ancillas);
/// Reverses append_or_compute, returning every ancilla to |0>.
void append_or_uncompute(Circuit& circuit, std::span<const Qubit> inputs,
                         std::span<const Qubit> ancillas);

struct OrCascade {
  Circuit compute;    // qubits 0..k-1 inputs, k..2k-2 ancillas
  Circuit uncompute;  // same register
  CircuitLayout layout;
  Qubit result = 0;   // last ancilla
};

OrCascade or_cascade(std::uint32_t k);

// ---------------------------------------------------------------------------
// Dominating set

/// Layout: problem qubits 0..n-1, OR ancillas n..n+kmax-2, phase target last,
/// where kmax is the largest closed neighbourhood.
///
/// Per layer and vertex v the clause "v is dominated" is the OR over N[v];
/// it drives CRZ(2 gamma) onto the phase target, which stays in |0> (an RZ
/// eigenstate) so only a phase is kicked back. The 1/(n+1) size reward is a
/// plain RZ(gamma/(n+1)) on each problem qubit, then RX(2 beta) mixes.
BuiltCircuit build_dsp_circuit(const Graph& graph, const QaoaParams& params);

/// Re-tallies raw counts at the rate used by the published DSP table: every
/// multi-qubit interaction (CNOT, CCX, CRZ) counts as one CNOT, so a 2-OR
/// block costs 3 CNOT. Other kinds are unchanged.
GateCounts paper_rate_counts(const GateCounts& raw);

// ---------------------------------------------------------------------------
// Dicke states and TSP

/// Prepares |D(n,k)> from |0...0> (split-and-cyclic-shift construction).
Circuit build_dicke_prep(std::uint32_t n, std::uint32_t k);
void append_dicke_prep(Circuit& circuit, std::span<const Qubit> qubits, std::uint32_t k);

struct TspCircuitOptions {
  /// Hamming weight prepared on each row (time step).
  std::uint32_t row_weight = 2;
  /// Ring edges per row that receive an RXX+RYY pair in each layer; the
  /// window rotates from layer to layer. n or more means the full ring.
  std::uint32_t mixer_pairs_per_row = 2;
  /// Weight of the "one time step per city" column penalty; negative selects
  /// n * max_weight.
  double column_penalty = -1.0;

  friend bool operator==(const TspCircuitOptions&, const TspCircuitOptions&) = default;
};

/// Diagonal TSP energy in Ising form: sum_q fields[q] Z_q +
/// sum couplings (a, b, K) Z_a Z_b + offset.
struct IsingForm {
  std::vector<double> fields;
  std::vector<std::tuple<Qubit, Qubit, double>> couplings;
  double offset = 0.0;
};

double resolved_column_penalty(const TspInstance& inst, const TspCircuitOptions& options);

/// Tour term sum_t sum_{i != j} w_ij x(t,i) x(t+1,j) plus
/// penalty * sum_c (sum_t x(t,c) - 1)^2 over the n^2 qubits q = t*n + c.
IsingForm tsp_ising(const TspInstance& inst, double column_penalty);
/// The same energy evaluated classically on a basis index.
double tsp_energy_bits(const TspInstance& inst, double column_penalty, std::uint64_t x);

/// n^2 qubits, row t holds step t. Dicke prep per row, then per layer RZ on
/// every qubit and RZZ per coupling (angles 2 gamma h, 2 gamma K), then the
/// XY ring mixer RXX(2 beta) RYY(2 beta). Throws CapacityError above max_qubits.
BuiltCircuit build_tsp_circuit(const TspInstance& inst, const QaoaParams& params,
                               const TspCircuitOptions& options = {},
                               std::uint32_t max_qubits = default_max_qubits());

/// Qubits a circuit for this instance occupies (problem + ancilla).
std::uint32_t required_qubits(const ProblemInstance& inst, const TspCircuitOptions& options = {});

// ---------------------------------------------------------------------------
// Published resource tables

enum class ResourceTable { MCP, DSP, TspPrep, TspCycles };

/// Closed forms, verbatim:
///   MCP        H n, CNOT 2mp, RZ mp, RX np
///   DSP        H n, X 2mp, CNOT (6n-5)mp, RZ mp, RX np   (upper bounds)
///   TspPrep    H 8n(n-2), T/Tdg 49n(n-2) (reported under T), CNOT (31n-28)n,
///              RY (6n-10)n, X 2n
///   TspCycles  RZ n^2 p, RZZ (n^2-n)/2 p, RXX 2np, RYY 2np
GateCounts paper_resource_formula(ResourceTable table, std::uint64_t n, std::uint64_t m,
                                  std::uint64_t p);

}  // namespace qpack
