#include "qpack/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "qpack/errors.hpp"

namespace qpack {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<Qubit> iota_qubits(Qubit first, std::uint32_t count) {
  std::vector<Qubit> q(count);
  for (std::uint32_t i = 0; i < count; ++i) q[i] = first + i;
  return q;
}

// Controlled RY via two CNOTs; the doubly controlled version swaps in CCX.
void append_cry(Circuit& c, Qubit control, Qubit target, double angle) {
  c.ry(target, angle / 2.0).cnot(control, target).ry(target, -angle / 2.0).cnot(control, target);
}

void append_ccry(Circuit& c, Qubit c0, Qubit c1, Qubit target, double angle) {
  c.ry(target, angle / 2.0).ccx(c0, c1, target).ry(target, -angle / 2.0).ccx(c0, c1, target);
}

// Split-and-cyclic-shift block on labels 1..l (label j lives on q[j-1]).
void append_scs(Circuit& c, std::span<const Qubit> q, std::uint32_t l, std::uint32_t k) {
  auto at = [&](std::uint32_t label) { return q[label - 1]; };
  c.cnot(at(l - 1), at(l));
  append_cry(c, at(l), at(l - 1), 2.0 * std::acos(std::sqrt(1.0 / l)));
  c.cnot(at(l - 1), at(l));
  for (std::uint32_t j = 2; j <= k; ++j) {
    c.cnot(at(l - j), at(l));
    append_ccry(c, at(l), at(l - j + 1), at(l - j),
                2.0 * std::acos(std::sqrt(static_cast<double>(j) / l)));
    c.cnot(at(l - j), at(l));
  }
}

}  // namespace

std::vector<double> QaoaParams::to_vector() const {
  std::vector<double> x(gammas);
  x.insert(x.end(), betas.begin(), betas.end());
  return x;
}

QaoaParams QaoaParams::from_vector(std::span<const double> x) {
  detail::require(!x.empty() && x.size() % 2 == 0, "QAOA parameter vector must have length 2p");
  const std::size_t p = x.size() / 2;
  return {std::vector<double>(x.begin(), x.begin() + p), std::vector<double>(x.begin() + p, x.end())};
}

QaoaParams QaoaParams::zeros(std::size_t p) {
  return {std::vector<double>(p, 0.0), std::vector<double>(p, 0.0)};
}

void validate(const QaoaParams& params) {
  detail::require(params.p() >= 1, "QAOA depth p must be at least 1");
  detail::require(params.gammas.size() == params.betas.size(),
                  "QAOA gammas and betas must have the same length");
  for (double g : params.gammas) {
    detail::require(std::isfinite(g) && g >= 0.0 && g <= kTwoPi, "gamma must lie in [0, 2pi]");
  }
  for (double b : params.betas) {
    detail::require(std::isfinite(b) && b >= 0.0 && b <= std::numbers::pi,
                    "beta must lie in [0, pi]");
  }
}

Circuit build_maxcut_circuit(const Graph& graph, const QaoaParams& params) {
  validate(graph);
  validate(params);
  detail::require(graph.n >= 2, "build_maxcut_circuit: need at least 2 vertices");
  Circuit c(graph.n);
  for (Qubit q = 0; q < graph.n; ++q) c.h(q);
  for (std::size_t layer = 0; layer < params.p(); ++layer) {
    const double gamma = params.gammas[layer];
    // exp(-i gamma w (1 - ZZ)/2) equals CNOT RZ(-gamma w) CNOT up to global phase.
    for (const Edge& e : graph.edges) c.cnot(e.u, e.v).rz(e.v, -gamma * e.w).cnot(e.u, e.v);
    for (Qubit q = 0; q < graph.n; ++q) c.rx(q, 2.0 * params.betas[layer]);
  }
  return c;
}

void append_or2(Circuit& circuit, Qubit a, Qubit b, Qubit target) {
  circuit.cnot(a, target).cnot(b, target).ccx(a, b, target);
}

void append_or_compute(Circuit& circuit, std::span<const Qubit> inputs,
                       std::span<const Qubit> ancillas) {
  detail::require(inputs.size() >= 2, "OR needs at least 2 inputs");
  detail::require(ancillas.size() == inputs.size() - 1, "OR over k inputs needs k-1 ancillas");
  append_or2(circuit, inputs[0], inputs[1], ancillas[0]);
  for (std::size_t i = 2; i < inputs.size(); ++i) {
    append_or2(circuit, inputs[i], ancillas[i - 2], ancillas[i - 1]);
  }
}

void append_or_uncompute(Circuit& circuit, std::span<const Qubit> inputs,
                         std::span<const Qubit> ancillas) {
  detail::require(inputs.size() >= 2, "OR needs at least 2 inputs");
  detail::require(ancillas.size() == inputs.size() - 1, "OR over k inputs needs k-1 ancillas");
  for (std::size_t i = inputs.size() - 1; i >= 2; --i) {
    append_or2(circuit, inputs[i], ancillas[i - 2], ancillas[i - 1]);
  }
  append_or2(circuit, inputs[0], inputs[1], ancillas[0]);
}

OrCascade or_cascade(std::uint32_t k) {
  detail::require(k >= 2, "or_cascade: need at least 2 inputs");
  OrCascade out;
  out.layout = {k, k - 1, 2 * k - 1};
  const auto inputs = iota_qubits(0, k);
  const auto ancillas = iota_qubits(k, k - 1);
  out.compute = Circuit(out.layout.total);
  out.uncompute = Circuit(out.layout.total);
  append_or_compute(out.compute, inputs, ancillas);
  append_or_uncompute(out.uncompute, inputs, ancillas);
  out.result = ancillas.back();
  return out;
}

BuiltCircuit build_dsp_circuit(const Graph& graph, const QaoaParams& params) {
  validate(graph);
  validate(params);
  detail::require(graph.n >= 2, "build_dsp_circuit: need at least 2 vertices");
  const std::uint32_t n = graph.n;
  std::vector<std::vector<Qubit>> neighborhoods(n);
  std::uint32_t kmax = 1;
  for (Qubit v = 0; v < n; ++v) {
    const auto nb = graph.closed_neighborhood(v);
    neighborhoods[v].assign(nb.begin(), nb.end());
    kmax = std::max<std::uint32_t>(kmax, static_cast<std::uint32_t>(nb.size()));
  }
  const std::uint32_t or_ancillas = kmax - 1;
  BuiltCircuit out;
  out.layout = {n, or_ancillas + 1, n + or_ancillas + 1};
  const Qubit target = n + or_ancillas;
  const auto ancillas = iota_qubits(n, or_ancillas);
  const double size_weight = 1.0 / static_cast<double>(n + 1);

  Circuit c(out.layout.total);
  for (Qubit q = 0; q < n; ++q) c.h(q);
  for (std::size_t layer = 0; layer < params.p(); ++layer) {
    const double gamma = params.gammas[layer];
    for (Qubit v = 0; v < n; ++v) {
      const auto& inputs = neighborhoods[v];
      if (inputs.size() == 1) {
        c.crz(inputs[0], target, 2.0 * gamma);
        continue;
      }
      const std::span<const Qubit> used(ancillas.data(), inputs.size() - 1);
      append_or_compute(c, inputs, used);
      c.crz(used.back(), target, 2.0 * gamma);
      append_or_uncompute(c, inputs, used);
    }
    for (Qubit v = 0; v < n; ++v) c.rz(v, gamma * size_weight);
    for (Qubit v = 0; v < n; ++v) c.rx(v, 2.0 * params.betas[layer]);
  }
  out.circuit = std::move(c);
  return out;
}

GateCounts paper_rate_counts(const GateCounts& raw) {
  GateCounts out;
  for (const auto& [kind, count] : raw) {
    switch (kind) {
      case GateKind::CCX:
      case GateKind::CRZ:
        out[GateKind::CNOT] += count;
        break;
      default:
        out[kind] += count;
    }
  }
  return out;
}

void append_dicke_prep(Circuit& circuit, std::span<const Qubit> qubits, std::uint32_t k) {
  const auto n = static_cast<std::uint32_t>(qubits.size());
  detail::require(n >= 1, "Dicke preparation needs at least one qubit");
  detail::require(k >= 1 && k <= n, "Dicke weight k must satisfy 1 <= k <= n");
  for (std::uint32_t label = n - k + 1; label <= n; ++label) circuit.x(qubits[label - 1]);
  for (std::uint32_t l = n; l >= 2; --l) append_scs(circuit, qubits, l, std::min(k, l - 1));
}

Circuit build_dicke_prep(std::uint32_t n, std::uint32_t k) {
  detail::require(n >= 1, "build_dicke_prep: need at least one qubit");
  detail::require(k >= 1 && k <= n, "build_dicke_prep: weight k must satisfy 1 <= k <= n");
  Circuit c(n);
  append_dicke_prep(c, iota_qubits(0, n), k);
  return c;
}

double resolved_column_penalty(const TspInstance& inst, const TspCircuitOptions& options) {
  if (options.column_penalty >= 0.0) return options.column_penalty;
  const double max_w = inst.weights.empty()
                           ? 0.0
                           : *std::max_element(inst.weights.begin(), inst.weights.end());
  return static_cast<double>(inst.n) * max_w;
}

IsingForm tsp_ising(const TspInstance& inst, double column_penalty) {
  const std::uint32_t n = inst.n;
  const std::uint32_t nq = n * n;
  std::vector<double> linear(nq, 0.0);
  std::map<std::pair<Qubit, Qubit>, double> quadratic;
  double constant = 0.0;
  auto qubit = [n](std::uint32_t t, std::uint32_t c) { return t * n + c; };

  for (std::uint32_t t = 0; t < n; ++t) {
    const std::uint32_t next = (t + 1) % n;
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j = 0; j < n; ++j) {
        if (i == j || inst.at(i, j) == 0.0) continue;
        quadratic[std::minmax(qubit(t, i), qubit(next, j))] += inst.at(i, j);
      }
    }
  }
  // (sum_t x - 1)^2 = -sum_t x + 2 sum_{t<u} x x' + 1 for binary x.
  if (column_penalty != 0.0) {
    for (std::uint32_t c = 0; c < n; ++c) {
      constant += column_penalty;
      for (std::uint32_t t = 0; t < n; ++t) {
        linear[qubit(t, c)] -= column_penalty;
        for (std::uint32_t u = t + 1; u < n; ++u) {
          quadratic[{qubit(t, c), qubit(u, c)}] += 2.0 * column_penalty;
        }
      }
    }
  }

  // x = (1 - Z)/2:  x_a = 1/2 - Z_a/2,  x_a x_b = (1 - Z_a - Z_b + Z_a Z_b)/4.
  IsingForm form;
  form.fields.assign(nq, 0.0);
  form.offset = constant;
  for (Qubit q = 0; q < nq; ++q) {
    form.offset += linear[q] / 2.0;
    form.fields[q] -= linear[q] / 2.0;
  }
  for (const auto& [pair, coeff] : quadratic) {
    form.offset += coeff / 4.0;
    form.fields[pair.first] -= coeff / 4.0;
    form.fields[pair.second] -= coeff / 4.0;
    form.couplings.emplace_back(pair.first, pair.second, coeff / 4.0);
  }
  return form;
}

double tsp_energy_bits(const TspInstance& inst, double column_penalty, std::uint64_t x) {
  const std::uint32_t n = inst.n;
  auto bit = [&](std::uint32_t t, std::uint32_t c) { return ((x >> (t * n + c)) & 1U) != 0; };
  double energy = 0.0;
  for (std::uint32_t t = 0; t < n; ++t) {
    const std::uint32_t next = (t + 1) % n;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!bit(t, i)) continue;
      for (std::uint32_t j = 0; j < n; ++j) {
        if (i != j && bit(next, j)) energy += inst.at(i, j);
      }
    }
  }
  for (std::uint32_t c = 0; c < n; ++c) {
    int column = -1;
    for (std::uint32_t t = 0; t < n; ++t) column += bit(t, c) ? 1 : 0;
    energy += column_penalty * column * column;
  }
  return energy;
}

BuiltCircuit build_tsp_circuit(const TspInstance& inst, const QaoaParams& params,
                               const TspCircuitOptions& options, std::uint32_t max_qubits) {
  validate(inst);
  validate(params);
  const std::uint32_t n = inst.n;
  detail::require(n >= 3, "build_tsp_circuit: need at least 3 cities");
  detail::require(options.row_weight >= 1 && options.row_weight <= n,
                  "build_tsp_circuit: row weight must lie in [1, n]");
  detail::require(options.mixer_pairs_per_row >= 1,
                  "build_tsp_circuit: need at least one mixer pair per row");
  const std::uint32_t nq = n * n;
  if (nq > std::min(max_qubits, kHardQubitLimit)) {
    throw CapacityError("TSP with " + std::to_string(n) + " cities needs " + std::to_string(nq) +
                        " qubits (limit " + std::to_string(max_qubits) + ")");
  }

  const IsingForm form = tsp_ising(inst, resolved_column_penalty(inst, options));
  BuiltCircuit out;
  out.layout = {nq, 0, nq};
  Circuit c(nq);
  for (std::uint32_t t = 0; t < n; ++t) append_dicke_prep(c, iota_qubits(t * n, n), options.row_weight);

  const std::uint32_t window = std::min(options.mixer_pairs_per_row, n);
  for (std::size_t layer = 0; layer < params.p(); ++layer) {
    const double gamma = params.gammas[layer];
    const double beta = params.betas[layer];
    for (Qubit q = 0; q < nq; ++q) c.rz(q, 2.0 * gamma * form.fields[q]);
    for (const auto& [a, b, k] : form.couplings) c.rzz(a, b, 2.0 * gamma * k);
    const std::uint32_t start = static_cast<std::uint32_t>((layer * window) % n);
    for (std::uint32_t t = 0; t < n; ++t) {
      for (std::uint32_t e = 0; e < window; ++e) {
        const std::uint32_t col = (start + e) % n;
        const Qubit a = t * n + col;
        const Qubit b = t * n + (col + 1) % n;
        c.rxx(a, b, 2.0 * beta).ryy(a, b, 2.0 * beta);
      }
    }
  }
  out.circuit = std::move(c);
  return out;
}

std::uint32_t required_qubits(const ProblemInstance& inst, const TspCircuitOptions&) {
  switch (inst.app) {
    case App::MCP:
      return inst.graph().n;
    case App::DSP: {
      std::uint32_t kmax = 1;
      for (Qubit v = 0; v < inst.graph().n; ++v) {
        kmax = std::max<std::uint32_t>(kmax,
                                       static_cast<std::uint32_t>(inst.graph().closed_neighborhood(v).size()));
      }
      return inst.graph().n + kmax;
    }
    case App::TSP:
      return inst.tsp().n * inst.tsp().n;
  }
  return 0;
}

GateCounts paper_resource_formula(ResourceTable table, std::uint64_t n, std::uint64_t m,
                                  std::uint64_t p) {
  detail::require(n >= 1 && p >= 1, "paper_resource_formula: n and p must be positive");
  switch (table) {
    case ResourceTable::MCP:
      detail::require(m >= 1, "paper_resource_formula: m must be positive");
      return {{GateKind::H, n},
              {GateKind::CNOT, 2 * m * p},
              {GateKind::RZ, m * p},
              {GateKind::RX, n * p}};
    case ResourceTable::DSP:
      detail::require(m >= 1, "paper_resource_formula: m must be positive");
      return {{GateKind::H, n},
              {GateKind::X, 2 * m * p},
              {GateKind::CNOT, (6 * n - 5) * m * p},
              {GateKind::RZ, m * p},
              {GateKind::RX, n * p}};
    case ResourceTable::TspPrep:
      detail::require(n >= 2, "paper_resource_formula: TSP preparation needs n >= 2");
      return {{GateKind::H, 8 * n * (n - 2)},
              {GateKind::T, 49 * n * (n - 2)},
              {GateKind::CNOT, (31 * n - 28) * n},
              {GateKind::RY, (6 * n - 10) * n},
              {GateKind::X, 2 * n}};
    case ResourceTable::TspCycles:
      return {{GateKind::RZ, n * n * p},
              {GateKind::RZZ, (n * n - n) / 2 * p},
              {GateKind::RXX, 2 * n * p},
              {GateKind::RYY, 2 * n * p}};
  }
  throw ValidationError("paper_resource_formula: unknown table");
}

}  // namespace qpack
