#include "qpack/simkit.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "qpack/errors.hpp"
#include "qpack/random.hpp"

namespace qpack {

namespace {

struct GateInfo {
  GateKind kind;
  std::string_view name;
  int arity;
  bool angle;
};

constexpr std::array<GateInfo, 13> kGateInfo = {{
    {GateKind::H, "H", 1, false},
    {GateKind::X, "X", 1, false},
    {GateKind::T, "T", 1, false},
    {GateKind::Tdg, "Tdg", 1, false},
    {GateKind::RX, "RX", 1, true},
    {GateKind::RY, "RY", 1, true},
    {GateKind::RZ, "RZ", 1, true},
    {GateKind::CNOT, "CNOT", 2, false},
    {GateKind::CRZ, "CRZ", 2, true},
    {GateKind::CCX, "CCX", 3, false},
    {GateKind::RZZ, "RZZ", 2, true},
    {GateKind::RXX, "RXX", 2, true},
    {GateKind::RYY, "RYY", 2, true},
}};

const GateInfo& info(GateKind kind) { return kGateInfo[static_cast<std::size_t>(kind)]; }

using Matrix2 = std::array<Amplitude, 4>;  // row-major

constexpr Amplitude kI{0.0, 1.0};

Matrix2 single_qubit_matrix(GateKind kind, double angle) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  const double r = std::numbers::sqrt2 / 2.0;
  switch (kind) {
    case GateKind::H:
      return {r, r, r, -r};
    case GateKind::X:
      return {0.0, 1.0, 1.0, 0.0};
    case GateKind::T:
      return {1.0, 0.0, 0.0, std::polar(1.0, std::numbers::pi / 4.0)};
    case GateKind::Tdg:
      return {1.0, 0.0, 0.0, std::polar(1.0, -std::numbers::pi / 4.0)};
    case GateKind::RX:
      return {c, -kI * s, -kI * s, c};
    case GateKind::RY:
      return {c, -s, s, c};
    case GateKind::RZ:
      return {std::polar(1.0, -angle / 2.0), 0.0, 0.0, std::polar(1.0, angle / 2.0)};
    default:
      break;
  }
  throw ValidationError("not a single-qubit gate kind");
}

// Visits every basis index with the given bits cleared, in increasing order,
// by spreading a compact counter around the cleared bit positions.
template <typename Fn>
void for_each_with_zero_bits(std::size_t dim, std::uint64_t mask, Fn&& fn) {
  std::array<int, 3> positions{};
  int count = 0;
  for (std::uint64_t m = mask; m != 0; m &= m - 1) positions[count++] = std::countr_zero(m);
  const std::uint64_t outer = dim >> count;
  for (std::uint64_t k = 0; k < outer; ++k) {
    std::uint64_t i = k;
    for (int j = 0; j < count; ++j) {
      const std::uint64_t low = i & ((std::uint64_t{1} << positions[j]) - 1);
      i = ((i >> positions[j]) << (positions[j] + 1)) | low;
    }
    fn(i);
  }
}

void apply_single(std::span<Amplitude> amps, Qubit q, const Matrix2& m) {
  const std::uint64_t bit = std::uint64_t{1} << q;
  const std::size_t dim = amps.size();
  // Skip whole blocks where the target bit is set.
  for (std::uint64_t base = 0; base < dim; base += 2 * bit) {
    for (std::uint64_t i = base; i < base + bit; ++i) {
      const Amplitude a0 = amps[i];
      const Amplitude a1 = amps[i | bit];
      amps[i] = m[0] * a0 + m[1] * a1;
      amps[i | bit] = m[2] * a0 + m[3] * a1;
    }
  }
}

void apply_two_qubit_mixing(std::span<Amplitude> amps, Qubit qa, Qubit qb, GateKind kind,
                            double angle) {
  const std::uint64_t ba = std::uint64_t{1} << qa;
  const std::uint64_t bb = std::uint64_t{1} << qb;
  const double c = std::cos(angle / 2.0);
  const Amplitude mis = -kI * std::sin(angle / 2.0);
  // XX and YY agree on the odd-parity pairs and differ by a sign on the
  // even-parity pairs (YY|00> = -|11>).
  const Amplitude even = kind == GateKind::RXX ? mis : -mis;
  for_each_with_zero_bits(amps.size(), ba | bb, [&](std::uint64_t i) {
    const std::uint64_t i00 = i, i01 = i | ba, i10 = i | bb, i11 = i | ba | bb;
    const Amplitude a00 = amps[i00], a01 = amps[i01], a10 = amps[i10], a11 = amps[i11];
    amps[i00] = c * a00 + even * a11;
    amps[i11] = c * a11 + even * a00;
    amps[i01] = c * a01 + mis * a10;
    amps[i10] = c * a10 + mis * a01;
  });
}

}  // namespace

std::string_view gate_name(GateKind kind) { return info(kind).name; }

std::optional<GateKind> gate_kind_from_name(std::string_view name) {
  for (const auto& g : kGateInfo) {
    if (g.name == name) return g.kind;
  }
  return std::nullopt;
}

int gate_arity(GateKind kind) { return info(kind).arity; }
bool gate_takes_angle(GateKind kind) { return info(kind).angle; }

Gate Gate::inverse() const {
  Gate g = *this;
  if (kind == GateKind::T) {
    g.kind = GateKind::Tdg;
  } else if (kind == GateKind::Tdg) {
    g.kind = GateKind::T;
  } else if (gate_takes_angle(kind)) {
    g.angle = -angle;
  }
  return g;
}

Gate make_gate(GateKind kind, std::initializer_list<Qubit> qubits, double angle) {
  detail::require(qubits.size() == static_cast<std::size_t>(gate_arity(kind)),
                  std::string(gate_name(kind)) + ": wrong number of qubit operands");
  Gate g;
  g.kind = kind;
  std::copy(qubits.begin(), qubits.end(), g.qubits.begin());
  const auto ops = g.operands();
  for (std::size_t i = 1; i < ops.size(); ++i) {
    detail::require(std::find(ops.begin(), ops.begin() + i, ops[i]) == ops.begin() + i,
                    std::string(gate_name(kind)) + ": repeated qubit operand");
  }
  g.angle = gate_takes_angle(kind) ? angle : 0.0;
  return g;
}

Circuit& Circuit::add(const Gate& gate) {
  const auto ops = gate.operands();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    detail::require(ops[i] < n_qubits_, std::string(gate_name(gate.kind)) + ": qubit " +
                                            std::to_string(ops[i]) + " out of range for " +
                                            std::to_string(n_qubits_) + " qubits");
    for (std::size_t j = 0; j < i; ++j) {
      detail::require(ops[i] != ops[j],
                      std::string(gate_name(gate.kind)) + ": repeated qubit operand");
    }
  }
  detail::require(std::isfinite(gate.angle), "gate angle must be finite");
  gates_.push_back(gate);
  return *this;
}

Circuit& Circuit::append(const Circuit& other, std::span<const Qubit> mapping) {
  detail::require(mapping.size() == other.n_qubits(), "append: mapping size mismatch");
  for (Gate g : other.gates()) {
    for (int k = 0; k < gate_arity(g.kind); ++k) g.qubits[k] = mapping[g.qubits[k]];
    add(g);
  }
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  detail::require(other.n_qubits() <= n_qubits_, "append: circuit is wider than target");
  for (const Gate& g : other.gates()) add(g);
  return *this;
}

Circuit Circuit::inverse() const {
  Circuit out(n_qubits_);
  out.gates_.reserve(gates_.size());
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) out.gates_.push_back(it->inverse());
  return out;
}

GateCounts count_gates(const Circuit& circuit) {
  GateCounts counts;
  for (const Gate& g : circuit.gates()) ++counts[g.kind];
  return counts;
}

std::uint32_t default_max_qubits() {
  if (const char* env = std::getenv("QPACK_MAX_QUBITS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) {
      return static_cast<std::uint32_t>(std::min<unsigned long>(v, kHardQubitLimit));
    }
  }
  return 24;
}

double StateVector::norm_squared() const {
  double sum = 0.0;
  for (const auto& a : amps_) sum += std::norm(a);
  return sum;
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> p(amps_.size());
  std::transform(amps_.begin(), amps_.end(), p.begin(), [](Amplitude a) { return std::norm(a); });
  return p;
}

StateVector StateVector::from_amplitudes(std::vector<Amplitude> amps) {
  detail::require(!amps.empty() && std::has_single_bit(amps.size()),
                  "amplitude count must be a power of two");
  StateVector s;
  s.n_qubits_ = static_cast<std::uint32_t>(std::countr_zero(amps.size()));
  s.amps_ = std::move(amps);
  return s;
}

StateVector new_state(std::uint32_t n_qubits, std::uint32_t max_qubits) {
  const std::uint32_t limit = std::min(max_qubits, kHardQubitLimit);
  if (n_qubits == 0 || n_qubits > limit) {
    throw CapacityError("cannot allocate " + std::to_string(n_qubits) +
                        " qubits (limit " + std::to_string(limit) + ")");
  }
  StateVector s;
  s.n_qubits_ = n_qubits;
  s.amps_.assign(std::size_t{1} << n_qubits, Amplitude{0.0, 0.0});
  s.amps_[0] = 1.0;
  return s;
}

StateVector new_state(std::uint32_t n_qubits) { return new_state(n_qubits, default_max_qubits()); }

void apply_gate(StateVector& state, const Gate& gate) {
  std::span<Amplitude> a = state.amplitudes();
  const auto ops = gate.operands();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    detail::require(ops[i] < state.n_qubits(), "apply_gate: qubit index out of range");
    detail::require(std::find(ops.begin(), ops.begin() + i, ops[i]) == ops.begin() + i,
                    "apply_gate: repeated qubit operand");
  }
  const auto& q = gate.qubits;
  const std::size_t dim = a.size();
  switch (gate.kind) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::T:
    case GateKind::Tdg:
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ: {
      apply_single(a, q[0], single_qubit_matrix(gate.kind, gate.angle));
      return;
    }
    case GateKind::CNOT: {
      const std::uint64_t c = std::uint64_t{1} << q[0], t = std::uint64_t{1} << q[1];
      for_each_with_zero_bits(dim, c | t, [&](std::uint64_t i) { std::swap(a[i | c], a[i | c | t]); });
      return;
    }
    case GateKind::CCX: {
      const std::uint64_t c = (std::uint64_t{1} << q[0]) | (std::uint64_t{1} << q[1]);
      const std::uint64_t t = std::uint64_t{1} << q[2];
      for_each_with_zero_bits(dim, c | t, [&](std::uint64_t i) { std::swap(a[i | c], a[i | c | t]); });
      return;
    }
    case GateKind::CRZ: {
      const std::uint64_t c = std::uint64_t{1} << q[0], t = std::uint64_t{1} << q[1];
      const Amplitude p0 = std::polar(1.0, -gate.angle / 2.0);
      const Amplitude p1 = std::polar(1.0, gate.angle / 2.0);
      for_each_with_zero_bits(dim, c | t, [&](std::uint64_t i) {
        a[i | c] *= p0;
        a[i | c | t] *= p1;
      });
      return;
    }
    case GateKind::RZZ: {
      const std::uint64_t ba = std::uint64_t{1} << q[0], bb = std::uint64_t{1} << q[1];
      const Amplitude same = std::polar(1.0, -gate.angle / 2.0);
      const Amplitude differ = std::polar(1.0, gate.angle / 2.0);
      for (std::uint64_t i = 0; i < dim; ++i) {
        const bool odd = ((i & ba) != 0) != ((i & bb) != 0);
        a[i] *= odd ? differ : same;
      }
      return;
    }
    case GateKind::RXX:
    case GateKind::RYY: {
      apply_two_qubit_mixing(a, q[0], q[1], gate.kind, gate.angle);
      return;
    }
  }
}

void run_circuit(StateVector& state, const Circuit& circuit) {
  if (state.n_qubits() != circuit.n_qubits()) {
    throw ValidationError("run_circuit: circuit has " + std::to_string(circuit.n_qubits()) +
                          " qubits, state has " + std::to_string(state.n_qubits()));
  }
  for (const Gate& g : circuit.gates()) apply_gate(state, g);
}

double expectation_diagonal(const StateVector& state,
                            const std::function<double(std::uint64_t)>& cost) {
  double sum = 0.0;
  const auto amps = state.amplitudes();
  for (std::uint64_t i = 0; i < amps.size(); ++i) {
    const double p = std::norm(amps[i]);
    if (p != 0.0) sum += p * cost(i);
  }
  return sum;
}

double expectation_diagonal(const StateVector& state, std::span<const double> cost_table) {
  const auto amps = state.amplitudes();
  detail::require(!cost_table.empty() && std::has_single_bit(cost_table.size()) &&
                      cost_table.size() <= amps.size(),
                  "cost table size must be a power of two no larger than the state");
  const std::uint64_t mask = cost_table.size() - 1;
  double sum = 0.0;
  for (std::uint64_t i = 0; i < amps.size(); ++i) sum += std::norm(amps[i]) * cost_table[i & mask];
  return sum;
}

const std::string& SampleSet::modal() const {
  detail::require(!outcomes.empty(), "modal() on an empty sample set");
  auto best = outcomes.begin();
  for (auto it = outcomes.begin(); it != outcomes.end(); ++it) {
    if (it->second > best->second) best = it;  // strict: first (smallest) key wins ties
  }
  return best->first;
}

std::vector<std::uint64_t> sample_indices(const StateVector& state, std::uint64_t shots,
                                          std::uint64_t seed) {
  detail::require(shots >= 1, "sample: shots must be at least 1");
  const auto amps = state.amplitudes();
  std::vector<double> cdf(amps.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    acc += std::norm(amps[i]);
    cdf[i] = acc;
  }
  Rng rng(seed);
  std::vector<std::uint64_t> out;
  out.reserve(shots);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = uniform01(rng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    // Never land on a zero-probability tail entry.
    if (it == cdf.end()) it = std::prev(cdf.end());
    while (it != cdf.begin() && std::norm(amps[it - cdf.begin()]) == 0.0) --it;
    out.push_back(static_cast<std::uint64_t>(it - cdf.begin()));
  }
  return out;
}

SampleSet sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed) {
  SampleSet set;
  set.shots = shots;
  std::map<std::uint64_t, std::uint64_t> tally;
  for (std::uint64_t idx : sample_indices(state, shots, seed)) ++tally[idx];
  for (const auto& [idx, n] : tally) set.outcomes[to_bitstring(idx, state.n_qubits())] = n;
  return set;
}

SampleSet marginalize(const SampleSet& samples, std::uint32_t n_bits) {
  SampleSet out;
  out.shots = samples.shots;
  for (const auto& [bits, n] : samples.outcomes) {
    detail::require(bits.size() >= n_bits, "marginalize: outcome shorter than requested width");
    out.outcomes[bits.substr(0, n_bits)] += n;
  }
  return out;
}

std::string to_bitstring(std::uint64_t index, std::uint32_t n_bits) {
  std::string s(n_bits, '0');
  for (std::uint32_t q = 0; q < n_bits; ++q) {
    if ((index >> q) & 1U) s[q] = '1';
  }
  return s;
}

std::uint64_t from_bitstring(std::string_view bits) {
  detail::require(bits.size() <= 64, "bitstring longer than 64 bits");
  std::uint64_t index = 0;
  for (std::size_t q = 0; q < bits.size(); ++q) {
    detail::require(bits[q] == '0' || bits[q] == '1', "bitstring must contain only 0 and 1");
    if (bits[q] == '1') index |= std::uint64_t{1} << q;
  }
  return index;
}

}  // namespace qpack
