#include "qfl/gates.hpp"

#include <algorithm>
#include <cmath>
#include "json.hpp"

namespace qfl {

using nlohmann::json;

const char* gate_kind_name(GateKind kind) {
  switch (kind) {
    case GateKind::kH: return "H";
    case GateKind::kX: return "X";
    case GateKind::kZ: return "Z";
    case GateKind::kRx: return "Rx";
    case GateKind::kRy: return "Ry";
    case GateKind::kRz: return "Rz";
    case GateKind::kPhaseExp: return "PhaseExp";
    case GateKind::kUnitary: return "Unitary";
    case GateKind::kGlobalPhase: return "GlobalPhase";
  }
  return "?";
}

const char* axis_name(Axis axis) {
  switch (axis) {
    case Axis::kX: return "x";
    case Axis::kY: return "y";
    case Axis::kZ: return "z";
  }
  return "?";
}

namespace {

ComplexMatrix pauli_for(Axis axis) {
  switch (axis) {
    case Axis::kX: return pauli::X();
    case Axis::kY: return pauli::Y();
    case Axis::kZ: return pauli::Z();
  }
  return pauli::I();
}

Gate single(GateKind kind, std::size_t q, double theta = 0.0) {
  Gate g;
  g.kind = kind;
  g.angle = theta;
  g.targets = {q};
  return g;
}

GateKind kind_from_name(const std::string& name) {
  for (GateKind k : {GateKind::kH, GateKind::kX, GateKind::kZ, GateKind::kRx,
                     GateKind::kRy, GateKind::kRz, GateKind::kPhaseExp,
                     GateKind::kUnitary, GateKind::kGlobalPhase}) {
    if (name == gate_kind_name(k)) return k;
  }
  fail(ErrorCode::kInput, "unknown gate kind '" + name + "'");
}

Axis axis_from_name(const std::string& name) {
  if (name == "x") return Axis::kX;
  if (name == "y") return Axis::kY;
  if (name == "z") return Axis::kZ;
  fail(ErrorCode::kInput, "unknown axis '" + name + "'");
}

std::size_t bit_of(std::size_t qubit, std::size_t num_qubits) {
  return std::size_t{1} << (num_qubits - 1 - qubit);
}

}  // namespace

Gate Gate::h(std::size_t q) { return single(GateKind::kH, q); }
Gate Gate::x(std::size_t q) { return single(GateKind::kX, q); }
Gate Gate::z(std::size_t q) { return single(GateKind::kZ, q); }
Gate Gate::rx(std::size_t q, double theta) { return single(GateKind::kRx, q, theta); }
Gate Gate::ry(std::size_t q, double theta) { return single(GateKind::kRy, q, theta); }
Gate Gate::rz(std::size_t q, double theta) { return single(GateKind::kRz, q, theta); }

Gate Gate::phase_exp(Axis axis, std::size_t q, double theta) {
  Gate g = single(GateKind::kPhaseExp, q, theta);
  g.axis = axis;
  return g;
}

Gate Gate::unitary(std::vector<std::size_t> targets, ComplexMatrix u) {
  const std::size_t dim = std::size_t{1} << targets.size();
  if (u.rows() != dim || u.cols() != dim)
    fail(ErrorCode::kShape, "unitary payload does not match target count");
  if (unitarity_defect(u) >= kUnitarityTol)
    fail(ErrorCode::kContract, "gate payload is not unitary");
  Gate g;
  g.kind = GateKind::kUnitary;
  g.targets = std::move(targets);
  g.payload = std::move(u);
  return g;
}

Gate Gate::global_phase(double theta) {
  Gate g;
  g.kind = GateKind::kGlobalPhase;
  g.angle = theta;
  return g;
}

Gate& Gate::controlled(std::size_t qubit, int value) {
  if (value != 0 && value != 1) fail(ErrorCode::kInput, "control value must be 0 or 1");
  controls.push_back({qubit, value});
  return *this;
}

Gate& Gate::with_param(std::size_t index) {
  param = index;
  return *this;
}

ComplexMatrix Gate::matrix() const {
  const double half = 0.5 * angle;
  switch (kind) {
    case GateKind::kH: return pauli::hadamard();
    case GateKind::kX: return pauli::X();
    case GateKind::kZ: return pauli::Z();
    case GateKind::kRx: return exp_i_involution(pauli::X(), -half);
    case GateKind::kRy: return exp_i_involution(pauli::Y(), -half);
    case GateKind::kRz: return exp_i_involution(pauli::Z(), -half);
    case GateKind::kPhaseExp: return exp_i_involution(pauli_for(axis), angle);
    case GateKind::kUnitary: return payload;
    case GateKind::kGlobalPhase: return ComplexMatrix{{std::polar(1.0, angle)}};
  }
  return {};
}

std::string Gate::label() const {
  std::string base = gate_kind_name(kind);
  if (kind == GateKind::kPhaseExp) base += std::string("_") + axis_name(axis);
  return controls.empty() ? base : "c" + base;
}

bool Gate::is_shift_compatible() const {
  return kind == GateKind::kRx || kind == GateKind::kRy || kind == GateKind::kRz;
}

Circuit& Circuit::append(Gate gate) {
  for (std::size_t t : gate.targets)
    if (t >= num_qubits_)
      fail(ErrorCode::kShape, "gate target " + std::to_string(t) + " outside " +
                                  std::to_string(num_qubits_) + "-qubit circuit");
  for (const Control& c : gate.controls) {
    if (c.qubit >= num_qubits_)
      fail(ErrorCode::kShape, "gate control " + std::to_string(c.qubit) + " outside " +
                                  std::to_string(num_qubits_) + "-qubit circuit");
    if (std::find(gate.targets.begin(), gate.targets.end(), c.qubit) != gate.targets.end())
      fail(ErrorCode::kInput, "gate targets and controls overlap");
  }
  std::vector<std::size_t> sorted = gate.targets;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    fail(ErrorCode::kInput, "duplicate gate target");
  ++ledger_.per_kind[gate.label()];
  ++ledger_.total;
  gates_.push_back(std::move(gate));
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.num_qubits_ != num_qubits_)
    fail(ErrorCode::kShape, "cannot concatenate circuits of different width");
  for (const Gate& g : other.gates_) append(g);
  return *this;
}

namespace {

void apply_with_matrix(const Gate& gate, const ComplexMatrix& u, std::span<cplx> amps,
                       std::size_t num_qubits) {
  if (gate.kind == GateKind::kGlobalPhase) {
    const cplx phase = std::polar(1.0, gate.angle);
    std::size_t ctrl_mask = 0, ctrl_value = 0;
    for (const Control& c : gate.controls) {
      ctrl_mask |= bit_of(c.qubit, num_qubits);
      if (c.value) ctrl_value |= bit_of(c.qubit, num_qubits);
    }
    for (std::size_t i = 0; i < amps.size(); ++i)
      if ((i & ctrl_mask) == ctrl_value) amps[i] *= phase;
    return;
  }

  std::size_t ctrl_mask = 0, ctrl_value = 0;
  for (const Control& c : gate.controls) {
    ctrl_mask |= bit_of(c.qubit, num_qubits);
    if (c.value) ctrl_value |= bit_of(c.qubit, num_qubits);
  }
  const std::size_t k = gate.targets.size();
  std::vector<std::size_t> offsets(std::size_t{1} << k, 0);
  std::size_t target_mask = 0;
  for (std::size_t local = 0; local < offsets.size(); ++local) {
    // Local index bit (k-1-t) addresses targets[t], mirroring the global
    // most-significant-first convention.
    for (std::size_t t = 0; t < k; ++t)
      if (local & (std::size_t{1} << (k - 1 - t)))
        offsets[local] |= bit_of(gate.targets[t], num_qubits);
  }
  for (std::size_t t : gate.targets) target_mask |= bit_of(t, num_qubits);

  if (k == 1) {
    const std::size_t step = offsets[1];
    const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    for (std::size_t base = 0; base < amps.size(); ++base) {
      if (base & target_mask) continue;
      if ((base & ctrl_mask) != ctrl_value) continue;
      const cplx a0 = amps[base];
      const cplx a1 = amps[base + step];
      amps[base] = u00 * a0 + u01 * a1;
      amps[base + step] = u10 * a0 + u11 * a1;
    }
    return;
  }

  std::vector<cplx> in(offsets.size()), out(offsets.size());
  for (std::size_t base = 0; base < amps.size(); ++base) {
    if (base & target_mask) continue;
    if ((base & ctrl_mask) != ctrl_value) continue;
    for (std::size_t l = 0; l < offsets.size(); ++l) in[l] = amps[base + offsets[l]];
    for (std::size_t r = 0; r < offsets.size(); ++r) {
      cplx acc = 0.0;
      for (std::size_t c = 0; c < offsets.size(); ++c) acc += u(r, c) * in[c];
      out[r] = acc;
    }
    for (std::size_t l = 0; l < offsets.size(); ++l) amps[base + offsets[l]] = out[l];
  }
}

}  // namespace

void apply_gate(const Gate& gate, std::span<cplx> amps, std::size_t num_qubits) {
  apply_with_matrix(gate, gate.kind == GateKind::kGlobalPhase ? ComplexMatrix{} : gate.matrix(),
                    amps, num_qubits);
}

QuantumState apply(const Circuit& circuit, QuantumState state) {
  if (state.num_qubits() != circuit.num_qubits())
    fail(ErrorCode::kShape, "circuit on " + std::to_string(circuit.num_qubits()) +
                                " qubits applied to state on " +
                                std::to_string(state.num_qubits()));
  for (const Gate& g : circuit.gates()) apply_gate(g, state.amplitudes(), state.num_qubits());
  return state;
}

ComplexMatrix to_matrix(const Circuit& circuit, std::size_t max_qubits) {
  const std::size_t n = circuit.num_qubits();
  if (n > max_qubits)
    fail(ErrorCode::kSize, "to_matrix on " + std::to_string(n) +
                               " qubits exceeds limit " + std::to_string(max_qubits));
  const std::size_t dim = std::size_t{1} << n;
  ComplexMatrix m(dim, dim);
  // Columns stored contiguously so each gate matrix is built once.
  std::vector<cplx> columns(dim * dim);
  for (std::size_t c = 0; c < dim; ++c) columns[c * dim + c] = 1.0;
  for (const Gate& g : circuit.gates()) {
    const ComplexMatrix u = g.kind == GateKind::kGlobalPhase ? ComplexMatrix{} : g.matrix();
    for (std::size_t c = 0; c < dim; ++c)
      apply_with_matrix(g, u, std::span<cplx>(columns).subspan(c * dim, dim), n);
  }
  for (std::size_t c = 0; c < dim; ++c)
    for (std::size_t r = 0; r < dim; ++r) m(r, c) = columns[c * dim + r];
  return m;
}

GateLedger gate_count(const Circuit& circuit) { return circuit.ledger(); }

Circuit embed(const Circuit& circuit, std::size_t num_qubits, std::size_t offset) {
  if (offset + circuit.num_qubits() > num_qubits)
    fail(ErrorCode::kShape, "embedding does not fit the target register");
  Circuit out(num_qubits);
  for (Gate g : circuit.gates()) {
    for (auto& t : g.targets) t += offset;
    for (auto& c : g.controls) c.qubit += offset;
    out.append(std::move(g));
  }
  return out;
}

std::string circuit_to_json(const Circuit& circuit) {
  json gates = json::array();
  for (const Gate& g : circuit.gates()) {
    json jg;
    jg["kind"] = gate_kind_name(g.kind);
    jg["targets"] = g.targets;
    json controls = json::array();
    for (const Control& c : g.controls) controls.push_back({c.qubit, c.value});
    jg["controls"] = controls;
    if (g.kind == GateKind::kRx || g.kind == GateKind::kRy || g.kind == GateKind::kRz ||
        g.kind == GateKind::kPhaseExp || g.kind == GateKind::kGlobalPhase) {
      jg["angle"] = g.angle;
    }
    if (g.kind == GateKind::kPhaseExp) jg["axis"] = axis_name(g.axis);
    if (g.kind == GateKind::kUnitary) {
      json entries = json::array();
      for (const cplx& z : g.payload.entries()) entries.push_back({z.real(), z.imag()});
      jg["matrix"] = entries;
    }
    if (g.param) jg["param"] = *g.param;
    gates.push_back(std::move(jg));
  }
  json doc;
  doc["num_qubits"] = circuit.num_qubits();
  doc["gates"] = std::move(gates);
  return doc.dump(2);
}

Circuit circuit_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
    Circuit circuit(doc.at("num_qubits").get<std::size_t>());
    for (const json& jg : doc.at("gates")) {
      Gate g;
      g.kind = kind_from_name(jg.at("kind").get<std::string>());
      g.targets = jg.at("targets").get<std::vector<std::size_t>>();
      for (const json& c : jg.value("controls", json::array()))
        g.controls.push_back({c.at(0).get<std::size_t>(), c.at(1).get<int>()});
      g.angle = jg.value("angle", 0.0);
      if (jg.contains("axis")) g.axis = axis_from_name(jg["axis"].get<std::string>());
      if (g.kind == GateKind::kUnitary) {
        std::vector<cplx> entries;
        for (const json& z : jg.at("matrix"))
          entries.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
        const std::size_t dim = std::size_t{1} << g.targets.size();
        g = Gate::unitary(g.targets, ComplexMatrix(dim, dim, std::move(entries)));
        for (const json& c : jg.value("controls", json::array()))
          g.controls.push_back({c.at(0).get<std::size_t>(), c.at(1).get<int>()});
      }
      if (jg.contains("param")) g.param = jg["param"].get<std::size_t>();
      circuit.append(std::move(g));
    }
    return circuit;
  } catch (const json::exception& e) {
    fail(ErrorCode::kInput, std::string("malformed circuit JSON: ") + e.what());
  }
}

}  // namespace qfl
