#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qfl/linalg.hpp"

namespace qfl {

// Statevector convention: qubit 0 is the most significant bit of the basis
// index, so kron(A, B) places A on qubit 0 and B on qubit 1.

enum class GateKind {
  kH,
  kX,
  kZ,
  kRx,           // exp(-i θ σx / 2)
  kRy,           // exp(-i θ σy / 2)
  kRz,           // exp(-i θ σz / 2)
  kPhaseExp,     // exp(+i θ σ_axis), explicit sign
  kUnitary,      // arbitrary 2^k x 2^k payload on k targets
  kGlobalPhase,  // e^{iθ} on the whole register, no targets
};

enum class Axis { kX, kY, kZ };

const char* gate_kind_name(GateKind kind);
const char* axis_name(Axis axis);

struct Control {
  std::size_t qubit;
  int value;  // 0 or 1

  bool operator==(const Control&) const = default;
};

struct Gate {
  GateKind kind = GateKind::kH;
  double angle = 0.0;
  Axis axis = Axis::kZ;
  std::vector<std::size_t> targets;
  std::vector<Control> controls;
  ComplexMatrix payload;  // kUnitary only
  // Index into the owning model's parameter vector, when the angle is
  // trainable.
  std::optional<std::size_t> param;

  static Gate h(std::size_t q);
  static Gate x(std::size_t q);
  static Gate z(std::size_t q);
  static Gate rx(std::size_t q, double theta);
  static Gate ry(std::size_t q, double theta);
  static Gate rz(std::size_t q, double theta);
  static Gate phase_exp(Axis axis, std::size_t q, double theta);
  static Gate unitary(std::vector<std::size_t> targets, ComplexMatrix u);
  static Gate global_phase(double theta);

  Gate& controlled(std::size_t qubit, int value = 1);
  Gate& with_param(std::size_t index);

  // The matrix acting on `targets` (1x1 for a global phase).
  ComplexMatrix matrix() const;
  // Ledger label, e.g. "H", "Ry", "cRy", "PhaseExp_x".
  std::string label() const;
  bool is_shift_compatible() const;

  bool operator==(const Gate&) const = default;
};

struct GateLedger {
  std::map<std::string, std::size_t> per_kind;
  std::size_t total = 0;

  std::size_t count(const std::string& label) const {
    auto it = per_kind.find(label);
    return it == per_kind.end() ? 0 : it->second;
  }
};

inline constexpr std::size_t kDefaultMaxMatrixQubits = 12;

class Circuit {
 public:
  explicit Circuit(std::size_t num_qubits = 0) : num_qubits_(num_qubits) {}

  std::size_t num_qubits() const noexcept { return num_qubits_; }
  const std::vector<Gate>& gates() const noexcept { return gates_; }
  const GateLedger& ledger() const noexcept { return ledger_; }
  std::size_t size() const noexcept { return gates_.size(); }
  bool empty() const noexcept { return gates_.empty(); }

  Circuit& append(Gate gate);
  Circuit& append(const Circuit& other);

  bool operator==(const Circuit& other) const {
    return num_qubits_ == other.num_qubits_ && gates_ == other.gates_;
  }

 private:
  std::size_t num_qubits_;
  std::vector<Gate> gates_;
  GateLedger ledger_;
};

// Gates are applied left to right in list order.
QuantumState apply(const Circuit& circuit, QuantumState state);
void apply_gate(const Gate& gate, std::span<cplx> amplitudes, std::size_t num_qubits);

ComplexMatrix to_matrix(const Circuit& circuit,
                        std::size_t max_qubits = kDefaultMaxMatrixQubits);

GateLedger gate_count(const Circuit& circuit);

// Tensor a circuit on k qubits into a larger register, mapping qubit i to
// offset + i.
Circuit embed(const Circuit& circuit, std::size_t num_qubits, std::size_t offset);

std::string circuit_to_json(const Circuit& circuit);
Circuit circuit_from_json(std::string_view text);

}  // namespace qfl
