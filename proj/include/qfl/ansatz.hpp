#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "qfl/gates.hpp"

namespace qfl {

enum class Entangler { kRing, kFull };

const char* entangler_name(Entangler e);
Entangler entangler_from_name(const std::string& name);

// Hardware-efficient block: each layer is a CZ entangling pattern followed by
// Rx, Ry, Rz on every qubit.
struct AnsatzSpec {
  std::size_t n_qubits = 1;
  std::size_t layers = 5;
  Entangler entangler = Entangler::kRing;

  std::size_t params_per_block() const noexcept { return layers * n_qubits * 3; }
  // CZ pairs of one layer, in application order.
  std::vector<std::pair<std::size_t, std::size_t>> coupled_pairs() const;
  void validate() const;
};

enum class InitMode {
  kSmallAngle,  // uniform [-0.1, 0.1]
  kFullRange,   // uniform [0, 2π)
};

std::vector<double> init_parameters(std::size_t count, InitMode mode, std::mt19937_64& rng);

// Block on qubits [0, n_qubits) of a register of `register_qubits` qubits.
// Rotation gates carry parameter indices param_offset + k.
Circuit build_block(const AnsatzSpec& spec, std::span<const double> theta_block,
                    std::size_t register_qubits = 0, std::size_t param_offset = 0);

// [[e^{i(θ1+θ2)} cos θ3, e^{iθ2} sin θ3], [e^{iθ1} sin θ3, -cos θ3]]
ComplexMatrix build_generic_su2(double theta1, double theta2, double theta3);

// u / det(u)^{1/dim} with the principal root.
ComplexMatrix project_to_special_unitary(const ComplexMatrix& u);

// The global phase α with det(e^{iα} u) = 1 on u's own dimension.
double special_unitary_phase(const ComplexMatrix& u);

using UnitarySampler = std::function<ComplexMatrix(std::mt19937_64&)>;

// Monte-Carlo E_{U,V}|tr(U†V)|^{2t} with independent U, V from `sampler`.
double frame_potential(const UnitarySampler& sampler, int t, std::size_t samples,
                       std::uint64_t seed);

// Frame potential of the ansatz family with parameters uniform in [0, 2π).
double frame_potential_estimate(const AnsatzSpec& spec, int t, std::size_t samples,
                                std::uint64_t seed);

}  // namespace qfl
