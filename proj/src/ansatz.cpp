#include "qfl/ansatz.hpp"

#include <cmath>
#include <string>

#include "qfl/random.hpp"

namespace qfl {

const char* entangler_name(Entangler e) {
  return e == Entangler::kRing ? "ring" : "full";
}

Entangler entangler_from_name(const std::string& name) {
  if (name == "ring") return Entangler::kRing;
  if (name == "full") return Entangler::kFull;
  fail(ErrorCode::kInput, "unknown entangler '" + name + "'");
}

std::vector<std::pair<std::size_t, std::size_t>> AnsatzSpec::coupled_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (n_qubits < 2) return pairs;
  if (entangler == Entangler::kFull) {
    for (std::size_t i = 0; i < n_qubits; ++i)
      for (std::size_t j = i + 1; j < n_qubits; ++j) pairs.emplace_back(i, j);
    return pairs;
  }
  for (std::size_t i = 0; i + 1 < n_qubits; ++i) pairs.emplace_back(i, i + 1);
  // Closing the ring on two qubits would repeat the single pair.
  if (n_qubits > 2) pairs.emplace_back(n_qubits - 1, 0);
  return pairs;
}

void AnsatzSpec::validate() const {
  if (n_qubits < 1) fail(ErrorCode::kInput, "ansatz needs at least one qubit");
  if (layers < 1) fail(ErrorCode::kInput, "ansatz needs at least one layer");
}

std::vector<double> init_parameters(std::size_t count, InitMode mode, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist =
      mode == InitMode::kSmallAngle ? std::uniform_real_distribution<double>(-0.1, 0.1)
                                    : std::uniform_real_distribution<double>(0.0, 2.0 * kPi);
  std::vector<double> theta(count);
  for (double& v : theta) v = dist(rng);
  return theta;
}

Circuit build_block(const AnsatzSpec& spec, std::span<const double> theta_block,
                    std::size_t register_qubits, std::size_t param_offset) {
  spec.validate();
  if (theta_block.size() != spec.params_per_block())
    fail(ErrorCode::kShape, "ansatz block expects " +
                                std::to_string(spec.params_per_block()) +
                                " parameters, got " + std::to_string(theta_block.size()));
  if (register_qubits == 0) register_qubits = spec.n_qubits;
  if (register_qubits < spec.n_qubits)
    fail(ErrorCode::kShape, "register smaller than ansatz");

  Circuit c(register_qubits);
  const auto pairs = spec.coupled_pairs();
  std::size_t k = 0;
  for (std::size_t layer = 0; layer < spec.layers; ++layer) {
    for (const auto& [a, b] : pairs) c.append(std::move(Gate::z(b).controlled(a)));
    for (std::size_t q = 0; q < spec.n_qubits; ++q) {
      c.append(std::move(Gate::rx(q, theta_block[k]).with_param(param_offset + k)));
      ++k;
      c.append(std::move(Gate::ry(q, theta_block[k]).with_param(param_offset + k)));
      ++k;
      c.append(std::move(Gate::rz(q, theta_block[k]).with_param(param_offset + k)));
      ++k;
    }
  }
  return c;
}

ComplexMatrix build_generic_su2(double theta1, double theta2, double theta3) {
  const double c = std::cos(theta3);
  const double s = std::sin(theta3);
  return {{std::polar(c, theta1 + theta2), std::polar(s, theta2)},
          {std::polar(s, theta1), cplx(-c, 0.0)}};
}

double special_unitary_phase(const ComplexMatrix& u) {
  if (!u.is_square()) fail(ErrorCode::kShape, "special-unitary projection of non-square matrix");
  if (unitarity_defect(u) >= kUnitarityTol)
    fail(ErrorCode::kContract, "special-unitary projection needs a unitary input");
  return -std::arg(determinant(u)) / static_cast<double>(u.rows());
}

ComplexMatrix project_to_special_unitary(const ComplexMatrix& u) {
  const double alpha = special_unitary_phase(u);
  return std::polar(1.0, alpha) * u;
}

double frame_potential(const UnitarySampler& sampler, int t, std::size_t samples,
                       std::uint64_t seed) {
  if (t != 1 && t != 2) fail(ErrorCode::kInput, "frame potential moment must be 1 or 2");
  if (samples < 1) fail(ErrorCode::kInput, "frame potential needs samples");
  double acc = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    auto rng = make_rng(seed, "frame-potential", s);
    const ComplexMatrix u = sampler(rng);
    const ComplexMatrix v = sampler(rng);
    cplx tr = 0.0;
    for (std::size_t i = 0; i < u.rows(); ++i)
      for (std::size_t k = 0; k < u.rows(); ++k) tr += std::conj(u(k, i)) * v(k, i);
    acc += std::pow(std::norm(tr), t);
  }
  return acc / static_cast<double>(samples);
}

double frame_potential_estimate(const AnsatzSpec& spec, int t, std::size_t samples,
                                std::uint64_t seed) {
  if (samples < 100) fail(ErrorCode::kInput, "frame potential estimate needs >= 100 samples");
  spec.validate();
  UnitarySampler sampler = [&spec](std::mt19937_64& rng) {
    const auto theta = init_parameters(spec.params_per_block(), InitMode::kFullRange, rng);
    return to_matrix(build_block(spec, theta));
  };
  return frame_potential(sampler, t, samples, seed);
}

}  // namespace qfl
