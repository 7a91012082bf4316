#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qfl/gates.hpp"

namespace qfl {

// M modality feature vectors of equal length D.
class ModalityBundle {
 public:
  explicit ModalityBundle(std::vector<std::vector<double>> features);

  std::size_t modalities() const noexcept { return features_.size(); }
  std::size_t dim() const noexcept { return features_.empty() ? 0 : features_[0].size(); }
  const std::vector<std::vector<double>>& features() const noexcept { return features_; }

 private:
  std::vector<std::vector<double>> features_;
};

// Index register of width ceil(log2(MD+1)) followed by one value qubit.
// Index states above MD are padding and act as identity under S(x).
struct RegisterLayout {
  std::size_t num_features = 0;  // MD
  std::size_t index_qubits = 0;
  std::size_t total_qubits() const noexcept { return index_qubits + 1; }
  std::size_t index_dim() const noexcept { return std::size_t{1} << index_qubits; }
  std::size_t value_qubit() const noexcept { return index_qubits; }

  static RegisterLayout for_features(std::size_t num_features);
  bool operator==(const RegisterLayout&) const = default;
};

// Modality-major concatenation z¹₁..z¹_D, z²₁, ...
std::vector<double> concatenate(const ModalityBundle& bundle);

enum class NormalizeMode { kTanh, kPassThrough };

std::vector<double> normalize_features(std::span<const double> x,
                                       NormalizeMode mode = NormalizeMode::kTanh);

// φ_j = arccos(x_j), principal branch [0, π].
std::vector<double> feature_angles(std::span<const double> x);

// S(x) = |0><0| ⊗ I + Σ_j |j><j| ⊗ Ry(2φ_j): one multi-controlled Ry per
// feature, controlled on the index bit pattern of j. Excludes the Hadamard
// layer.
Circuit build_S(std::span<const double> x);

// Same operator with the angles φ_j supplied directly; any real φ is
// accepted, which is how torus points e^{iφ} outside [0, π] are reached.
Circuit build_S_from_angles(std::span<const double> phis);

// H on every index qubit, identity on the value qubit.
Circuit build_hadamard_prefix(const RegisterLayout& layout);

}  // namespace qfl
