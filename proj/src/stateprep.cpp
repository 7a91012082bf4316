#include "qfl/stateprep.hpp"

#include <cmath>
#include <string>

namespace qfl {

ModalityBundle::ModalityBundle(std::vector<std::vector<double>> features)
    : features_(std::move(features)) {
  if (features_.empty() || features_[0].empty())
    fail(ErrorCode::kInput, "modality bundle is empty");
  for (const auto& z : features_) {
    if (z.size() != features_[0].size())
      fail(ErrorCode::kShape, "modalities have different feature dimensions");
    for (double v : z)
      if (!std::isfinite(v)) fail(ErrorCode::kInput, "non-finite modality feature");
  }
}

RegisterLayout RegisterLayout::for_features(std::size_t num_features) {
  if (num_features == 0) fail(ErrorCode::kInput, "layout needs at least one feature");
  std::size_t n = 0;
  while ((std::size_t{1} << n) < num_features + 1) ++n;
  return RegisterLayout{num_features, n};
}

std::vector<double> concatenate(const ModalityBundle& bundle) {
  std::vector<double> x;
  x.reserve(bundle.modalities() * bundle.dim());
  for (const auto& z : bundle.features()) x.insert(x.end(), z.begin(), z.end());
  return x;
}

std::vector<double> normalize_features(std::span<const double> x, NormalizeMode mode) {
  std::vector<double> out(x.begin(), x.end());
  for (double& v : out) {
    if (std::isnan(v)) fail(ErrorCode::kInput, "NaN feature");
    if (mode == NormalizeMode::kTanh) {
      v = std::tanh(v);
    } else if (v < -1.0 || v > 1.0) {
      fail(ErrorCode::kInput, "pass-through feature outside [-1, 1]");
    }
  }
  return out;
}

std::vector<double> feature_angles(std::span<const double> x) {
  std::vector<double> phis;
  phis.reserve(x.size());
  for (double v : x) {
    if (!(v >= -1.0 && v <= 1.0))
      fail(ErrorCode::kInput, "feature " + std::to_string(v) + " outside [-1, 1]");
    phis.push_back(std::acos(v));
  }
  return phis;
}

Circuit build_S_from_angles(std::span<const double> phis) {
  const RegisterLayout layout = RegisterLayout::for_features(phis.size());
  Circuit c(layout.total_qubits());
  for (std::size_t j = 1; j <= phis.size(); ++j) {
    Gate g = Gate::ry(layout.value_qubit(), 2.0 * phis[j - 1]);
    for (std::size_t q = 0; q < layout.index_qubits; ++q) {
      const std::size_t bit = (j >> (layout.index_qubits - 1 - q)) & 1u;
      g.controlled(q, static_cast<int>(bit));
    }
    c.append(std::move(g));
  }
  return c;
}

Circuit build_S(std::span<const double> x) {
  const auto phis = feature_angles(x);
  return build_S_from_angles(phis);
}

Circuit build_hadamard_prefix(const RegisterLayout& layout) {
  Circuit c(layout.total_qubits());
  for (std::size_t q = 0; q < layout.index_qubits; ++q) c.append(Gate::h(q));
  return c;
}

}  // namespace qfl
