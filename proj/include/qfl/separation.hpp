#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qfl/gates.hpp"
#include "qfl/linalg.hpp"

namespace qfl {

enum class SeparationClass { kZero, kOne, kOutside };

const char* class_name(SeparationClass c);

struct SeparationInstance {
  double theta1 = 0.0;
  double theta2 = 0.0;

  // 0: one angle has cos² = 1 and the other cos² = 0; 1: 4cos²θ₁cos²θ₂ = 1.
  // Both within 1e-12.
  SeparationClass classify() const;
};

struct QspPhaseSequence {
  static constexpr std::size_t kLength = 7;
  std::array<double, kLength> phases;  // φ_j = (−1)^j π/4

  static QspPhaseSequence standard();
};

struct SeparationCircuit {
  Circuit circuit;  // one qubit, gates in application order
  ComplexMatrix matrix;
  std::size_t theta_queries = 0;  // e^{iθσx} factors
  std::size_t joint_oracle_blocks = 0;
};

// e^{iφ₀σz} ∏_{k=0}^{2} e^{iθ₁σx} e^{iφ_{2k+1}σz} e^{iθ₂σx} e^{iφ_{2k+2}σz}
SeparationCircuit build_separation_circuit(const SeparationInstance& inst);

enum class CanonicalState { kZero, kOne, kPlus, kMinus, kPlusI, kMinusI };
inline constexpr std::array<CanonicalState, 6> kCanonicalStates = {
    CanonicalState::kZero,  CanonicalState::kOne,   CanonicalState::kPlus,
    CanonicalState::kMinus, CanonicalState::kPlusI, CanonicalState::kMinusI};

const char* canonical_name(CanonicalState s);
CanonicalState canonical_from_name(std::string_view name);
std::array<cplx, 2> canonical_vector(CanonicalState s);

struct DiscriminationPair {
  CanonicalState input = CanonicalState::kZero;
  CanonicalState measure = CanonicalState::kZero;
  // True when class 1 maps to probability 1 (and class 0 to 0).
  bool class1_high = true;

  bool operator==(const DiscriminationPair&) const = default;
};

// Pair fixed after the exhaustive search; the golden file stores the same.
inline constexpr DiscriminationPair kFrozenPair{CanonicalState::kZero, CanonicalState::kZero, true};

std::string pair_to_json(const DiscriminationPair& pair);
DiscriminationPair pair_from_json(std::string_view text);

std::vector<SeparationInstance> class0_points();
// θ₁ evenly spaced where |1/(2cosθ₁)| ≤ 1, θ₂ = arccos(1/(2cosθ₁)).
std::vector<SeparationInstance> class1_points(std::size_t count = 64);

// Exhaustive search over input x measurement canonical states; returns every
// zero-error pair (tolerance 1e-9) against class0_points / class1_points.
std::vector<DiscriminationPair> derive_discrimination_pairs();

double outcome_probability(const SeparationInstance& inst, const DiscriminationPair& pair);

// Born probability of the distinguished outcome; raises kPromise outside the
// promise set.
double discriminate(const SeparationInstance& inst, const DiscriminationPair& pair = kFrozenPair);

// e^{iπ/4σz} e^{iθσy} e^{−iπ/4σz} vs e^{iθσx}.
double conjugation_identity_defect(double theta);

struct BlockEncodingReport {
  std::size_t phase_index = 0;
  double theta1 = 0.0, theta2 = 0.0;
  std::array<double, 4> block_deviation{};  // top-left, top-right, bottom-left, bottom-right
  double max_deviation = 0.0;
  bool passed = false;
};

inline constexpr double kBlockEncodingTol = 1e-10;

// Two-qubit operator C·(H ⊗ e^{iφ_jσz})·C, C = (I⊗e^{iπ/4σz}) S (I⊗e^{−iπ/4σz}),
// S = blockdiag(e^{iθ₁σy}, e^{iθ₂σy}), compared blockwise with
// (1/√2)·[[X₁ZX₁, X₁ZX₂], [X₂ZX₁, −X₂ZX₂]], X_k = e^{iθ_kσx}, Z = e^{iφ_jσz}.
BlockEncodingReport verify_block_encoding_reduction(std::size_t phase_index, double theta1,
                                                    double theta2);
std::vector<BlockEncodingReport> verify_block_encoding_trials(std::size_t trials,
                                                              std::uint64_t seed);

struct GapDemoConfig {
  std::vector<std::size_t> ranks{1, 2, 4};
  std::size_t steps = 2000;  // full-batch Adam steps per fit
  double learning_rate = 0.01;
  std::size_t seeds = 5;
  std::size_t curve_points = 64;  // per branch of the class-1 curve
  std::uint64_t seed = 0;
};

struct GapDemoRow {
  std::size_t rank = 0;
  std::vector<double> max_error;  // per seed, on the promise-set target
  double best_max_error = 0.0;
  std::vector<double> separable_max_error;  // same budget, separable target
  double best_separable_max_error = 0.0;
  double quantum_max_error = 0.0;
};

struct GapDemoReport {
  GapDemoConfig config;
  std::size_t points = 0;
  std::vector<GapDemoRow> rows;
};

// Per-modality CP on features (cosθ_k, sinθ_k) fitted to the 0/1 labels of
// the promise set (class-0 points plus all four sign branches of the class-1
// curve), next to a separable target 2cosθ₁cosθ₂ on the same points.
GapDemoReport cp_baseline_gap_demo(const GapDemoConfig& config);

}  // namespace qfl
