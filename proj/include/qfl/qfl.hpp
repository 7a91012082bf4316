#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qfl/ansatz.hpp"
#include "qfl/gates.hpp"
#include "qfl/polynomial.hpp"
#include "qfl/stateprep.hpp"

namespace qfl {

// Depth-P fusion circuit F_P(x) = U_0 · S(x) · U_1 ⋯ U_{P-1} · S(x) · U_P.
// Blocks act on the index register only.
struct QflCircuitSpec {
  std::size_t depth = 1;  // P
  RegisterLayout layout;
  AnsatzSpec ansatz;
  std::vector<double> params;  // (P+1) · ansatz.params_per_block()
  bool su_normalized = false;
  // When non-empty, P+1 index-register unitaries used instead of the ansatz.
  std::vector<ComplexMatrix> fixed_blocks;
  // Extra global phase on block 0. Nonzero values break det = 1 and exist
  // only to exercise the verifier's negative path.
  double block0_phase = 0.0;

  static QflCircuitSpec with_ansatz(std::size_t num_features, std::size_t depth,
                                    std::size_t layers, Entangler entangler,
                                    std::vector<double> params);
  static QflCircuitSpec with_fixed_blocks(std::size_t num_features,
                                          std::vector<ComplexMatrix> blocks);

  std::size_t num_blocks() const noexcept { return depth + 1; }
  std::size_t num_params() const noexcept { return params.size(); }
  void validate() const;
  // Same spec truncated to blocks 0..t (depth t).
  QflCircuitSpec prefix(std::size_t t) const;
};

// Block p as a circuit on the full register, including the special-unitary
// phase when requested.
Circuit block_circuit(const QflCircuitSpec& spec, std::size_t p);
// Block p as a matrix on the index register alone.
ComplexMatrix block_index_matrix(const QflCircuitSpec& spec, std::size_t p);

Circuit assemble(const QflCircuitSpec& spec, std::span<const double> x);
Circuit assemble_from_angles(const QflCircuitSpec& spec, std::span<const double> phis);

// Span of |j>|v+> over every index state j, |v+> = (|0> - i|1>)/√2. Index
// states above MD are padding; S(x) acts on them as identity so the span is
// invariant under the full product.
struct InvariantSubspace {
  RegisterLayout layout;
  ComplexMatrix isometry;  // 2^(n+1) x 2^n

  static InvariantSubspace for_layout(const RegisterLayout& layout);
  std::size_t dim() const noexcept { return isometry.cols(); }
};

inline constexpr double kLeakageTol = 1e-8;

// V† M V; raises kInvariance when ‖(I − VV†) M V‖ exceeds kLeakageTol.
ComplexMatrix restrict_operator(const ComplexMatrix& m, const InvariantSubspace& subspace);

// Leakage ‖(I − VV†) M V‖ as the largest column norm.
double subspace_leakage(const ComplexMatrix& m, const InvariantSubspace& subspace);

// Restricted F_P at torus angles, through the full circuit simulator.
ComplexMatrix restricted_operator(const QflCircuitSpec& spec, std::span<const double> phis);

struct ExtractionOptions {
  std::size_t residual_probes = 16;
  double residual_tol = 1e-7;
  std::size_t max_evaluations = 100000;
  std::uint64_t probe_seed = 0;
};

PolynomialMatrix extract_polynomial_matrix(const QflCircuitSpec& spec,
                                           const ExtractionOptions& options = {});
MultivariatePolynomial extract_polynomial(const QflCircuitSpec& spec,
                                          std::pair<std::size_t, std::size_t> entry,
                                          const ExtractionOptions& options = {});

struct ExpressivityConfig {
  std::size_t num_features = 1;  // MD
  std::size_t depth = 1;         // P
  std::size_t layers = 5;
  Entangler entangler = Entangler::kRing;
  std::size_t trials = 20;
  std::size_t torus_points = 50;
  double unitarity_tol = 1e-9;
  double det_tol = 1e-8;
  bool negative_control = false;
  std::uint64_t seed = 0;
};

struct ExpressivityTrial {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  int max_degree = -1;
  bool negative_exponent = false;
  double max_unitarity_defect = 0.0;
  double max_det_error = 0.0;
  bool passed = false;
  std::string failure;
};

struct ExpressivityReport {
  ExpressivityConfig config;
  std::vector<ExpressivityTrial> trials;
  bool all_passed() const;
};

ExpressivityReport verify_expressivity(const ExpressivityConfig& config);

struct TorusSample {
  double theta1;
  double theta2;
  cplx value;
};

// resolution x resolution grid over [0, 2π]², both ends included, θ1 outer.
std::vector<TorusSample> torus_scan(const QflCircuitSpec& spec,
                                    std::pair<std::size_t, std::size_t> entry,
                                    std::size_t resolution);
std::string torus_scan_csv(const std::vector<TorusSample>& samples);

}  // namespace qfl
