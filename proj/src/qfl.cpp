#include "qfl/qfl.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "format.hpp"
#include "qfl/random.hpp"

namespace qfl {

using detail::format_double;
using detail::format_sci;

QflCircuitSpec QflCircuitSpec::with_ansatz(std::size_t num_features, std::size_t depth,
                                           std::size_t layers, Entangler entangler,
                                           std::vector<double> params) {
  QflCircuitSpec spec;
  spec.depth = depth;
  spec.layout = RegisterLayout::for_features(num_features);
  spec.ansatz = AnsatzSpec{spec.layout.index_qubits, layers, entangler};
  spec.params = std::move(params);
  spec.validate();
  return spec;
}

QflCircuitSpec QflCircuitSpec::with_fixed_blocks(std::size_t num_features,
                                                 std::vector<ComplexMatrix> blocks) {
  if (blocks.empty()) fail(ErrorCode::kInput, "fixed-block spec needs at least one block");
  QflCircuitSpec spec;
  spec.depth = blocks.size() - 1;
  spec.layout = RegisterLayout::for_features(num_features);
  spec.ansatz = AnsatzSpec{spec.layout.index_qubits, 1, Entangler::kRing};
  spec.fixed_blocks = std::move(blocks);
  spec.validate();
  return spec;
}

void QflCircuitSpec::validate() const {
  if (layout.index_qubits == 0) fail(ErrorCode::kInput, "QFL spec has no index register");
  if (!fixed_blocks.empty()) {
    if (fixed_blocks.size() != num_blocks())
      fail(ErrorCode::kShape, "expected " + std::to_string(num_blocks()) + " fixed blocks");
    for (const auto& b : fixed_blocks)
      if (b.rows() != layout.index_dim() || b.cols() != layout.index_dim())
        fail(ErrorCode::kShape, "fixed block does not match the index register");
    return;
  }
  ansatz.validate();
  if (ansatz.n_qubits != layout.index_qubits)
    fail(ErrorCode::kShape, "ansatz width does not match the index register");
  if (params.size() != num_blocks() * ansatz.params_per_block())
    fail(ErrorCode::kShape, "QFL spec expects " +
                                std::to_string(num_blocks() * ansatz.params_per_block()) +
                                " parameters, got " + std::to_string(params.size()));
}

QflCircuitSpec QflCircuitSpec::prefix(std::size_t t) const {
  if (t > depth) fail(ErrorCode::kShape, "prefix deeper than the spec");
  QflCircuitSpec out = *this;
  out.depth = t;
  if (!fixed_blocks.empty()) {
    out.fixed_blocks.resize(t + 1);
  } else {
    out.params.resize((t + 1) * ansatz.params_per_block());
  }
  return out;
}

namespace {

Circuit raw_block(const QflCircuitSpec& spec, std::size_t p, std::size_t register_qubits) {
  if (p >= spec.num_blocks()) fail(ErrorCode::kShape, "block index out of range");
  if (!spec.fixed_blocks.empty()) {
    Circuit c(register_qubits);
    std::vector<std::size_t> targets(spec.layout.index_qubits);
    for (std::size_t q = 0; q < targets.size(); ++q) targets[q] = q;
    c.append(Gate::unitary(targets, spec.fixed_blocks[p]));
    return c;
  }
  const std::size_t per = spec.ansatz.params_per_block();
  return build_block(spec.ansatz,
                     std::span<const double>(spec.params).subspan(p * per, per),
                     register_qubits, p * per);
}

}  // namespace

ComplexMatrix block_index_matrix(const QflCircuitSpec& spec, std::size_t p) {
  ComplexMatrix u = to_matrix(raw_block(spec, p, spec.layout.index_qubits));
  double phase = 0.0;
  if (spec.su_normalized) phase += special_unitary_phase(u);
  if (p == 0) phase += spec.block0_phase;
  if (phase != 0.0) u *= std::polar(1.0, phase);
  return u;
}

Circuit block_circuit(const QflCircuitSpec& spec, std::size_t p) {
  Circuit c = raw_block(spec, p, spec.layout.total_qubits());
  double phase = 0.0;
  if (spec.su_normalized)
    phase += special_unitary_phase(to_matrix(raw_block(spec, p, spec.layout.index_qubits)));
  if (p == 0) phase += spec.block0_phase;
  if (phase != 0.0) c.append(Gate::global_phase(phase));
  return c;
}

Circuit assemble_from_angles(const QflCircuitSpec& spec, std::span<const double> phis) {
  spec.validate();
  if (phis.size() != spec.layout.num_features)
    fail(ErrorCode::kShape, "QFL expects " + std::to_string(spec.layout.num_features) +
                                " features, got " + std::to_string(phis.size()));
  const Circuit s = build_S_from_angles(phis);
  Circuit c(spec.layout.total_qubits());
  // Rightmost factor acts first.
  for (std::size_t p = spec.depth + 1; p-- > 0;) {
    c.append(block_circuit(spec, p));
    if (p > 0) c.append(s);
  }
  return c;
}

Circuit assemble(const QflCircuitSpec& spec, std::span<const double> x) {
  const auto phis = feature_angles(x);
  return assemble_from_angles(spec, phis);
}

InvariantSubspace InvariantSubspace::for_layout(const RegisterLayout& layout) {
  const std::size_t d = layout.index_dim();
  ComplexMatrix v(2 * d, d);
  const double s = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 0; j < d; ++j) {
    v(2 * j, j) = s;
    v(2 * j + 1, j) = cplx(0.0, -s);
  }
  return InvariantSubspace{layout, std::move(v)};
}

double subspace_leakage(const ComplexMatrix& m, const InvariantSubspace& subspace) {
  const ComplexMatrix& v = subspace.isometry;
  if (m.rows() != v.rows() || m.cols() != v.rows())
    fail(ErrorCode::kShape, "operator does not match the invariant subspace register");
  const ComplexMatrix mv = m * v;
  const ComplexMatrix outside = mv - v * (v.adjoint() * mv);
  double worst = 0.0;
  for (std::size_t c = 0; c < outside.cols(); ++c) {
    double n = 0.0;
    for (std::size_t r = 0; r < outside.rows(); ++r) n += std::norm(outside(r, c));
    worst = std::max(worst, std::sqrt(n));
  }
  return worst;
}

ComplexMatrix restrict_operator(const ComplexMatrix& m, const InvariantSubspace& subspace) {
  const double leak = subspace_leakage(m, subspace);
  if (leak > kLeakageTol)
    fail(ErrorCode::kInvariance, "operator leaks " + format_sci(leak) +
                                     " out of the invariant subspace");
  return subspace.isometry.adjoint() * (m * subspace.isometry);
}

ComplexMatrix restricted_operator(const QflCircuitSpec& spec, std::span<const double> phis) {
  const auto subspace = InvariantSubspace::for_layout(spec.layout);
  return restrict_operator(to_matrix(assemble_from_angles(spec, phis)), subspace);
}

PolynomialMatrix extract_polynomial_matrix(const QflCircuitSpec& spec,
                                           const ExtractionOptions& options) {
  spec.validate();
  const auto subspace = InvariantSubspace::for_layout(spec.layout);
  TorusInterpolationOptions interp;
  interp.grid_degree = spec.depth;
  interp.residual_probes = options.residual_probes;
  interp.residual_tol = options.residual_tol;
  interp.max_evaluations = options.max_evaluations;
  interp.probe_seed = options.probe_seed;
  return interpolate_on_torus(
      [&](std::span<const double> phis) {
        return restrict_operator(to_matrix(assemble_from_angles(spec, phis)), subspace);
      },
      spec.layout.num_features, interp);
}

MultivariatePolynomial extract_polynomial(const QflCircuitSpec& spec,
                                          std::pair<std::size_t, std::size_t> entry,
                                          const ExtractionOptions& options) {
  const std::size_t d = spec.layout.index_dim();
  if (entry.first >= d || entry.second >= d)
    fail(ErrorCode::kShape, "entry outside the restricted operator");
  return extract_polynomial_matrix(spec, options)(entry.first, entry.second);
}

bool ExpressivityReport::all_passed() const {
  return std::all_of(trials.begin(), trials.end(),
                     [](const ExpressivityTrial& t) { return t.passed; });
}

ExpressivityReport verify_expressivity(const ExpressivityConfig& config) {
  ExpressivityReport report{config, {}};
  const RegisterLayout layout = RegisterLayout::for_features(config.num_features);
  const AnsatzSpec ansatz{layout.index_qubits, config.layers, config.entangler};
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    ExpressivityTrial result;
    result.trial = trial;
    result.seed = derive_seed(config.seed, "expressivity",
                              (config.num_features << 32) | (config.depth << 16) | trial);
    std::mt19937_64 rng(result.seed);
    auto params = init_parameters((config.depth + 1) * ansatz.params_per_block(),
                                  InitMode::kFullRange, rng);
    QflCircuitSpec spec = QflCircuitSpec::with_ansatz(
        config.num_features, config.depth, config.layers, config.entangler, std::move(params));
    spec.su_normalized = true;
    if (config.negative_control) spec.block0_phase = 0.5;

    try {
      ExtractionOptions opts;
      opts.probe_seed = result.seed;
      const PolynomialMatrix poly = extract_polynomial_matrix(spec, opts);
      result.max_degree = poly.max_total_degree();
      for (std::size_t r = 0; r < poly.rows(); ++r)
        for (std::size_t c = 0; c < poly.cols(); ++c)
          result.negative_exponent |= poly(r, c).has_negative_exponent();
    } catch (const Error& e) {
      result.failure = std::string(error_code_name(e.code())) + ": " + e.what();
    }

    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    std::vector<double> phis(config.num_features);
    for (std::size_t k = 0; k < config.torus_points; ++k) {
      for (double& p : phis) p = angle(rng);
      const ComplexMatrix f = to_matrix(assemble_from_angles(spec, phis));
      result.max_unitarity_defect = std::max(result.max_unitarity_defect, unitarity_defect(f));
      result.max_det_error = std::max(result.max_det_error, std::abs(determinant(f) - 1.0));
    }

    std::string why;
    if (!result.failure.empty()) why = result.failure;
    else if (result.max_degree > static_cast<int>(config.depth))
      why = "total degree " + std::to_string(result.max_degree) + " exceeds P";
    else if (result.negative_exponent) why = "negative exponent";
    if (why.empty() && result.max_unitarity_defect >= config.unitarity_tol)
      why = "unitarity defect " + format_sci(result.max_unitarity_defect);
    if (why.empty() && result.max_det_error >= config.det_tol)
      why = "|det - 1| = " + format_sci(result.max_det_error);
    result.passed = why.empty();
    result.failure = why;
    report.trials.push_back(std::move(result));
  }
  return report;
}

std::vector<TorusSample> torus_scan(const QflCircuitSpec& spec,
                                    std::pair<std::size_t, std::size_t> entry,
                                    std::size_t resolution) {
  spec.validate();
  if (spec.layout.num_features != 2)
    fail(ErrorCode::kInput, "torus scan needs exactly two features");
  if (resolution < 2) fail(ErrorCode::kInput, "torus scan resolution must be >= 2");
  const std::size_t d = spec.layout.index_dim();
  if (entry.first >= d || entry.second >= d)
    fail(ErrorCode::kShape, "entry outside the restricted operator");

  const auto subspace = InvariantSubspace::for_layout(spec.layout);
  std::vector<cplx> column(subspace.isometry.rows());
  for (std::size_t r = 0; r < column.size(); ++r) column[r] = subspace.isometry(r, entry.second);

  std::vector<TorusSample> out;
  out.reserve(resolution * resolution);
  const double step = 2.0 * kPi / static_cast<double>(resolution - 1);
  for (std::size_t i = 0; i < resolution; ++i)
    for (std::size_t j = 0; j < resolution; ++j) {
      const double angles[2] = {step * static_cast<double>(i), step * static_cast<double>(j)};
      QuantumState psi(spec.layout.total_qubits(), column);
      psi = apply(assemble_from_angles(spec, angles), std::move(psi));
      cplx value = 0.0;
      for (std::size_t r = 0; r < column.size(); ++r)
        value += std::conj(subspace.isometry(r, entry.first)) * psi[r];
      out.push_back({angles[0], angles[1], value});
    }
  return out;
}

std::string torus_scan_csv(const std::vector<TorusSample>& samples) {
  std::string csv = "theta1,theta2,re,im\n";
  for (const auto& s : samples) {
    csv += format_double(s.theta1) + "," + format_double(s.theta2) + "," +
           format_double(s.value.real()) + "," + format_double(s.value.imag()) + "\n";
  }
  return csv;
}

}  // namespace qfl
