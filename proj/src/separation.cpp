#include "qfl/separation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json.hpp"
#include "qfl/baselines.hpp"
#include "qfl/error.hpp"
#include "qfl/random.hpp"

namespace qfl {

using nlohmann::json;

namespace {
constexpr double kPromiseTol = 1e-12;
constexpr double kZeroErrorTol = 1e-9;
}  // namespace

const char* class_name(SeparationClass c) {
  switch (c) {
    case SeparationClass::kZero: return "0";
    case SeparationClass::kOne: return "1";
    case SeparationClass::kOutside: return "outside";
  }
  return "?";
}

SeparationClass SeparationInstance::classify() const {
  const double c1 = std::cos(theta1) * std::cos(theta1);
  const double c2 = std::cos(theta2) * std::cos(theta2);
  auto near = [](double a, double b) { return std::abs(a - b) <= kPromiseTol; };
  if ((near(c1, 1.0) && near(c2, 0.0)) || (near(c1, 0.0) && near(c2, 1.0)))
    return SeparationClass::kZero;
  if (near(4.0 * c1 * c2, 1.0)) return SeparationClass::kOne;
  return SeparationClass::kOutside;
}

QspPhaseSequence QspPhaseSequence::standard() {
  QspPhaseSequence s{};
  for (std::size_t j = 0; j < kLength; ++j) s.phases[j] = (j % 2 ? -1.0 : 1.0) * kPi / 4.0;
  return s;
}

SeparationCircuit build_separation_circuit(const SeparationInstance& inst) {
  const auto phi = QspPhaseSequence::standard().phases;
  // Operator order Z0 X1 Z1 X2 Z2 | X1 Z3 X2 Z4 | X1 Z5 X2 Z6; gates apply
  // right to left.
  std::vector<Gate> product{Gate::phase_exp(Axis::kZ, 0, phi[0])};
  for (std::size_t k = 0; k < 3; ++k) {
    product.push_back(Gate::phase_exp(Axis::kX, 0, inst.theta1));
    product.push_back(Gate::phase_exp(Axis::kZ, 0, phi[2 * k + 1]));
    product.push_back(Gate::phase_exp(Axis::kX, 0, inst.theta2));
    product.push_back(Gate::phase_exp(Axis::kZ, 0, phi[2 * k + 2]));
  }
  SeparationCircuit out;
  out.circuit = Circuit(1);
  for (auto it = product.rbegin(); it != product.rend(); ++it) out.circuit.append(*it);
  out.matrix = to_matrix(out.circuit);
  out.theta_queries = out.circuit.ledger().count("PhaseExp_x");
  out.joint_oracle_blocks = out.theta_queries / 2;
  return out;
}

const char* canonical_name(CanonicalState s) {
  switch (s) {
    case CanonicalState::kZero: return "0";
    case CanonicalState::kOne: return "1";
    case CanonicalState::kPlus: return "+";
    case CanonicalState::kMinus: return "-";
    case CanonicalState::kPlusI: return "+i";
    case CanonicalState::kMinusI: return "-i";
  }
  return "?";
}

CanonicalState canonical_from_name(std::string_view name) {
  for (CanonicalState s : kCanonicalStates)
    if (name == canonical_name(s)) return s;
  fail(ErrorCode::kInput, "unknown canonical state '" + std::string(name) + "'");
}

std::array<cplx, 2> canonical_vector(CanonicalState s) {
  const double r = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  switch (s) {
    case CanonicalState::kZero: return {1.0, 0.0};
    case CanonicalState::kOne: return {0.0, 1.0};
    case CanonicalState::kPlus: return {r, r};
    case CanonicalState::kMinus: return {r, -r};
    case CanonicalState::kPlusI: return {r, r * i};
    case CanonicalState::kMinusI: return {r, -r * i};
  }
  return {1.0, 0.0};
}

std::string pair_to_json(const DiscriminationPair& pair) {
  return json{{"input", canonical_name(pair.input)},
              {"measure", canonical_name(pair.measure)},
              {"class1_probability", pair.class1_high ? 1 : 0}}
      .dump(2);
}

DiscriminationPair pair_from_json(std::string_view text) {
  try {
    const json d = json::parse(text);
    DiscriminationPair p;
    p.input = canonical_from_name(d.at("input").get<std::string>());
    p.measure = canonical_from_name(d.at("measure").get<std::string>());
    p.class1_high = d.at("class1_probability").get<int>() == 1;
    return p;
  } catch (const json::exception& e) {
    fail(ErrorCode::kInput, std::string("malformed pair JSON: ") + e.what());
  }
}

std::vector<SeparationInstance> class0_points() {
  std::vector<SeparationInstance> pts;
  for (double a : {0.0, kPi})
    for (double b : {kPi / 2.0, -kPi / 2.0}) {
      pts.push_back({a, b});
      pts.push_back({b, a});
    }
  return pts;
}

std::vector<SeparationInstance> class1_points(std::size_t count) {
  if (count < 2) fail(ErrorCode::kInput, "need at least two class-1 points");
  // |1/(2cosθ₁)| ≤ 1 on (−π/2, π/2) means |θ₁| ≤ π/3.
  const double lo = -kPi / 3.0, hi = kPi / 3.0;
  std::vector<SeparationInstance> pts;
  for (std::size_t k = 0; k < count; ++k) {
    const double t1 = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    const double c = std::clamp(1.0 / (2.0 * std::cos(t1)), -1.0, 1.0);
    pts.push_back({t1, std::acos(c)});
  }
  return pts;
}

double outcome_probability(const SeparationInstance& inst, const DiscriminationPair& pair) {
  const ComplexMatrix f = build_separation_circuit(inst).matrix;
  const auto in = canonical_vector(pair.input);
  const auto m = canonical_vector(pair.measure);
  cplx amp = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) amp += std::conj(m[r]) * f(r, c) * in[c];
  return std::clamp(std::norm(amp), 0.0, 1.0);
}

std::vector<DiscriminationPair> derive_discrimination_pairs() {
  const auto zeros = class0_points();
  const auto ones = class1_points();
  std::vector<DiscriminationPair> found;
  for (CanonicalState in : kCanonicalStates)
    for (CanonicalState ms : kCanonicalStates)
      for (bool high : {true, false}) {
        const DiscriminationPair p{in, ms, high};
        const double z_target = high ? 0.0 : 1.0;
        bool ok = true;
        for (const auto& s : zeros)
          ok = ok && std::abs(outcome_probability(s, p) - z_target) <= kZeroErrorTol;
        for (const auto& s : ones)
          ok = ok && std::abs(outcome_probability(s, p) - (1.0 - z_target)) <= kZeroErrorTol;
        if (ok) found.push_back(p);
      }
  return found;
}

double discriminate(const SeparationInstance& inst, const DiscriminationPair& pair) {
  if (inst.classify() == SeparationClass::kOutside)
    fail(ErrorCode::kPromise, "(" + std::to_string(inst.theta1) + ", " +
                                  std::to_string(inst.theta2) + ") lies outside the promise set");
  return outcome_probability(inst, pair);
}

double conjugation_identity_defect(double theta) {
  Circuit c(1);
  c.append(Gate::phase_exp(Axis::kZ, 0, -kPi / 4.0));
  c.append(Gate::phase_exp(Axis::kY, 0, theta));
  c.append(Gate::phase_exp(Axis::kZ, 0, kPi / 4.0));
  return max_abs_diff(to_matrix(c), exp_i_involution(pauli::X(), theta));
}

namespace {

// Index (block-selector) qubit 0, data qubit 1.
Circuit conjugated_oracle(double theta1, double theta2) {
  Circuit c(2);
  c.append(Gate::phase_exp(Axis::kZ, 1, -kPi / 4.0));
  c.append(Gate::phase_exp(Axis::kY, 1, theta1).controlled(0, 0));
  c.append(Gate::phase_exp(Axis::kY, 1, theta2).controlled(0, 1));
  c.append(Gate::phase_exp(Axis::kZ, 1, kPi / 4.0));
  return c;
}

}  // namespace

BlockEncodingReport verify_block_encoding_reduction(std::size_t phase_index, double theta1,
                                                    double theta2) {
  if (phase_index < 1 || phase_index > 6)
    fail(ErrorCode::kInput, "phase index must lie in 1..6");
  const double phi = QspPhaseSequence::standard().phases[phase_index];
  Circuit c = conjugated_oracle(theta1, theta2);
  c.append(Gate::h(0));
  c.append(Gate::phase_exp(Axis::kZ, 1, phi));
  c.append(conjugated_oracle(theta1, theta2));
  const ComplexMatrix op = to_matrix(c);

  const ComplexMatrix x1 = exp_i_involution(pauli::X(), theta1);
  const ComplexMatrix x2 = exp_i_involution(pauli::X(), theta2);
  const ComplexMatrix z = exp_i_involution(pauli::Z(), phi);
  const cplx r(1.0 / std::sqrt(2.0));
  const std::array<ComplexMatrix, 4> expected = {r * (x1 * z * x1), r * (x1 * z * x2),
                                                 r * (x2 * z * x1), -r * (x2 * z * x2)};
  BlockEncodingReport rep;
  rep.phase_index = phase_index;
  rep.theta1 = theta1;
  rep.theta2 = theta2;
  for (std::size_t b = 0; b < 4; ++b) {
    const ComplexMatrix blk = op.block(2 * (b / 2), 2 * (b % 2), 2, 2);
    rep.block_deviation[b] = max_abs_diff(blk, expected[b]);
    rep.max_deviation = std::max(rep.max_deviation, rep.block_deviation[b]);
  }
  rep.passed = rep.max_deviation <= kBlockEncodingTol;
  return rep;
}

std::vector<BlockEncodingReport> verify_block_encoding_trials(std::size_t trials,
                                                              std::uint64_t seed) {
  auto rng = make_rng(seed, "block-encoding");
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_int_distribution<std::size_t> index(1, 6);
  std::vector<BlockEncodingReport> out;
  for (std::size_t t = 0; t < trials; ++t) {
    const double a = angle(rng), b = angle(rng);
    out.push_back(verify_block_encoding_reduction(index(rng), a, b));
  }
  return out;
}

GapDemoReport cp_baseline_gap_demo(const GapDemoConfig& config) {
  if (config.ranks.empty()) fail(ErrorCode::kInput, "gap demo needs at least one rank");
  for (std::size_t r : config.ranks)
    if (r < 1 || r > 8) fail(ErrorCode::kInput, "gap demo ranks must lie in 1..8");
  if (config.seeds < 1) fail(ErrorCode::kInput, "gap demo needs at least one seed");

  // Promise set: class-0 points plus the four sign branches of the curve.
  std::vector<SeparationInstance> pts = class0_points();
  std::vector<double> labels(pts.size(), 0.0);
  for (const auto& p : class1_points(config.curve_points))
    for (double s1 : {0.0, kPi})
      for (double sign2 : {1.0, -1.0}) {
        pts.push_back({p.theta1 + s1, sign2 * p.theta2});
        labels.push_back(1.0);
      }

  std::vector<std::vector<double>> inputs, target, separable;
  double quantum = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    inputs.push_back({std::cos(p.theta1), std::sin(p.theta1), std::cos(p.theta2),
                      std::sin(p.theta2)});
    target.push_back({labels[i]});
    separable.push_back({2.0 * std::cos(p.theta1) * std::cos(p.theta2)});
    quantum = std::max(quantum, std::abs(discriminate(p) - labels[i]));
  }

  GapDemoReport report;
  report.config = config;
  report.points = pts.size();
  for (std::size_t rank : config.ranks) {
    GapDemoRow row;
    row.rank = rank;
    row.quantum_max_error = quantum;
    for (std::size_t s = 0; s < config.seeds; ++s) {
      const std::uint64_t sub = derive_seed(config.seed, "gap-demo", rank * 1000 + s);
      CpModel a = CpModel::create(2, 2, 1, rank, CpGranularity::kPerModality, sub);
      CpModel b = a;
      row.max_error.push_back(fit_cp_adam(a, inputs, target, config.steps, config.learning_rate));
      row.separable_max_error.push_back(
          fit_cp_adam(b, inputs, separable, config.steps, config.learning_rate));
    }
    row.best_max_error = *std::min_element(row.max_error.begin(), row.max_error.end());
    row.best_separable_max_error =
        *std::min_element(row.separable_max_error.begin(), row.separable_max_error.end());
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace qfl
