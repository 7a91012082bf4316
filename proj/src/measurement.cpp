#include "qfl/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "qfl/random.hpp"

namespace qfl {

using nlohmann::json;

const char* plane_name(PauliPlane plane) {
  switch (plane) {
    case PauliPlane::kXZ: return "XZ";
    case PauliPlane::kXY: return "XY";
    case PauliPlane::kYZ: return "YZ";
  }
  return "?";
}

PauliPlane plane_from_name(std::string_view name) {
  if (name == "XZ") return PauliPlane::kXZ;
  if (name == "XY") return PauliPlane::kXY;
  if (name == "YZ") return PauliPlane::kYZ;
  fail(ErrorCode::kInput, "unknown Pauli plane '" + std::string(name) + "'");
}

namespace {

std::pair<Axis, Axis> plane_axes(PauliPlane plane) {
  switch (plane) {
    case PauliPlane::kXZ: return {Axis::kX, Axis::kZ};
    case PauliPlane::kXY: return {Axis::kX, Axis::kY};
    case PauliPlane::kYZ: return {Axis::kY, Axis::kZ};
  }
  return {Axis::kX, Axis::kZ};
}

ComplexMatrix pauli_matrix(Axis axis) {
  switch (axis) {
    case Axis::kX: return pauli::X();
    case Axis::kY: return pauli::Y();
    case Axis::kZ: return pauli::Z();
  }
  return pauli::I();
}

void require_normalized(const QuantumState& state) {
  if (std::abs(state.norm_squared() - 1.0) > kUnitarityTol)
    fail(ErrorCode::kContract, "expectation requires a normalized state");
}

// Probability that `qubit` reads 0.
double prob_zero(const QuantumState& state, std::size_t qubit) {
  const std::size_t bit = std::size_t{1} << (state.num_qubits() - 1 - qubit);
  double p = 0.0;
  for (std::size_t i = 0; i < state.dim(); ++i)
    if (!(i & bit)) p += std::norm(state[i]);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

ComplexMatrix Observable::matrix() const {
  ComplexMatrix m(2, 2);
  for (const Term& t : pauli_terms()) m += cplx(t.coefficient) * pauli_matrix(t.axis);
  return m;
}

std::vector<Observable::Term> Observable::pauli_terms() const {
  const auto [a, b] = plane_axes(plane);
  return {{std::cos(angle), a}, {std::sin(angle), b}};
}

ObservablePlan draw_plan(std::size_t count, std::size_t n_qubits, std::uint64_t seed) {
  if (count < 1) fail(ErrorCode::kInput, "observable plan needs at least one entry");
  if (n_qubits < 1) fail(ErrorCode::kInput, "observable plan needs at least one qubit");
  auto rng = make_rng(seed, "observable-plan");
  std::uniform_int_distribution<int> plane(0, 2);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  std::uniform_int_distribution<std::size_t> target(0, n_qubits - 1);
  ObservablePlan plan;
  plan.seed = seed;
  for (std::size_t h = 0; h < count; ++h) {
    Observable o;
    o.plane = static_cast<PauliPlane>(plane(rng));
    o.angle = angle(rng);
    o.target = target(rng);
    plan.observables.push_back(o);
  }
  return plan;
}

std::string plan_to_json(const ObservablePlan& plan) {
  json obs = json::array();
  for (const auto& o : plan.observables)
    obs.push_back({{"plane", plane_name(o.plane)}, {"angle", o.angle}, {"target", o.target}});
  return json{{"seed", plan.seed}, {"observables", obs}}.dump(2);
}

ObservablePlan plan_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    ObservablePlan plan;
    plan.seed = doc.at("seed").get<std::uint64_t>();
    for (const json& o : doc.at("observables")) {
      plan.observables.push_back({plane_from_name(o.at("plane").get<std::string>()),
                                  o.at("angle").get<double>(),
                                  o.at("target").get<std::size_t>()});
    }
    return plan;
  } catch (const json::exception& e) {
    fail(ErrorCode::kInput, std::string("malformed plan JSON: ") + e.what());
  }
}

ComplexMatrix reduced_density(const QuantumState& state, std::size_t qubit) {
  if (qubit >= state.num_qubits()) fail(ErrorCode::kShape, "qubit outside state");
  const std::size_t bit = std::size_t{1} << (state.num_qubits() - 1 - qubit);
  ComplexMatrix rho(2, 2);
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if (i & bit) continue;
    const cplx a0 = state[i];
    const cplx a1 = state[i | bit];
    rho(0, 0) += a0 * std::conj(a0);
    rho(0, 1) += a0 * std::conj(a1);
    rho(1, 0) += a1 * std::conj(a0);
    rho(1, 1) += a1 * std::conj(a1);
  }
  return rho;
}

double expectation_exact(const QuantumState& state, const Observable& obs) {
  require_normalized(state);
  const ComplexMatrix rho = reduced_density(state, obs.target);
  const ComplexMatrix o = obs.matrix();
  cplx acc = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) acc += rho(i, k) * o(k, i);
  return acc.real();
}

std::size_t ShotEstimator::total_shots() const {
  if (shots_override) return *shots_override;
  const double m = static_cast<double>(terms);
  return static_cast<std::size_t>(
      std::ceil(hoeffding_constant * m * std::log(2.0 * m / delta) / (epsilon * epsilon)));
}

void ShotEstimator::validate() const {
  if (!(epsilon > 0.0)) fail(ErrorCode::kInput, "epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::kInput, "delta must lie in (0, 1)");
  if (terms < 1) fail(ErrorCode::kInput, "estimator needs at least one Pauli term");
  if (shots_override && *shots_override < 1) fail(ErrorCode::kInput, "shot count must be >= 1");
}

std::vector<std::size_t> allocate_shots(std::span<const double> coefficients,
                                        std::size_t total) {
  const double lambda = std::accumulate(coefficients.begin(), coefficients.end(), 0.0,
                                        [](double s, double c) { return s + std::abs(c); });
  std::vector<std::size_t> shots(coefficients.size(), 0);
  if (lambda == 0.0 || total == 0) return shots;
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    const double ideal = static_cast<double>(total) * std::abs(coefficients[i]) / lambda;
    shots[i] = static_cast<std::size_t>(std::floor(ideal));
    assigned += shots[i];
    remainders.emplace_back(ideal - std::floor(ideal), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total && k < remainders.size(); ++k, ++assigned)
    ++shots[remainders[k].second];
  for (std::size_t i = 0; i < coefficients.size(); ++i)
    if (shots[i] == 0 && std::abs(coefficients[i]) > 1e-15) shots[i] = 1;
  return shots;
}

double estimate_shots(const QuantumState& state, const Observable& obs,
                      const ShotEstimator& estimator, std::uint64_t seed) {
  estimator.validate();
  require_normalized(state);
  const auto terms = obs.pauli_terms();
  std::vector<double> coefs;
  for (const auto& t : terms) coefs.push_back(t.coefficient);
  const auto shots = allocate_shots(coefs, estimator.total_shots());

  std::mt19937_64 rng(derive_seed(seed, "shots"));
  double mu = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (shots[i] == 0) continue;
    // W† maps the +1 eigenvector onto |0>.
    const auto eig = eigh_2x2(pauli_matrix(terms[i].axis));
    Circuit rotate(state.num_qubits());
    rotate.append(Gate::unitary({obs.target}, eig.vectors.adjoint()));
    const QuantumState rotated = apply(rotate, state);
    std::binomial_distribution<std::size_t> plus(shots[i], prob_zero(rotated, obs.target));
    const std::size_t k = plus(rng);
    const double mean = (2.0 * static_cast<double>(k) - static_cast<double>(shots[i])) /
                        static_cast<double>(shots[i]);
    mu += terms[i].coefficient * mean;
  }
  return mu;
}

QuantumState sample_bound_state() {
  Circuit c(1);
  c.append(Gate::ry(0, 1.1));
  c.append(Gate::rz(0, 0.7));
  return apply(c, QuantumState(1));
}

Observable sample_bound_observable() { return Observable{PauliPlane::kXZ, kPi / 5.0, 0}; }

SampleBoundReport validate_sample_bound(double epsilon, double delta, std::size_t trials,
                                            std::uint64_t seed,
                                            std::optional<std::size_t> shots_override) {
  if (trials < 100) fail(ErrorCode::kInput, "sample-bound validation needs >= 100 trials");
  ShotEstimator est;
  est.epsilon = epsilon;
  est.delta = delta;
  est.shots_override = shots_override;
  est.validate();

  const QuantumState state = sample_bound_state();
  const Observable obs = sample_bound_observable();
  SampleBoundReport report;
  report.epsilon = epsilon;
  report.delta = delta;
  report.trials = trials;
  report.shots = est.total_shots();
  report.exact = expectation_exact(state, obs);
  report.required_fraction = 1.0 - delta - 0.02;

  std::size_t within = 0;
  double sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const double mu = estimate_shots(state, obs, est, derive_seed(seed, "bound-trial", t));
    sum += mu;
    if (std::abs(mu - report.exact) <= epsilon) ++within;
  }
  report.fraction_within = static_cast<double>(within) / static_cast<double>(trials);
  report.mean_estimate = sum / static_cast<double>(trials);
  report.passed = report.fraction_within >= report.required_fraction;
  return report;
}

std::vector<double> measure_plan(const QuantumState& state, const ObservablePlan& plan,
                                 const MeasurementMode& mode) {
  std::vector<double> out;
  out.reserve(plan.size());
  for (std::size_t h = 0; h < plan.size(); ++h) {
    const Observable& o = plan.observables[h];
    if (o.target >= state.num_qubits()) fail(ErrorCode::kShape, "observable target outside state");
    if (!mode.shots) {
      out.push_back(expectation_exact(state, o));
    } else {
      ShotEstimator est;
      est.shots_override = *mode.shots;
      out.push_back(estimate_shots(state, o, est, derive_seed(mode.seed, "fused-output", h)));
    }
  }
  return out;
}

std::vector<double> fused_output(const QflCircuitSpec& spec, std::span<const double> x,
                                 const ObservablePlan& plan, const MeasurementMode& mode) {
  for (const auto& o : plan.observables)
    if (o.target >= spec.layout.index_qubits)
      fail(ErrorCode::kShape, "observable targets a qubit outside the index register");
  Circuit c = build_hadamard_prefix(spec.layout);
  c.append(assemble(spec, x));
  return measure_plan(apply(c, QuantumState(spec.layout.total_qubits())), plan, mode);
}

}  // namespace qfl
