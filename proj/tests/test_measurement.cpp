#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "qfl/measurement.hpp"
#include "qfl/random.hpp"

using namespace qfl;

namespace {

// <psi| O on qubit q |psi> through the lifted full operator.
double oracle_expectation(const QuantumState& s, const Observable& o) {
  const ComplexMatrix m = o.matrix();
  oracle::Dense u{{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}};
  const auto full = oracle::lift(s.num_qubits(), o.target, u);
  cplx acc = 0.0;
  for (std::size_t r = 0; r < s.dim(); ++r)
    for (std::size_t c = 0; c < s.dim(); ++c) acc += std::conj(s[r]) * full[r][c] * s[c];
  return acc.real();
}

QflCircuitSpec small_spec(std::uint64_t seed) {
  const auto layout = RegisterLayout::for_features(3);
  const AnsatzSpec a{layout.index_qubits, 2, Entangler::kRing};
  auto rng = make_rng(seed, "test-meas-spec");
  return QflCircuitSpec::with_ansatz(3, 2, 2, Entangler::kRing,
                                     init_parameters(3 * a.params_per_block(), InitMode::kFullRange, rng));
}

}  // namespace

TEST_CASE("observable matrices") {
  CHECK(max_abs_diff(Observable{PauliPlane::kXZ, 0.0, 0}.matrix(), pauli::X()) < 1e-15);
  CHECK(max_abs_diff(Observable{PauliPlane::kXZ, kPi / 2, 0}.matrix(), pauli::Z()) < 1e-15);
  CHECK(max_abs_diff(Observable{PauliPlane::kYZ, 0.0, 0}.matrix(), pauli::Y()) < 1e-15);
  auto rng = make_rng(1, "test-obs");
  for (const auto& o : draw_plan(20, 3, 5).observables) {
    const auto m = o.matrix();
    CHECK(max_abs_diff(m * m, ComplexMatrix::identity(2)) < 1e-14);
    CHECK(max_abs_diff(m, m.adjoint()) < 1e-15);
  }
}

TEST_CASE("exact expectations on simple states") {
  CHECK(expectation_exact(QuantumState(1), {PauliPlane::kXZ, kPi / 2, 0}) == doctest::Approx(1.0));
  Circuit h(1);
  h.append(Gate::h(0));
  const auto plus = apply(h, QuantumState(1));
  CHECK(expectation_exact(plus, {PauliPlane::kXZ, 0.0, 0}) == doctest::Approx(1.0));
  CHECK(expectation_exact(plus, {PauliPlane::kXZ, kPi / 2, 0}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(expectation_exact(QuantumState(1, {1.0, 1.0}), {PauliPlane::kXZ, 0.0, 0}), Error);
}

TEST_CASE("exact expectations match the lifted operator") {
  auto rng = make_rng(2, "test-exp-oracle");
  const auto plan = draw_plan(30, 4, 9);
  for (int k = 0; k < 5; ++k) {
    const auto s = QuantumState::random(4, rng);
    for (const auto& o : plan.observables)
      CHECK(std::abs(expectation_exact(s, o) - oracle_expectation(s, o)) < 1e-12);
  }
}

TEST_CASE("shot budget follows the Hoeffding count") {
  ShotEstimator est;
  CHECK(est.total_shots() == oracle::hoeffding_shots(0.1, 0.05, 2));
  CHECK(est.total_shots() == 1753);
  est.epsilon = 0.05;
  est.delta = 0.01;
  CHECK(est.total_shots() == oracle::hoeffding_shots(0.05, 0.01, 2));
  est.shots_override = 17;
  CHECK(est.total_shots() == 17);
  est.shots_override = 0;
  CHECK_THROWS_AS(est.validate(), Error);
  ShotEstimator bad;
  bad.delta = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("shot allocation is proportional and exhaustive") {
  const double c[] = {0.6, -0.3, 0.1};
  const auto s = allocate_shots(c, 100);
  CHECK(s == std::vector<std::size_t>{60, 30, 10});
  const double d[] = {0.5, 0.25, 0.25};
  const auto t = allocate_shots(d, 7);
  CHECK(std::accumulate(t.begin(), t.end(), std::size_t{0}) == 7);
  const double tiny[] = {1.0, 1e-3};
  CHECK(allocate_shots(tiny, 10)[1] == 1);
}

TEST_CASE("sample bound check: defaults pass, loose epsilon passes, one shot fails") {
  const auto rep = validate_sample_bound(0.1, 0.05, 500, 1);
  CHECK(rep.shots == 1753);
  CHECK(rep.passed);
  CHECK(rep.fraction_within >= 0.95 - 0.02);
  CHECK(validate_sample_bound(2.0, 0.05, 100, 1).passed);
  CHECK_FALSE(validate_sample_bound(0.01, 0.05, 200, 1, std::size_t{1}).passed);
  CHECK_THROWS_AS(validate_sample_bound(0.1, 0.05, 10, 1), Error);
}

TEST_CASE("shot estimates are unbiased with bounded variance") {
  const auto state = sample_bound_state();
  const auto obs = sample_bound_observable();
  const double exact = expectation_exact(state, obs);
  ShotEstimator est;
  est.shots_override = 20;
  const int reps = 10000;
  double sum = 0.0, sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double mu = estimate_shots(state, obs, est, derive_seed(3, "unbiased", r));
    sum += mu;
    sq += mu * mu;
  }
  const double mean = sum / reps;
  const double var = sq / reps - mean * mean;
  CHECK(var <= 2.0 / 20.0 * 1.5);
  CHECK(std::abs(mean - exact) < 4.0 * std::sqrt(var / reps));
}

TEST_CASE("plan json round trip and determinism") {
  const auto plan = draw_plan(6, 3, 42);
  const auto back = plan_from_json(plan_to_json(plan));
  REQUIRE(back.size() == 6);
  for (std::size_t h = 0; h < 6; ++h) {
    CHECK(back.observables[h].plane == plan.observables[h].plane);
    CHECK(back.observables[h].angle == plan.observables[h].angle);
    CHECK(back.observables[h].target == plan.observables[h].target);
    CHECK(plan.observables[h].target < 3);
  }
  CHECK(plan_to_json(draw_plan(6, 3, 42)) == plan_to_json(plan));
  CHECK_THROWS_AS(plan_from_json("{\"seed\": 1}"), Error);
  CHECK_THROWS_AS(draw_plan(0, 3, 1), Error);
}

TEST_CASE("sigma-z plan on the all-zero state reads all ones") {
  ObservablePlan plan;
  for (std::size_t q = 0; q < 3; ++q) plan.observables.push_back({PauliPlane::kXZ, kPi / 2, q});
  for (double v : measure_plan(QuantumState(3), plan)) CHECK(v == doctest::Approx(1.0));
  for (double v : measure_plan(QuantumState(3), plan, {std::size_t{50}, 1})) CHECK(std::abs(v - 1.0) < 1e-12);
}

TEST_CASE("fused output: shots converge to exact and are reproducible") {
  const auto spec = small_spec(4);
  const auto plan = draw_plan(4, spec.layout.index_qubits, 8);
  const std::vector<double> x{0.2, -0.4, 0.9};
  const auto exact = fused_output(spec, x, plan);
  for (double v : exact) {
    CHECK(v >= -1.0 - 1e-12);
    CHECK(v <= 1.0 + 1e-12);
  }
  const auto shot = fused_output(spec, x, plan, {std::size_t{200000}, 3});
  for (std::size_t h = 0; h < exact.size(); ++h) CHECK(std::abs(shot[h] - exact[h]) < 0.02);
  CHECK(fused_output(spec, x, plan, {std::size_t{100}, 3}) == fused_output(spec, x, plan, {std::size_t{100}, 3}));

  ObservablePlan bad;
  bad.observables.push_back({PauliPlane::kXZ, 0.0, spec.layout.index_qubits});
  CHECK_THROWS_AS(fused_output(spec, x, bad), Error);
}
