#include "doctest.h"
#include "oracles.hpp"
#include "qfl/polynomial.hpp"
#include "qfl/qfl.hpp"
#include "qfl/random.hpp"

using namespace qfl;

namespace {

QflCircuitSpec random_spec(std::size_t md, std::size_t depth, std::uint64_t seed,
                           std::size_t layers = 3) {
  const auto layout = RegisterLayout::for_features(md);
  const AnsatzSpec a{layout.index_qubits, layers, Entangler::kRing};
  auto rng = make_rng(seed, "test-qfl-spec");
  auto params = init_parameters((depth + 1) * a.params_per_block(), InitMode::kFullRange, rng);
  auto spec = QflCircuitSpec::with_ansatz(md, depth, layers, Entangler::kRing, std::move(params));
  spec.su_normalized = true;
  return spec;
}

// Haar SU(2) on basis states 1 and 2 of a 4-dim index register.
ComplexMatrix middle_su2(std::mt19937_64& rng) {
  const auto u = project_to_special_unitary(haar_unitary(2, rng));
  ComplexMatrix m = ComplexMatrix::identity(4);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m(1 + r, 1 + c) = u(r, c);
  return m;
}

std::vector<double> random_angles(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a(0, 2 * kPi);
  std::vector<double> v(n);
  for (double& x : v) x = a(rng);
  return v;
}

}  // namespace

TEST_CASE("polynomial arithmetic") {
  auto t1 = MultivariatePolynomial::variable(2, 0);
  auto t2 = MultivariatePolynomial::variable(2, 1);
  const auto p = (t1 + t2) * (t1 + t2);
  CHECK(p.coefficient({2, 0}) == cplx(1.0));
  CHECK(p.coefficient({1, 1}) == cplx(2.0));
  CHECK(p.total_degree() == 2);
  CHECK_FALSE(p.has_negative_exponent());
  const cplx at[] = {cplx(0.5, 0.1), cplx(-0.2, 0.3)};
  CHECK(std::abs(p.evaluate(at) - (at[0] + at[1]) * (at[0] + at[1])) < 1e-15);

  MultivariatePolynomial q(1);
  q.add_term({1}, 1e-12);
  CHECK(q.is_zero());
  CHECK(q.total_degree() == -1);
  q.add_term({-1}, 1.0);
  CHECK(q.has_negative_exponent());
  CHECK_THROWS_AS(q.add_term({1, 1}, 1.0), Error);
}

TEST_CASE("torus interpolation recovers a known polynomial and flags overflow") {
  TorusMatrixFn fn = [](std::span<const double> ph) {
    const cplx t1 = std::polar(1.0, ph[0]), t2 = std::polar(1.0, ph[1]);
    return ComplexMatrix{{t1 * t2 + 0.5}, {t1 * t1}};
  };
  TorusInterpolationOptions opts;
  opts.grid_degree = 2;
  const auto pm = interpolate_on_torus(fn, 2, opts);
  CHECK(std::abs(pm(0, 0).coefficient({1, 1}) - 1.0) < 1e-12);
  CHECK(std::abs(pm(0, 0).coefficient({0, 0}) - 0.5) < 1e-12);
  CHECK(pm(0, 0).terms().size() == 2);
  CHECK(pm(1, 0).terms().size() == 1);

  opts.grid_degree = 1;
  try {
    interpolate_on_torus(fn, 2, opts);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegreeOverflow);
  }
}

TEST_CASE("P = 0 is constant and P = 1 with identity blocks gives the torus diagonal") {
  auto rng = make_rng(1, "test-qfl-const");
  const auto c = QflCircuitSpec::with_fixed_blocks(2, {project_to_special_unitary(haar_unitary(4, rng))});
  const auto pm0 = extract_polynomial_matrix(c);
  CHECK(pm0.max_total_degree() == 0);

  const auto id = QflCircuitSpec::with_fixed_blocks(2, {ComplexMatrix::identity(4), ComplexMatrix::identity(4)});
  const auto pm1 = extract_polynomial_matrix(id);
  CHECK(std::abs(pm1(1, 1).coefficient({1, 0}) - 1.0) < 1e-12);
  CHECK(pm1(1, 1).terms().size() == 1);
  CHECK(std::abs(pm1(2, 2).coefficient({0, 1}) - 1.0) < 1e-12);
  CHECK(std::abs(pm1(0, 0).coefficient({0, 0}) - 1.0) < 1e-12);
  CHECK(std::abs(pm1(3, 3).coefficient({0, 0}) - 1.0) < 1e-12);  // padding

  const std::vector<double> ph{0.7, -1.3};
  const auto r = restricted_operator(id, ph);
  CHECK(std::abs(r(1, 1) - std::polar(1.0, 0.7)) < 1e-12);
  CHECK(std::abs(r(2, 2) - std::polar(1.0, -1.3)) < 1e-12);
}

TEST_CASE("middle-block toy model has homogeneous degree two") {
  auto rng = make_rng(2, "test-qfl-toy");
  const auto spec = QflCircuitSpec::with_fixed_blocks(2, {middle_su2(rng), middle_su2(rng), middle_su2(rng)});
  const auto pm = extract_polynomial_matrix(spec);
  for (std::size_t r = 1; r <= 2; ++r)
    for (std::size_t c = 1; c <= 2; ++c)
      for (const auto& [e, coef] : pm(r, c).terms()) {
        CHECK(e[0] + e[1] == 2);
        CHECK(e[0] >= 0);
        CHECK(e[1] >= 0);
      }
  CHECK(pm(0, 0).total_degree() == 0);
  CHECK(pm.max_total_degree() == 2);
}

TEST_CASE("extracted polynomials match the simulator off-grid") {
  auto rng = make_rng(3, "test-qfl-match");
  for (auto [md, depth] : {std::pair<std::size_t, std::size_t>{1, 2}, {2, 2}, {3, 1}}) {
    const auto spec = random_spec(md, depth, md * 10 + depth);
    const auto pm = extract_polynomial_matrix(spec);
    CHECK(pm.max_total_degree() <= static_cast<int>(depth));
    for (int k = 0; k < 5; ++k) {
      const auto ph = random_angles(md, rng);
      CHECK(max_abs_diff(pm.evaluate_angles(ph), restricted_operator(spec, ph)) < 1e-9);
    }
  }
}

TEST_CASE("composition: F_P = F_{P-1} D U_P") {
  const auto spec = random_spec(2, 2, 99);
  const auto full = extract_polynomial_matrix(spec);
  const auto head = extract_polynomial_matrix(spec.prefix(1));
  PolynomialMatrix diag(4, 4, 2);
  diag(0, 0) = MultivariatePolynomial::constant(2, 1.0);
  diag(1, 1) = MultivariatePolynomial::variable(2, 0);
  diag(2, 2) = MultivariatePolynomial::variable(2, 1);
  diag(3, 3) = MultivariatePolynomial::constant(2, 1.0);
  const auto last = PolynomialMatrix::from_constant(block_index_matrix(spec, 2), 2);
  const auto composed = head * diag * last;
  double worst = 0.0;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) {
      for (const auto& [e, coef] : full(r, c).terms())
        worst = std::max(worst, std::abs(coef - composed(r, c).coefficient(e)));
      for (const auto& [e, coef] : composed(r, c).terms())
        worst = std::max(worst, std::abs(coef - full(r, c).coefficient(e)));
    }
  CHECK(worst < 1e-8);
}

TEST_CASE("the assembled circuit keeps the invariant subspace and has unit determinant") {
  const auto spec = random_spec(3, 3, 5);
  const auto sub = InvariantSubspace::for_layout(spec.layout);
  auto rng = make_rng(4, "test-qfl-inv");
  for (int k = 0; k < 5; ++k) {
    const auto m = to_matrix(assemble_from_angles(spec, random_angles(3, rng)));
    CHECK(subspace_leakage(m, sub) < 1e-10);
    CHECK(unitarity_defect(m) < 1e-10);
    CHECK(std::abs(determinant(m) - 1.0) < 1e-9);
  }
  // A block that mixes the value qubit breaks invariance.
  ComplexMatrix mixer = kron(ComplexMatrix::identity(4), pauli::hadamard());
  CHECK_THROWS_AS(restrict_operator(mixer, sub), Error);
}

TEST_CASE("expressivity verifier passes and its negative control fails") {
  ExpressivityConfig cfg;
  cfg.num_features = 2;
  cfg.depth = 2;
  cfg.layers = 2;
  cfg.trials = 2;
  cfg.torus_points = 5;
  const auto ok = verify_expressivity(cfg);
  CHECK(ok.all_passed());
  for (const auto& t : ok.trials) CHECK(t.max_degree <= 2);
  cfg.negative_control = true;
  CHECK_FALSE(verify_expressivity(cfg).all_passed());
}

TEST_CASE("torus scan spectrum stays within the degree budget") {
  for (std::size_t depth : {1u, 2u}) {
    const auto spec = random_spec(2, depth, 40 + depth);
    const std::size_t res = 17;
    const auto samples = torus_scan(spec, {0, 0}, res);
    REQUIRE(samples.size() == res * res);
    std::vector<cplx> grid;
    for (const auto& s : samples) grid.push_back(s.value);
    CHECK(oracle::mass_outside_degree(grid, res, int(depth)) < 1e-20);
    // periodic boundary
    for (std::size_t j = 0; j < res; ++j) CHECK(std::abs(grid[j] - grid[(res - 1) * res + j]) < 1e-10);
  }
  const auto id = QflCircuitSpec::with_fixed_blocks(2, {ComplexMatrix::identity(4), ComplexMatrix::identity(4)});
  const auto s = torus_scan(id, {1, 1}, 5);
  for (const auto& p : s) CHECK(std::abs(p.value - std::polar(1.0, p.theta1)) < 1e-12);
  CHECK(torus_scan_csv(s).rfind("theta1,theta2,re,im\n", 0) == 0);
  CHECK_THROWS_AS(torus_scan(random_spec(3, 1, 1), {0, 0}, 5), Error);
}
