#include "doctest.h"
#include "oracles.hpp"
#include "qfl/linalg.hpp"
#include "qfl/random.hpp"

using namespace qfl;

TEST_CASE("kron identities and literal vectors") {
  CHECK(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2)) == ComplexMatrix::identity(4));

  const cplx a = 0.3, b = -0.7;
  const ComplexMatrix va{{a}, {1.0}};
  const ComplexMatrix vb{{b}, {1.0}};
  const ComplexMatrix out = kron(va, vb);
  REQUIRE(out.rows() == 4);
  CHECK(out(0, 0) == a * b);
  CHECK(out(1, 0) == a);
  CHECK(out(2, 0) == b);
  CHECK(out(3, 0) == cplx(1.0));
}

TEST_CASE("kron of X and Z has anti-diagonal diag(1,-1) blocks") {
  const ComplexMatrix expect{{0, 0, 1, 0}, {0, 0, 0, -1}, {1, 0, 0, 0}, {0, -1, 0, 0}};
  CHECK(kron(pauli::X(), pauli::Z()) == expect);
}

TEST_CASE("kron is associative on integer matrices") {
  const ComplexMatrix a{{1, 2}, {3, 4}};
  const ComplexMatrix b{{0, -1}, {5, 2}};
  const ComplexMatrix c{{2, 1}, {1, 3}};
  CHECK(kron(kron(a, b), c) == kron(a, kron(b, c)));
}

TEST_CASE("kron refuses outputs beyond the entry cap") {
  const auto big = ComplexMatrix::identity(64);
  CHECK_THROWS_AS(kron(big, big, 1000), Error);
  try {
    kron(big, big, 1000);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSize);
  }
}

TEST_CASE("matmul") {
  std::mt19937_64 rng(3);
  const auto u = haar_unitary(4, rng);
  CHECK(max_abs_diff(u * u.adjoint(), ComplexMatrix::identity(4)) < 1e-12);
  CHECK(max_abs_diff(u * ComplexMatrix::identity(4), u) == 0.0);

  // Ry(π)·Ry(π) = Ry(2π) = −I
  const double r = -1.0;
  const ComplexMatrix ry_pi{{0, -1}, {1, 0}};
  CHECK(max_abs_diff(matmul(ry_pi, ry_pi), cplx(r) * ComplexMatrix::identity(2)) < 1e-15);

  CHECK_THROWS_AS(matmul(ComplexMatrix(2, 3), ComplexMatrix(2, 3)), Error);
}

TEST_CASE("determinant") {
  CHECK(std::abs(determinant(ComplexMatrix::identity(5)) - 1.0) < 1e-15);
  for (double t : {0.1, 1.3, -2.2, 3.0}) {
    const ComplexMatrix ry{{std::cos(t / 2), -std::sin(t / 2)}, {std::sin(t / 2), std::cos(t / 2)}};
    CHECK(std::abs(determinant(ry) - 1.0) < 1e-14);
  }
  const cplx e = std::polar(1.0, 0.7);
  const cplx diag[] = {1.0, e};
  CHECK(std::abs(determinant(ComplexMatrix::diagonal(diag)) - e) < 1e-15);
}

TEST_CASE("determinant is multiplicative on random 8x8 unitaries") {
  auto rng = make_rng(11, "test-det");
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = haar_unitary(8, rng);
    const auto b = haar_unitary(8, rng);
    CHECK(std::abs(determinant(a * b) - determinant(a) * determinant(b)) < 1e-9);
  }
}

TEST_CASE("unitarity defect") {
  CHECK(unitarity_defect(ComplexMatrix::identity(3)) == 0.0);
  CHECK(unitarity_defect(pauli::hadamard()) < 1e-15);
  CHECK(std::abs(unitarity_defect(cplx(1.01) * ComplexMatrix::identity(2)) - 0.0201) < 1e-12);
}

TEST_CASE("construction rejects bad shapes and non-finite entries") {
  CHECK_THROWS_AS(ComplexMatrix(2, 2, std::vector<cplx>(3)), Error);
  CHECK_THROWS_AS(ComplexMatrix(1, 1, {cplx(std::nan(""), 0.0)}), Error);
}

TEST_CASE("haar unitaries are unitary") {
  auto rng = make_rng(5, "test-haar");
  for (std::size_t n : {2u, 3u, 8u, 16u}) CHECK(unitarity_defect(haar_unitary(n, rng)) < 1e-12);
}

TEST_CASE("eigh_2x2 of a unit Pauli combination") {
  const double t = 0.9;
  const ComplexMatrix h = cplx(std::cos(t)) * pauli::X() + cplx(std::sin(t)) * pauli::Y();
  const auto eig = eigh_2x2(h);
  CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eig.values[1] == doctest::Approx(-1.0).epsilon(1e-14));
  const ComplexMatrix d = eig.vectors.adjoint() * h * eig.vectors;
  const cplx dd[] = {1.0, -1.0};
  CHECK(max_abs_diff(d, ComplexMatrix::diagonal(dd)) < 1e-14);
}

TEST_CASE("quantum state norm and basis") {
  QuantumState s(3);
  CHECK(s.norm_squared() == 1.0);
  CHECK(s[0] == cplx(1.0));
  const auto b = QuantumState::basis(2, 3);
  CHECK(b[3] == cplx(1.0));
  auto rng = make_rng(1, "test-state");
  CHECK(std::abs(QuantumState::random(4, rng).norm_squared() - 1.0) < 1e-10);
}
