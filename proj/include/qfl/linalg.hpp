#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include "qfl/error.hpp"

namespace qfl {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Tolerances shared by every module.
inline constexpr double kUnitarityTol = 1e-10;
inline constexpr double kDeterminantTol = 1e-9;
inline constexpr double kCoefficientZeroTol = 1e-8;

// Largest entry count any exported operation will materialize.
inline constexpr std::size_t kDefaultMaxEntries = std::size_t{1} << 20;

// Dense row-major complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
  // Row-wise literal, e.g. {{1, 0}, {0, -1}}.
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zeros(std::size_t rows, std::size_t cols);
  static ComplexMatrix diagonal(std::span<const cplx> diag);
  static ComplexMatrix column(std::span<const cplx> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<const cplx> entries() const noexcept { return data_; }
  std::span<cplx> entries() noexcept { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix block(std::size_t r0, std::size_t c0, std::size_t rows,
                      std::size_t cols) const;
  cplx trace() const;

  ComplexMatrix& operator*=(cplx s);
  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);

  bool operator==(const ComplexMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t max_entries = kDefaultMaxEntries);
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
std::vector<cplx> matvec(const ComplexMatrix& a, std::span<const cplx> v);

// LU with partial pivoting.
cplx determinant(const ComplexMatrix& a);

// max |(A†A − I)_{ij}|
double unitarity_defect(const ComplexMatrix& a);

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b);

// Haar-distributed unitary via QR of a complex Ginibre matrix with the
// phase correction on R's diagonal.
ComplexMatrix haar_unitary(std::size_t n, std::mt19937_64& rng);

// exp(i * angle * H) for a 2x2 Hermitian H with H² = I (any Pauli or unit
// Pauli combination): cos(angle) I + i sin(angle) H.
ComplexMatrix exp_i_involution(const ComplexMatrix& h, double angle);

namespace pauli {
ComplexMatrix I();
ComplexMatrix X();
ComplexMatrix Y();
ComplexMatrix Z();
ComplexMatrix hadamard();
}  // namespace pauli

// Eigen-decomposition of a 2x2 Hermitian matrix. Columns of `vectors` are the
// orthonormal eigenvectors ordered by descending eigenvalue.
struct Hermitian2x2Eigen {
  double values[2];
  ComplexMatrix vectors;
};
Hermitian2x2Eigen eigh_2x2(const ComplexMatrix& h);

class QuantumState {
 public:
  QuantumState() = default;
  explicit QuantumState(std::size_t num_qubits);  // |0...0>
  QuantumState(std::size_t num_qubits, std::vector<cplx> amplitudes);

  static QuantumState basis(std::size_t num_qubits, std::size_t index);
  static QuantumState random(std::size_t num_qubits, std::mt19937_64& rng);

  std::size_t num_qubits() const noexcept { return num_qubits_; }
  std::size_t dim() const noexcept { return amps_.size(); }

  std::span<const cplx> amplitudes() const noexcept { return amps_; }
  std::span<cplx> amplitudes() noexcept { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[i]; }
  cplx& operator[](std::size_t i) { return amps_[i]; }

  double norm_squared() const;
  cplx inner(const QuantumState& other) const;  // <this|other>

 private:
  std::size_t num_qubits_ = 0;
  std::vector<cplx> amps_;
};

}  // namespace qfl
