#include "qfl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace qfl {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInput: return "input";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kSize: return "size";
    case ErrorCode::kContract: return "contract";
    case ErrorCode::kInvariance: return "invariance-violation";
    case ErrorCode::kDegreeOverflow: return "degree-overflow";
    case ErrorCode::kPromise: return "promise-violation";
    case ErrorCode::kUnsupportedGradient: return "unsupported-gradient";
    case ErrorCode::kNonFinite: return "non-finite";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

namespace {

bool all_finite(std::span<const cplx> v) {
  return std::all_of(v.begin(), v.end(), [](cplx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

std::string dims(const ComplexMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols,
                             std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    fail(ErrorCode::kShape, "matrix entry count " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(rows) + "x" +
                                std::to_string(cols));
  }
  if (!all_finite(data_)) fail(ErrorCode::kInput, "matrix has non-finite entries");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) fail(ErrorCode::kShape, "ragged matrix literal");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::zeros(std::size_t rows, std::size_t cols) {
  return ComplexMatrix(rows, cols);
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::column(std::span<const cplx> v) {
  return ComplexMatrix(v.size(), 1, std::vector<cplx>(v.begin(), v.end()));
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
  return m;
}

ComplexMatrix ComplexMatrix::block(std::size_t r0, std::size_t c0, std::size_t rows,
                                   std::size_t cols) const {
  if (r0 + rows > rows_ || c0 + cols > cols_)
    fail(ErrorCode::kShape, "block out of range for " + dims(*this));
  ComplexMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = (*this)(r0 + r, c0 + c);
  return m;
}

cplx ComplexMatrix::trace() const {
  if (!is_square()) fail(ErrorCode::kShape, "trace of non-square " + dims(*this));
  cplx t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    fail(ErrorCode::kShape, "add " + dims(*this) + " + " + dims(other));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    fail(ErrorCode::kShape, "subtract " + dims(*this) + " - " + dims(other));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  return matmul(a, b);
}

ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t max_entries) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  if (a.rows() != 0 && b.rows() != 0 &&
      (rows / a.rows() != b.rows() || (cols != 0 && rows > max_entries / cols))) {
    fail(ErrorCode::kSize, "kron " + dims(a) + " (x) " + dims(b) +
                               " exceeds " + std::to_string(max_entries) + " entries");
  }
  ComplexMatrix m(rows, cols);
  for (std::size_t ar = 0; ar < a.rows(); ++ar)
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const cplx s = a(ar, ac);
      for (std::size_t br = 0; br < b.rows(); ++br)
        for (std::size_t bc = 0; bc < b.cols(); ++bc)
          m(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
    }
  return m;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows())
    fail(ErrorCode::kShape, "matmul " + dims(a) + " * " + dims(b));
  ComplexMatrix m(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx s = a(i, k);
      if (s == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) m(i, j) += s * b(k, j);
    }
  return m;
}

std::vector<cplx> matvec(const ComplexMatrix& a, std::span<const cplx> v) {
  if (a.cols() != v.size())
    fail(ErrorCode::kShape, "matvec " + dims(a) + " * vector of " +
                                std::to_string(v.size()));
  std::vector<cplx> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * v[k];
    out[i] = acc;
  }
  return out;
}

cplx determinant(const ComplexMatrix& a) {
  if (!a.is_square()) fail(ErrorCode::kShape, "determinant of " + dims(a));
  const std::size_t n = a.rows();
  ComplexMatrix lu = a;
  cplx det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(lu(r, col)) > std::abs(lu(pivot, col))) pivot = r;
    if (lu(pivot, col) == cplx{}) return 0.0;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu(pivot, c), lu(col, c));
      det = -det;
    }
    const cplx p = lu(col, col);
    det *= p;
    for (std::size_t r = col + 1; r < n; ++r) {
      const cplx f = lu(r, col) / p;
      if (f == cplx{}) continue;
      for (std::size_t c = col + 1; c < n; ++c) lu(r, c) -= f * lu(col, c);
    }
  }
  return det;
}

double unitarity_defect(const ComplexMatrix& a) {
  if (!a.is_square()) fail(ErrorCode::kShape, "unitarity_defect of " + dims(a));
  const std::size_t n = a.rows();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cplx acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += std::conj(a(k, i)) * a(k, j);
      if (i == j) acc -= 1.0;
      worst = std::max(worst, std::abs(acc));
    }
  return worst;
}

double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) fail(ErrorCode::kShape, "max_abs_diff size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorCode::kShape, "max_abs_diff " + dims(a) + " vs " + dims(b));
  return max_abs_diff(a.entries(), b.entries());
}

ComplexMatrix haar_unitary(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix g(n, n);
  for (auto& z : g.entries()) z = cplx(gauss(rng), gauss(rng));
  // Modified Gram-Schmidt on columns leaves R with a positive real diagonal,
  // which is exactly the phase fix that makes Q Haar distributed.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      cplx proj = 0.0;
      for (std::size_t i = 0; i < n; ++i) proj += std::conj(g(i, k)) * g(i, j);
      for (std::size_t i = 0; i < n; ++i) g(i, j) -= proj * g(i, k);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += std::norm(g(i, j));
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) g(i, j) /= norm;
  }
  return g;
}

ComplexMatrix exp_i_involution(const ComplexMatrix& h, double angle) {
  ComplexMatrix out = ComplexMatrix::identity(h.rows());
  out *= std::cos(angle);
  out += cplx(0.0, std::sin(angle)) * h;
  return out;
}

namespace pauli {
ComplexMatrix I() { return ComplexMatrix::identity(2); }
ComplexMatrix X() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix Y() { return {{0.0, cplx(0, -1)}, {cplx(0, 1), 0.0}}; }
ComplexMatrix Z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
ComplexMatrix hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  return {{s, s}, {s, -s}};
}
}  // namespace pauli

Hermitian2x2Eigen eigh_2x2(const ComplexMatrix& h) {
  if (h.rows() != 2 || h.cols() != 2) fail(ErrorCode::kShape, "eigh_2x2 of " + dims(h));
  const double a = h(0, 0).real();
  const double d = h(1, 1).real();
  const cplx b = h(0, 1);
  const double mean = 0.5 * (a + d);
  const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
  Hermitian2x2Eigen out{{mean + half_gap, mean - half_gap}, ComplexMatrix(2, 2)};
  if (std::abs(b) < 1e-300) {
    // Already diagonal.
    if (a >= d) {
      out.vectors = ComplexMatrix::identity(2);
    } else {
      out.vectors = {{0.0, 1.0}, {1.0, 0.0}};
    }
    return out;
  }
  for (int k = 0; k < 2; ++k) {
    // (H - λ) v = 0  =>  v ∝ (b, λ - a)
    cplx v0 = b;
    cplx v1 = out.values[k] - a;
    const double n = std::sqrt(std::norm(v0) + std::norm(v1));
    out.vectors(0, k) = v0 / n;
    out.vectors(1, k) = v1 / n;
  }
  return out;
}

QuantumState::QuantumState(std::size_t num_qubits)
    : num_qubits_(num_qubits), amps_(std::size_t{1} << num_qubits) {
  amps_[0] = 1.0;
}

QuantumState::QuantumState(std::size_t num_qubits, std::vector<cplx> amplitudes)
    : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
  if (amps_.size() != (std::size_t{1} << num_qubits))
    fail(ErrorCode::kShape, "state of " + std::to_string(num_qubits) +
                                " qubits needs " +
                                std::to_string(std::size_t{1} << num_qubits) +
                                " amplitudes, got " + std::to_string(amps_.size()));
  if (!all_finite(amps_)) fail(ErrorCode::kInput, "state has non-finite amplitudes");
}

QuantumState QuantumState::basis(std::size_t num_qubits, std::size_t index) {
  QuantumState s(num_qubits);
  if (index >= s.dim()) fail(ErrorCode::kShape, "basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

QuantumState QuantumState::random(std::size_t num_qubits, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> amps(std::size_t{1} << num_qubits);
  double norm = 0.0;
  for (auto& z : amps) {
    z = cplx(gauss(rng), gauss(rng));
    norm += std::norm(z);
  }
  norm = std::sqrt(norm);
  for (auto& z : amps) z /= norm;
  return QuantumState(num_qubits, std::move(amps));
}

double QuantumState::norm_squared() const {
  double acc = 0.0;
  for (const auto& z : amps_) acc += std::norm(z);
  return acc;
}

cplx QuantumState::inner(const QuantumState& other) const {
  if (other.dim() != dim()) fail(ErrorCode::kShape, "inner product dimension mismatch");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) acc += std::conj(amps_[i]) * other.amps_[i];
  return acc;
}

}  // namespace qfl
