#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "qfl/linalg.hpp"

namespace qfl {

using Exponent = std::vector<int>;

// Sparse polynomial in torus variables t_j = e^{iφ_j}. Coefficients with
// modulus below the zero threshold are never stored.
class MultivariatePolynomial {
 public:
  explicit MultivariatePolynomial(std::size_t num_vars = 0,
                                  double zero_threshold = kCoefficientZeroTol)
      : num_vars_(num_vars), zero_threshold_(zero_threshold) {}

  static MultivariatePolynomial constant(std::size_t num_vars, cplx value);
  static MultivariatePolynomial variable(std::size_t num_vars, std::size_t j);

  std::size_t num_vars() const noexcept { return num_vars_; }
  double zero_threshold() const noexcept { return zero_threshold_; }
  const std::map<Exponent, cplx>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  // Adds to any existing coefficient, then prunes.
  void add_term(const Exponent& exponent, cplx coefficient);
  cplx coefficient(const Exponent& exponent) const;

  // Max exponent sum over stored terms; -1 for the zero polynomial.
  int total_degree() const;
  bool has_negative_exponent() const;

  cplx evaluate(std::span<const cplx> t) const;
  cplx evaluate_angles(std::span<const double> phis) const;

  MultivariatePolynomial operator+(const MultivariatePolynomial& other) const;
  MultivariatePolynomial operator*(const MultivariatePolynomial& other) const;
  MultivariatePolynomial operator*(cplx s) const;

 private:
  std::size_t num_vars_;
  double zero_threshold_;
  std::map<Exponent, cplx> terms_;
};

class PolynomialMatrix {
 public:
  PolynomialMatrix(std::size_t rows, std::size_t cols, std::size_t num_vars);

  static PolynomialMatrix from_constant(const ComplexMatrix& m, std::size_t num_vars);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  MultivariatePolynomial& operator()(std::size_t r, std::size_t c) {
    return entries_[r * cols_ + c];
  }
  const MultivariatePolynomial& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }

  int max_total_degree() const;
  ComplexMatrix evaluate_angles(std::span<const double> phis) const;

  PolynomialMatrix operator*(const PolynomialMatrix& other) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<MultivariatePolynomial> entries_;
};

using TorusMatrixFn = std::function<ComplexMatrix(std::span<const double> phis)>;

struct TorusInterpolationOptions {
  std::size_t grid_degree = 1;       // grid of grid_degree+1 points per variable
  std::size_t residual_probes = 16;
  double residual_tol = 1e-7;
  double zero_threshold = kCoefficientZeroTol;
  std::size_t max_evaluations = 100000;
  std::uint64_t probe_seed = 0;
};

// Recovers a matrix of polynomials with exponents in [0, grid_degree]^vars
// from samples on the roots-of-unity grid via multidimensional DFT
// inversion. Off-grid residual probes above tolerance raise kDegreeOverflow.
PolynomialMatrix interpolate_on_torus(const TorusMatrixFn& fn, std::size_t num_vars,
                                      const TorusInterpolationOptions& options);

}  // namespace qfl
