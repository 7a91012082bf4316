#include "qfl/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qfl/random.hpp"

namespace qfl {

MultivariatePolynomial MultivariatePolynomial::constant(std::size_t num_vars, cplx value) {
  MultivariatePolynomial p(num_vars);
  p.add_term(Exponent(num_vars, 0), value);
  return p;
}

MultivariatePolynomial MultivariatePolynomial::variable(std::size_t num_vars, std::size_t j) {
  if (j >= num_vars) fail(ErrorCode::kShape, "variable index out of range");
  MultivariatePolynomial p(num_vars);
  Exponent e(num_vars, 0);
  e[j] = 1;
  p.add_term(e, 1.0);
  return p;
}

void MultivariatePolynomial::add_term(const Exponent& exponent, cplx coefficient) {
  if (exponent.size() != num_vars_)
    fail(ErrorCode::kShape, "exponent length does not match variable count");
  auto it = terms_.find(exponent);
  const cplx value = (it == terms_.end() ? cplx{} : it->second) + coefficient;
  if (std::abs(value) < zero_threshold_) {
    if (it != terms_.end()) terms_.erase(it);
    return;
  }
  terms_[exponent] = value;
}

cplx MultivariatePolynomial::coefficient(const Exponent& exponent) const {
  auto it = terms_.find(exponent);
  return it == terms_.end() ? cplx{} : it->second;
}

int MultivariatePolynomial::total_degree() const {
  int degree = -1;
  for (const auto& [e, c] : terms_) {
    int sum = 0;
    for (int v : e) sum += v;
    degree = std::max(degree, sum);
  }
  return degree;
}

bool MultivariatePolynomial::has_negative_exponent() const {
  for (const auto& [e, c] : terms_)
    if (std::any_of(e.begin(), e.end(), [](int v) { return v < 0; })) return true;
  return false;
}

cplx MultivariatePolynomial::evaluate(std::span<const cplx> t) const {
  if (t.size() != num_vars_) fail(ErrorCode::kShape, "polynomial evaluated at wrong arity");
  cplx acc = 0.0;
  for (const auto& [e, c] : terms_) {
    cplx term = c;
    for (std::size_t j = 0; j < num_vars_; ++j) term *= std::pow(t[j], e[j]);
    acc += term;
  }
  return acc;
}

cplx MultivariatePolynomial::evaluate_angles(std::span<const double> phis) const {
  std::vector<cplx> t(phis.size());
  for (std::size_t j = 0; j < phis.size(); ++j) t[j] = std::polar(1.0, phis[j]);
  return evaluate(t);
}

MultivariatePolynomial MultivariatePolynomial::operator+(
    const MultivariatePolynomial& other) const {
  MultivariatePolynomial out = *this;
  for (const auto& [e, c] : other.terms_) out.add_term(e, c);
  return out;
}

MultivariatePolynomial MultivariatePolynomial::operator*(
    const MultivariatePolynomial& other) const {
  if (other.num_vars_ != num_vars_) fail(ErrorCode::kShape, "polynomial arity mismatch");
  MultivariatePolynomial out(num_vars_, zero_threshold_);
  // Accumulate unpruned so that small partial sums are not lost.
  std::map<Exponent, cplx> acc;
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : other.terms_) {
      Exponent e(num_vars_);
      for (std::size_t j = 0; j < num_vars_; ++j) e[j] = ea[j] + eb[j];
      acc[e] += ca * cb;
    }
  for (const auto& [e, c] : acc) out.add_term(e, c);
  return out;
}

MultivariatePolynomial MultivariatePolynomial::operator*(cplx s) const {
  MultivariatePolynomial out(num_vars_, zero_threshold_);
  for (const auto& [e, c] : terms_) out.add_term(e, c * s);
  return out;
}

PolynomialMatrix::PolynomialMatrix(std::size_t rows, std::size_t cols, std::size_t num_vars)
    : rows_(rows), cols_(cols), entries_(rows * cols, MultivariatePolynomial(num_vars)) {}

PolynomialMatrix PolynomialMatrix::from_constant(const ComplexMatrix& m, std::size_t num_vars) {
  PolynomialMatrix out(m.rows(), m.cols(), num_vars);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      out(r, c).add_term(Exponent(num_vars, 0), m(r, c));
  return out;
}

int PolynomialMatrix::max_total_degree() const {
  int d = -1;
  for (const auto& p : entries_) d = std::max(d, p.total_degree());
  return d;
}

ComplexMatrix PolynomialMatrix::evaluate_angles(std::span<const double> phis) const {
  ComplexMatrix m(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(r, c) = (*this)(r, c).evaluate_angles(phis);
  return m;
}

PolynomialMatrix PolynomialMatrix::operator*(const PolynomialMatrix& other) const {
  if (cols_ != other.rows_) fail(ErrorCode::kShape, "polynomial matrix product shape mismatch");
  const std::size_t vars = entries_.empty() ? 0 : entries_[0].num_vars();
  PolynomialMatrix out(rows_, other.cols_, vars);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < other.cols_; ++j) {
      MultivariatePolynomial acc(vars);
      for (std::size_t k = 0; k < cols_; ++k) {
        if ((*this)(i, k).is_zero() || other(k, j).is_zero()) continue;
        acc = acc + (*this)(i, k) * other(k, j);
      }
      out(i, j) = std::move(acc);
    }
  return out;
}

PolynomialMatrix interpolate_on_torus(const TorusMatrixFn& fn, std::size_t num_vars,
                                      const TorusInterpolationOptions& options) {
  if (num_vars == 0) fail(ErrorCode::kInput, "interpolation needs at least one variable");
  const std::size_t n = options.grid_degree + 1;
  std::size_t points = 1;
  for (std::size_t j = 0; j < num_vars; ++j) {
    if (points > options.max_evaluations / n)
      fail(ErrorCode::kSize, "torus grid exceeds evaluation budget");
    points *= n;
  }
  if (num_vars * points > options.max_evaluations)
    fail(ErrorCode::kSize, "torus grid exceeds evaluation budget");

  // Sample the grid, indexing points in mixed radix n (variable 0 slowest).
  std::vector<ComplexMatrix> samples(points);
  std::vector<double> phis(num_vars);
  for (std::size_t idx = 0; idx < points; ++idx) {
    std::size_t rem = idx;
    for (std::size_t j = num_vars; j-- > 0;) {
      phis[j] = 2.0 * kPi * static_cast<double>(rem % n) / static_cast<double>(n);
      rem /= n;
    }
    samples[idx] = fn(phis);
  }
  const std::size_t rows = samples[0].rows();
  const std::size_t cols = samples[0].cols();

  // Separable inverse DFT, one variable at a time, on each matrix entry.
  std::vector<cplx> roots(n);
  for (std::size_t k = 0; k < n; ++k)
    roots[k] = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));

  PolynomialMatrix out(rows, cols, num_vars);
  std::vector<cplx> buf(points), tmp(points);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      for (std::size_t idx = 0; idx < points; ++idx) buf[idx] = samples[idx](r, c);
      std::size_t stride = points;
      for (std::size_t j = 0; j < num_vars; ++j) {
        stride /= n;
        // Transform along variable j (digit with weight `stride`).
        for (std::size_t idx = 0; idx < points; ++idx) {
          const std::size_t digit = (idx / stride) % n;
          const std::size_t base = idx - digit * stride;
          cplx acc = 0.0;
          for (std::size_t k = 0; k < n; ++k)
            acc += buf[base + k * stride] * roots[(digit * k) % n];
          tmp[idx] = acc / static_cast<double>(n);
        }
        std::swap(buf, tmp);
      }
      MultivariatePolynomial& poly = out(r, c);
      poly = MultivariatePolynomial(num_vars, options.zero_threshold);
      Exponent e(num_vars);
      for (std::size_t idx = 0; idx < points; ++idx) {
        std::size_t rem = idx;
        for (std::size_t j = num_vars; j-- > 0;) {
          e[j] = static_cast<int>(rem % n);
          rem /= n;
        }
        poly.add_term(e, buf[idx]);
      }
    }

  // Aliasing guard.
  std::mt19937_64 rng(derive_seed(options.probe_seed, "torus-probe"));
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  double worst = 0.0;
  for (std::size_t probe = 0; probe < options.residual_probes; ++probe) {
    for (double& p : phis) p = angle(rng);
    const ComplexMatrix direct = fn(phis);
    worst = std::max(worst, max_abs_diff(direct, out.evaluate_angles(phis)));
  }
  if (worst > options.residual_tol)
    fail(ErrorCode::kDegreeOverflow,
         "off-grid residual " + std::to_string(worst) + " exceeds " +
             std::to_string(options.residual_tol) + " at grid degree " +
             std::to_string(options.grid_degree));
  return out;
}

}  // namespace qfl
