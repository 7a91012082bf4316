// Independent reference computations for the test suites. Nothing here calls
// into the simulator; everything is spelled out on nested vectors.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "qfl/linalg.hpp"

namespace oracle {

using C = std::complex<double>;
using Dense = std::vector<std::vector<C>>;

constexpr double kPi = 3.14159265358979323846;

inline Dense ident(std::size_t d) {
  Dense m(d, std::vector<C>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = 1.0;
  return m;
}

inline Dense mul(const Dense& a, const Dense& b) {
  Dense m(a.size(), std::vector<C>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) m[i][j] += a[i][k] * b[k][j];
  return m;
}

inline double diff(const Dense& a, const qfl::ComplexMatrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) worst = std::max(worst, std::abs(a[i][j] - b(i, j)));
  return worst;
}

// Rotation conventions written out by hand.
inline Dense ry(double t) {
  return {{std::cos(t / 2), -std::sin(t / 2)}, {std::sin(t / 2), std::cos(t / 2)}};
}
inline Dense rx(double t) {
  const C i(0, 1);
  return {{std::cos(t / 2), -i * std::sin(t / 2)}, {-i * std::sin(t / 2), std::cos(t / 2)}};
}
inline Dense rz(double t) {
  return {{std::polar(1.0, -t / 2), 0.0}, {0.0, std::polar(1.0, t / 2)}};
}

// Full operator of a 2x2 `u` on qubit q (qubit 0 = most significant bit),
// active only on basis states whose control bits match.
struct Ctrl {
  std::size_t qubit;
  int value;
};
inline Dense lift(std::size_t n, std::size_t q, const Dense& u, const std::vector<Ctrl>& ctrls = {}) {
  const std::size_t d = std::size_t{1} << n;
  Dense m(d, std::vector<C>(d, 0.0));
  auto bit = [&](std::size_t idx, std::size_t qubit) { return (idx >> (n - 1 - qubit)) & 1u; };
  for (std::size_t col = 0; col < d; ++col) {
    bool active = true;
    for (const auto& c : ctrls) active = active && static_cast<int>(bit(col, c.qubit)) == c.value;
    if (!active) {
      m[col][col] = 1.0;
      continue;
    }
    const std::size_t b = bit(col, q);
    const std::size_t mask = std::size_t{1} << (n - 1 - q);
    for (std::size_t r = 0; r < 2; ++r) {
      const std::size_t row = r ? (col | mask) : (col & ~mask);
      m[row][col] += u[r][b];
    }
  }
  return m;
}

inline std::size_t index_qubits(std::size_t md) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < md + 1) ++n;
  return n;
}

// Multiplexed state preparation in closed form: index j in [1, MD] carries
// Ry(2φ_j) on the value qubit, every other index state carries identity.
inline Dense closed_form_S(const std::vector<double>& phis) {
  const std::size_t n = index_qubits(phis.size());
  const std::size_t d = std::size_t{1} << (n + 1);
  Dense m(d, std::vector<C>(d, 0.0));
  for (std::size_t j = 0; j < (std::size_t{1} << n); ++j) {
    const Dense blk = (j >= 1 && j <= phis.size()) ? ry(2.0 * phis[j - 1]) : ident(2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) m[2 * j + r][2 * j + c] = blk[r][c];
  }
  return m;
}

// Fraction of spectral mass outside {k1, k2 >= 0, k1 + k2 <= degree} for a
// grid sampled on [0, 2π] inclusive (last row/column duplicate the first).
// Separable DFT over the n = resolution - 1 distinct points per axis.
inline double mass_outside_degree(const std::vector<C>& grid, std::size_t resolution, int degree) {
  const std::size_t n = resolution - 1;
  auto at = [&](std::size_t i, std::size_t j) { return grid[i * resolution + j]; };
  std::vector<std::vector<C>> rows(n, std::vector<C>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      C acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += at(i, j) * std::polar(1.0, -2 * kPi * double(k * j) / double(n));
      rows[i][k] = acc / double(n);
    }
  double inside = 0.0, total = 0.0;
  for (std::size_t k1 = 0; k1 < n; ++k1)
    for (std::size_t k2 = 0; k2 < n; ++k2) {
      C acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += rows[i][k2] * std::polar(1.0, -2 * kPi * double(k1 * i) / double(n));
      acc /= double(n);
      const double w = std::norm(acc);
      total += w;
      // Map DFT bins to signed frequencies.
      const long f1 = k1 <= n / 2 ? long(k1) : long(k1) - long(n);
      const long f2 = k2 <= n / 2 ? long(k2) : long(k2) - long(n);
      if (f1 >= 0 && f2 >= 0 && f1 + f2 <= degree) inside += w;
    }
  return total > 0 ? (total - inside) / total : 0.0;
}

// Hoeffding shot count for m Pauli terms.
inline std::size_t hoeffding_shots(double eps, double delta, std::size_t m) {
  return static_cast<std::size_t>(std::ceil(2.0 * double(m) * std::log(2.0 * double(m) / delta) / (eps * eps)));
}

}  // namespace oracle
