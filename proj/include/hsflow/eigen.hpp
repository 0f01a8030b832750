#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "hsflow/error.hpp"
#include "hsflow/matrix.hpp"

namespace hsflow {

/// Eigendecomposition of a real symmetric matrix. values are ascending and
/// column k of vectors is the unit eigenvector for values[k]. The entry of
/// largest magnitude in each column is made positive so repeated runs give
/// identical output.
struct EigenSystem {
  Vec values;
  Matrix vectors;

  std::size_t dim() const { return values.size(); }

  /// Components a_{1i} of the lowest eigenvector.
  Vec ground_components() const {
    Vec g(dim());
    for (std::size_t i = 0; i < dim(); ++i) g[i] = vectors(i, 0);
    return g;
  }
};

namespace detail {

// One cyclic Jacobi rotation pass over the strict upper triangle. Rotations
// with negligible pivots are skipped; tiny pivots are flushed to zero after
// the first few sweeps so the off-diagonal mass reaches exactly zero.
inline bool jacobi_sweep(Matrix& a, Matrix& v, Vec& d, Vec& b, Vec& z,
                         int sweep) {
  const std::size_t n = d.size();
  double sm = 0.0;
  for (std::size_t p = 0; p + 1 < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q) sm += std::abs(a(p, q));
  if (sm == 0.0) return true;

  const double tresh = (sweep < 4) ? 0.2 * sm / double(n * n) : 0.0;
  for (std::size_t p = 0; p + 1 < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const double g100 = 100.0 * std::abs(a(p, q));
      if (sweep > 4 && std::abs(d[p]) + g100 == std::abs(d[p]) &&
          std::abs(d[q]) + g100 == std::abs(d[q])) {
        a(p, q) = 0.0;
      } else if (std::abs(a(p, q)) > tresh) {
        double h = d[q] - d[p];
        double t;
        if (std::abs(h) + g100 == std::abs(h)) {
          t = a(p, q) / h;
        } else {
          const double theta = 0.5 * h / a(p, q);
          t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        h = t * a(p, q);
        z[p] -= h;
        z[q] += h;
        d[p] -= h;
        d[q] += h;
        a(p, q) = 0.0;
        auto rotate = [&](Matrix& m, std::size_t i, std::size_t j,
                          std::size_t k, std::size_t l) {
          const double mg = m(i, j);
          const double mh = m(k, l);
          m(i, j) = mg - s * (mh + mg * tau);
          m(k, l) = mh + s * (mg - mh * tau);
        };
        for (std::size_t r = 0; r < p; ++r) rotate(a, r, p, r, q);
        for (std::size_t r = p + 1; r < q; ++r) rotate(a, p, r, r, q);
        for (std::size_t r = q + 1; r < n; ++r) rotate(a, p, r, q, r);
        for (std::size_t r = 0; r < n; ++r) rotate(v, r, p, r, q);
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    b[p] += z[p];
    d[p] = b[p];
    z[p] = 0.0;
  }
  return false;
}

inline void apply_sign_convention(Matrix& vectors) {
  const std::size_t n = vectors.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t imax = 0;
    double amax = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = std::abs(vectors(i, k));
      if (a > amax) {
        amax = a;
        imax = i;
      }
    }
    if (vectors(imax, k) < 0.0)
      for (std::size_t i = 0; i < n; ++i) vectors(i, k) = -vectors(i, k);
  }
}

}  // namespace detail

/// Cyclic Jacobi diagonalisation. Input must be symmetric to within 1e-9
/// (relative); the symmetrised matrix is what gets decomposed.
inline EigenSystem eigen_decompose(const Matrix& m_in) {
  const std::size_t n = m_in.size();
  if (n == 0) fail(Errc::invalid_dimension, "eigen_decompose: empty matrix");
  if (!m_in.all_finite())
    fail(Errc::not_finite, "eigen_decompose: input has non-finite entries");
  if (max_relative_asymmetry(m_in) > 1e-9)
    fail(Errc::not_symmetric, "eigen_decompose: input is not symmetric");

  EigenSystem es;
  if (n == 1) {
    es.values = {m_in(0, 0)};
    es.vectors = Matrix::identity(1);
    return es;
  }

  Matrix a = symmetrized(m_in);
  Matrix v = Matrix::identity(n);
  Vec d(n), b(n), z(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) b[i] = d[i] = a(i, i);

  constexpr int kMaxSweeps = 100;
  bool converged = false;
  for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    if (detail::jacobi_sweep(a, v, d, b, z, sweep)) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::abs(a(p, q));
    fail(Errc::eigen_no_convergence,
         "Jacobi iteration did not converge; remaining off-diagonal mass " +
             std::to_string(off));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });

  es.values.resize(n);
  es.vectors = Matrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    es.values[k] = d[order[k]];
    for (std::size_t i = 0; i < n; ++i) es.vectors(i, k) = v(i, order[k]);
  }
  detail::apply_sign_convention(es.vectors);
  return es;
}

/// Lowest eigenvalue and its unit eigenvector.
inline std::pair<double, Vec> ground_state(const EigenSystem& es) {
  return {es.values.front(), es.ground_components()};
}

}  // namespace hsflow
