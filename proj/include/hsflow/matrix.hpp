#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "hsflow/error.hpp"

namespace hsflow {

using Vec = std::vector<double>;

/// Dense square matrix of doubles, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), d_(n * n, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return d_[i * n_ + j];
  }

  const std::vector<double>& data() const { return d_; }

  bool operator==(const Matrix&) const = default;

  /// Copy with row and column k removed; entries are carried over verbatim.
  Matrix without_index(std::size_t k) const {
    if (k >= n_) fail(Errc::shape_mismatch, "without_index: index out of range");
    Matrix out(n_ - 1);
    for (std::size_t i = 0, io = 0; i < n_; ++i) {
      if (i == k) continue;
      for (std::size_t j = 0, jo = 0; j < n_; ++j) {
        if (j == k) continue;
        out(io, jo) = (*this)(i, j);
        ++jo;
      }
      ++io;
    }
    return out;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : d_) s += v * v;
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : d_) m = std::max(m, std::abs(v));
    return m;
  }

  bool all_finite() const {
    return std::all_of(d_.begin(), d_.end(),
                       [](double v) { return std::isfinite(v); });
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

/// Largest pairwise asymmetry, scaled by max(1, |a_ij|, |a_ji|).
inline double max_relative_asymmetry(const Matrix& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      double scale = std::max({1.0, std::abs(m(i, j)), std::abs(m(j, i))});
      worst = std::max(worst, std::abs(m(i, j) - m(j, i)) / scale);
    }
  return worst;
}

/// (M + M^T) / 2.
inline Matrix symmetrized(const Matrix& m) {
  Matrix out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      out(i, j) = 0.5 * (m(i, j) + m(j, i));
  return out;
}

inline bool all_finite(const Vec& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace hsflow
