#include <cmath>
#include <random>

#include "doctest.h"
#include "hsflow/eigen.hpp"
#include "hsflow/models.hpp"
#include "oracles.hpp"

using namespace hsflow;

namespace {

void check_invariants(const Matrix& m, const EigenSystem& es) {
  const std::size_t n = m.size();
  const double nf = std::max(1.0, m.frobenius_norm());

  for (std::size_t i = 0; i + 1 < n; ++i)
    CHECK(es.values[i] <= es.values[i + 1]);

  // orthonormal columns
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double dot = 0;
      for (std::size_t r = 0; r < n; ++r)
        dot += es.vectors(r, i) * es.vectors(r, j);
      CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-10);
    }

  // residual per column
  for (std::size_t k = 0; k < n; ++k) {
    double r2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double mv = 0;
      for (std::size_t j = 0; j < n; ++j) mv += m(i, j) * es.vectors(j, k);
      const double r = mv - es.values[k] * es.vectors(i, k);
      r2 += r * r;
    }
    CHECK(std::sqrt(r2) < 1e-10 * nf);
  }

  // reconstruction, elementwise
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0;
      for (std::size_t k = 0; k < n; ++k)
        v += es.vectors(i, k) * es.values[k] * es.vectors(j, k);
      CHECK(std::abs(v - m(i, j)) < 1e-9 * std::max(1.0, m.frobenius_norm()));
    }

  // trace preservation
  double tr = 0, sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tr += m(i, i);
    sum += es.values[i];
  }
  CHECK(std::abs(sum - tr) < 1e-10 * std::max(1.0, std::abs(tr)));

  // sign convention: largest-magnitude entry of each column is positive
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(es.vectors(i, k)) > std::abs(es.vectors(imax, k))) imax = i;
    CHECK(es.vectors(imax, k) >= 0.0);
  }
}

}  // namespace

TEST_CASE("identity and 2x2 exchange matrix") {
  const EigenSystem id = eigen_decompose(Matrix::identity(3));
  for (double v : id.values) CHECK(v == 1.0);

  Matrix x(2);
  x(0, 1) = x(1, 0) = 1.0;
  const EigenSystem es = eigen_decompose(x);
  CHECK(es.values[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(es.values[1] == doctest::Approx(1.0).epsilon(1e-14));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(es.vectors(0, 0) == doctest::Approx(r).epsilon(1e-12));
  CHECK(es.vectors(1, 0) == doctest::Approx(-r).epsilon(1e-12));
  CHECK(es.vectors(0, 1) == doctest::Approx(r).epsilon(1e-12));
  CHECK(es.vectors(1, 1) == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("chain lowest levels at N = 10, g = 20") {
  const EigenSystem es =
      eigen_decompose(full_matrix(build_tight_binding(10, 1.0, 0.5, 20.0)));
  const double expect[5] = {0.81, 3.17, 6.90, 11.69, 17.15};
  for (std::size_t k = 0; k < 5; ++k)
    CHECK(std::abs(es.values[k] - expect[k]) < 0.005);
}

TEST_CASE("ground_state returns the lowest pair") {
  Matrix x(2);
  x(0, 1) = x(1, 0) = 1.0;
  const auto [lam, vec] = ground_state(eigen_decompose(x));
  CHECK(lam == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(vec[0] == doctest::Approx(0.70710678).epsilon(1e-7));
  CHECK(vec[1] == doctest::Approx(-0.70710678).epsilon(1e-7));

  const auto [lam_deg, vd] =
      ground_state(eigen_decompose(full_matrix(build_degenerate_fixed_point(3, 20.0))));
  CHECK(lam_deg == doctest::Approx(-20.0).epsilon(1e-12));

  const auto [lam_tb, vt] =
      ground_state(eigen_decompose(full_matrix(build_tight_binding(20, 1.0, 0.5, 20.0))));
  CHECK(std::abs(lam_tb - 0.22) < 0.005);
}

TEST_CASE("random symmetric matrices satisfy all output invariants") {
  std::mt19937 rng(123);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + rng() % 24;
    const Matrix m = oracle::random_symmetric(rng, n, 2.0);
    check_invariants(m, eigen_decompose(m));
  }
}

TEST_CASE("decomposition is deterministic") {
  std::mt19937 rng(5);
  const Matrix m = oracle::random_symmetric(rng, 12);
  const EigenSystem a = eigen_decompose(m);
  const EigenSystem b = eigen_decompose(m);
  CHECK(a.values == b.values);
  CHECK(a.vectors == b.vectors);
}

TEST_CASE("degenerate eigenspace is recovered as a subspace") {
  // For the fully connected model the lowest eigenspace is the orthogonal
  // complement of the uniform vector, with projector I - J/n.
  const std::size_t n = 6;
  const EigenSystem es =
      eigen_decompose(full_matrix(build_degenerate_fixed_point(n, 20.0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double p = 0;
      for (std::size_t k = 0; k + 1 < n; ++k)
        p += es.vectors(i, k) * es.vectors(j, k);
      const double expect = (i == j ? 1.0 : 0.0) - 1.0 / double(n);
      CHECK(std::abs(p - expect) < 1e-9);
    }
}

TEST_CASE("bad inputs are rejected") {
  Matrix m(3);
  m(0, 1) = 1.0;  // m(1,0) left 0
  CHECK(oracle::thrown_code([&] { eigen_decompose(m); }) ==
        Errc::not_symmetric);

  Matrix nan(2);
  nan(0, 0) = std::nan("");
  CHECK(oracle::thrown_code([&] { eigen_decompose(nan); }) ==
        Errc::not_finite);
}

TEST_CASE("one-dimensional input is trivial") {
  Matrix m(1);
  m(0, 0) = 4.5;
  const EigenSystem es = eigen_decompose(m);
  CHECK(es.values == Vec{4.5});
  CHECK(es.vectors(0, 0) == 1.0);
}
