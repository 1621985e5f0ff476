#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dosest/consensus.hpp"
#include "dosest/linalg.hpp"
#include "dosest/rng.hpp"

using namespace dosest;
using doctest::Approx;

TEST_CASE("matrix construction and products") {
  const auto a = Matrix::from_rows({{1, 2}, {3, 4}});
  const auto b = Matrix::from_rows({{0, 1}, {1, 0}});
  CHECK(a * b == Matrix::from_rows({{2, 1}, {4, 3}}));
  CHECK(a.transpose() == Matrix::from_rows({{1, 3}, {2, 4}}));
  const Vector x{1.0, -1.0};
  CHECK(a * x == Vector{-1.0, -1.0});
  CHECK(a.one_norm() == 6.0);
  CHECK_THROWS_AS(Matrix::from_rows({{1, 2}, {3}}), std::invalid_argument);
  CHECK(norm(Vector{3.0, 4.0}) == 5.0);
}

TEST_CASE("ring Laplacian spectra") {
  const auto l3 = symmetric_eigenvalues(consensus::laplacian(consensus::Graph::ring(3)));
  CHECK(l3[0] == Approx(0.0));
  CHECK(l3[1] == Approx(3.0));
  CHECK(l3[2] == Approx(3.0));

  const auto l7 = symmetric_eigenvalues(consensus::laplacian(consensus::Graph::ring(7)));
  REQUIRE(l7.size() == 7);
  CHECK(std::abs(l7[0]) < 1e-12);
  CHECK(l7[6] == Approx(2.0 - 2.0 * std::cos(6.0 * std::numbers::pi / 7.0)).epsilon(1e-12));
  CHECK(l7[1] == Approx(2.0 - 2.0 * std::cos(2.0 * std::numbers::pi / 7.0)).epsilon(1e-12));
}

TEST_CASE("eigenvalues reject non-symmetric input") {
  CHECK_THROWS_AS((void)symmetric_eigenvalues(Matrix::from_rows({{1, 2}, {0, 1}})), std::invalid_argument);
  CHECK_THROWS_AS((void)symmetric_eigenvalues(Matrix(2, 3)), std::invalid_argument);
}

TEST_CASE("expm closed forms") {
  const auto n = expm(Matrix::from_rows({{0, 1}, {0, 0}}));
  CHECK(n(0, 0) == Approx(1.0));
  CHECK(n(0, 1) == Approx(1.0));
  CHECK(n(1, 0) == Approx(0.0));

  const double t = 2.5;
  const auto r = expm(Matrix::from_rows({{0, -t}, {t, 0}}));
  CHECK(r(0, 0) == Approx(std::cos(t)).epsilon(1e-13));
  CHECK(r(1, 0) == Approx(std::sin(t)).epsilon(1e-13));

  const auto d = expm(Matrix::from_rows({{1, 0}, {0, -3}}));
  CHECK(d(0, 0) == Approx(std::exp(1.0)).epsilon(1e-13));
  CHECK(d(1, 1) == Approx(std::exp(-3.0)).epsilon(1e-13));

  // Upper triangular [[1, c], [0, 1]]: exp = e [[1, c], [0, 1]].
  const auto u = expm(Matrix::from_rows({{1, 0.3}, {0, 1}}));
  CHECK(u(0, 0) == Approx(std::exp(1.0)).epsilon(1e-13));
  CHECK(u(0, 1) == Approx(0.3 * std::exp(1.0)).epsilon(1e-13));
}

TEST_CASE("property: eigenvalues preserve trace and Frobenius norm") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 8));
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = rng.uniform(-5.0, 5.0);
    }
    const auto ev = symmetric_eigenvalues(a);
    double trace = 0.0;
    double frob = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      trace += a(i, i);
      for (std::size_t j = 0; j < n; ++j) frob += a(i, j) * a(i, j);
    }
    double sum = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += ev[i];
      sq += ev[i] * ev[i];
      if (i > 0) CHECK(ev[i] >= ev[i - 1]);
    }
    CHECK(sum == Approx(trace).epsilon(1e-10).scale(10.0));
    CHECK(sq == Approx(frob).epsilon(1e-10));
  }
}

TEST_CASE("property: expm(A) expm(-A) = I") {
  Rng rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 5));
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.uniform(-2.0, 2.0);
    }
    const auto p = expm(a) * expm(-1.0 * a);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(p(i, j) - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
  }
}
