#pragma once

// Random generators and shared checks for the unit tests.

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "bellrec/chsh.hpp"
#include "bellrec/qmat.hpp"
#include "bellrec/states.hpp"
#include "bellrec/strategies.hpp"

namespace testing_support {

using namespace bellrec;

template <std::size_t N>
Mat<N> random_mat(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat<N> m;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

inline Mat2 random_mat2(std::mt19937_64& rng) { return random_mat<2>(rng); }

inline Mat2 random_hermitian2(std::mt19937_64& rng) {
  const Mat2 m = random_mat<2>(rng);
  return 0.5 * (m + m.adjoint());
}

inline Mat4 random_hermitian4(std::mt19937_64& rng) {
  const Mat4 m = random_mat<4>(rng);
  return 0.5 * (m + m.adjoint());
}

// v·diag(r)·v† with unitary v from the eigenvectors of a random Hermitian.
inline Mat4 random_psd4(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0);
  const Mat4 v = eigh(random_hermitian4(rng)).vectors;
  std::array<double, 4> r{u(rng), u(rng), u(rng), u(rng)};
  if (rng() % 3 == 0) r[rng() % 4] = 0.0;  // rank deficient now and then
  return v * Mat4::diagonal(r) * v.adjoint();
}

inline Mat2 random_density2(std::mt19937_64& rng) {
  const Mat2 g = random_mat<2>(rng);
  Mat2 m = g * g.adjoint();
  return m * (1.0 / m.trace().real());
}

inline TwoQubitState random_state(std::mt19937_64& rng) {
  const Mat4 g = random_mat<4>(rng);
  Mat4 m = g * g.adjoint();
  if (rng() % 4 == 0) {  // pure now and then
    const Mat4 v = eigh(m).vectors;
    std::array<cplx, 4> psi{};
    for (std::size_t i = 0; i < 4; ++i) psi[i] = v(i, 3);
    Mat4 p;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) p(i, j) = psi[i] * std::conj(psi[j]);
    m = p;
  }
  m = m * (1.0 / m.trace().real());
  return TwoQubitState(0.5 * (m + m.adjoint()));
}

inline Mat4 outer(const std::array<double, 4>& psi) {
  Mat4 m;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) m(i, j) = psi[i] * psi[j];
  return m;
}

// n·sigma for a random unit Bloch vector.
inline Mat2 random_observable(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double x = g(rng), y = g(rng), z = g(rng);
  const double n = std::sqrt(x * x + y * y + z * z);
  x /= n, y /= n, z /= n;
  return x * pauli::sigma1() + y * pauli::sigma2() + z * pauli::sigma3();
}

inline Mat2 random_unitary(std::mt19937_64& rng) {
  return eigh(random_hermitian2(rng)).vectors;
}

inline OperatorSet random_operators(std::mt19937_64& rng) {
  OperatorSet ops;
  for (auto* pair : {&ops.alice, &ops.bob, &ops.charlie})
    for (auto& o : *pair) o = random_observable(rng);
  if (rng() % 3 == 0) ops.bob[rng() % 2] = Mat2::identity();
  for (auto& u : ops.bob_unitaries) u = random_unitary(rng);
  return ops;
}

inline StrategyCase random_case(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  return StrategyCase::with_setting(case_from_int(static_cast<int>(rng() % 3) + 1), ang(rng));
}

template <std::size_t N>
void expect_valid_eig(const Mat<N>& m, const HermEig<N>& e) {
  for (std::size_t k = 0; k < N; ++k) {
    if (k > 0) EXPECT_LE(e.values[k - 1], e.values[k]);
    for (std::size_t i = 0; i < N; ++i) {
      cplx mv = 0.0;
      for (std::size_t j = 0; j < N; ++j) mv += m(i, j) * e.vectors(j, k);
      EXPECT_LE(std::abs(mv - e.values[k] * e.vectors(i, k)), 1e-10);
    }
    for (std::size_t l = 0; l < N; ++l) {
      cplx dot = 0.0;
      for (std::size_t i = 0; i < N; ++i) dot += std::conj(e.vectors(i, k)) * e.vectors(i, l);
      if (k == l) {
        EXPECT_LE(std::abs(dot - 1.0), 1e-12);
      } else {
        EXPECT_LE(std::abs(dot), 1e-10);
      }
    }
  }
}

}  // namespace testing_support
