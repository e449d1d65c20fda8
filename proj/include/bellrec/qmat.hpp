#pragma once

// Dense complex matrices for one and two qubits.
//
// Everything here is a value type over std::array storage; the dimension is a
// template parameter so a qubit operator can never be mixed up with a
// two-qubit one.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <string>

#include "bellrec/errors.hpp"

namespace bellrec {

using cplx = std::complex<double>;

template <std::size_t N>
class Mat {
  static_assert(N == 2 || N == 4, "only qubit and two-qubit operators are supported");

 public:
  static constexpr std::size_t dim = N;

  Mat() = default;

  // Row-major nested initializer, e.g. Mat2{{0, 1}, {1, 0}}.
  Mat(std::initializer_list<std::initializer_list<cplx>> rows) {
    if (rows.size() != N) throw InvalidArgument("Mat: wrong number of rows");
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != N) throw InvalidArgument("Mat: wrong number of columns");
      std::size_t j = 0;
      for (const auto& v : row) (*this)(i, j++) = v;
      ++i;
    }
  }

  static Mat identity() {
    Mat m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  static Mat diagonal(const std::array<double, N>& d) {
    Mat m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  cplx& operator()(std::size_t i, std::size_t j) { return a_[i * N + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * N + j]; }

  const std::array<cplx, N * N>& entries() const { return a_; }

  Mat adjoint() const {
    Mat r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) r(i, j) = std::conj((*this)(j, i));
    return r;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
    return t;
  }

  Mat& operator+=(const Mat& o) {
    for (std::size_t k = 0; k < N * N; ++k) a_[k] += o.a_[k];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    for (std::size_t k = 0; k < N * N; ++k) a_[k] -= o.a_[k];
    return *this;
  }
  Mat& operator*=(cplx s) {
    for (auto& v : a_) v *= s;
    return *this;
  }

  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator-(Mat a) { return a *= -1.0; }
  friend Mat operator*(Mat a, cplx s) { return a *= s; }
  friend Mat operator*(cplx s, Mat a) { return a *= s; }
  friend Mat operator*(Mat a, double s) { return a *= s; }
  friend Mat operator*(double s, Mat a) { return a *= s; }

  friend Mat operator*(const Mat& a, const Mat& b) {
    Mat r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < N; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::array<cplx, N * N> a_{};
};

using Mat2 = Mat<2>;
using Mat4 = Mat<4>;

template <std::size_t N>
double max_abs_diff(const Mat<N>& a, const Mat<N>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < N * N; ++k) m = std::max(m, std::abs(a.entries()[k] - b.entries()[k]));
  return m;
}

template <std::size_t N>
double frobenius_norm(const Mat<N>& a) {
  double s = 0.0;
  for (const auto& v : a.entries()) s += std::norm(v);
  return std::sqrt(s);
}

template <std::size_t N>
double hermiticity_error(const Mat<N>& a) {
  return max_abs_diff(a, a.adjoint());
}

template <std::size_t N>
bool is_hermitian(const Mat<N>& a, double tol = 1e-12) {
  return hermiticity_error(a) <= tol;
}

template <std::size_t N>
bool is_unitary(const Mat<N>& u, double tol = 1e-12) {
  return max_abs_diff(u * u.adjoint(), Mat<N>::identity()) <= tol;
}

// Tr(a·b) without forming the product.
template <std::size_t N>
cplx trace_of_product(const Mat<N>& a, const Mat<N>& b) {
  cplx t = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < N; ++k) t += a(i, k) * b(k, i);
  return t;
}

// Validates a Hermitian input and removes the sub-tolerance anti-Hermitian part.
template <std::size_t N>
Mat<N> hermitian_from(const Mat<N>& m, double tol = 1e-12) {
  if (!is_hermitian(m, tol)) throw InvalidArgument("matrix is not Hermitian within tolerance");
  return 0.5 * (m + m.adjoint());
}

namespace pauli {

inline Mat2 identity() { return Mat2::identity(); }
inline Mat2 sigma1() { return Mat2{{0.0, 1.0}, {1.0, 0.0}}; }
inline Mat2 sigma2() { return Mat2{{0.0, cplx{0.0, -1.0}}, {cplx{0.0, 1.0}, 0.0}}; }
inline Mat2 sigma3() { return Mat2{{1.0, 0.0}, {0.0, -1.0}}; }

}  // namespace pauli

inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 r;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l) r(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return r;
}

// Traces out the second qubit: result[i][j] = sum_k m[2i+k][2j+k].
inline Mat2 partial_trace_second(const Mat4& m) {
  Mat2 r;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) r(i, j) = m(2 * i, 2 * j) + m(2 * i + 1, 2 * j + 1);
  return r;
}

/// exp(i·alpha·sigma2). With sigma2 = [[0,-i],[i,0]] this is the real rotation
/// [[cos a, sin a], [-sin a, cos a]].
inline Mat2 rot_sigma2(double alpha) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  return Mat2{{c, s}, {-s, c}};
}

/// cos(alpha)·sigma1 + sin(alpha)·sigma3, a dichotomic observable in the x-z plane.
inline Mat2 xz_observable(double alpha) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  return Mat2{{s, c}, {c, -s}};
}

// Eigendecomposition of a Hermitian matrix. Eigenvalues ascend; column k of
// `vectors` is the unit eigenvector of values[k].
template <std::size_t N>
struct HermEig {
  std::array<double, N> values{};
  Mat<N> vectors;
};

namespace detail {

template <std::size_t N>
void sort_eig(HermEig<N>& e) {
  std::array<std::size_t, N> order;
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return e.values[a] < e.values[b]; });
  HermEig<N> sorted;
  for (std::size_t k = 0; k < N; ++k) {
    sorted.values[k] = e.values[order[k]];
    for (std::size_t i = 0; i < N; ++i) sorted.vectors(i, k) = e.vectors(i, order[k]);
  }
  e = sorted;
}

// Cyclic complex Jacobi. Each rotation first rephases column q so that the
// pivot a_pq is real, then applies the real symmetric Jacobi rotation.
template <std::size_t N>
HermEig<N> jacobi_eigh(const Mat<N>& m, int max_sweeps = 64) {
  Mat<N> a = 0.5 * (m + m.adjoint());
  Mat<N> v = Mat<N>::identity();
  const double threshold = 1e-13 * std::max(1.0, frobenius_norm(a));

  auto off_max = [&] {
    double o = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j) o = std::max(o, std::abs(a(i, j)));
    return o;
  };

  for (int sweep = 0; sweep < max_sweeps && off_max() >= threshold; ++sweep) {
    for (std::size_t p = 0; p < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        const cplx g = a(p, q);
        const double mag = std::abs(g);
        if (mag < 1e-300) continue;
        const cplx phase = g / mag;
        const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // J = D·R with D = diag(.., 1 at p, conj(phase) at q, ..)
        Mat<N> j = Mat<N>::identity();
        j(p, p) = c;
        j(p, q) = s;
        j(q, p) = -s * std::conj(phase);
        j(q, q) = c * std::conj(phase);

        a = j.adjoint() * a * j;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        v = v * j;
      }
    }
  }
  if (off_max() >= threshold) throw NumericalFailure("jacobi_eigh: no convergence");

  HermEig<N> e;
  for (std::size_t k = 0; k < N; ++k) e.values[k] = a(k, k).real();
  e.vectors = v;
  sort_eig(e);
  return e;
}

inline HermEig<2> closed_form_eigh(const Mat2& m) {
  const double a = m(0, 0).real(), d = m(1, 1).real();
  const cplx b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
  const double mean = 0.5 * (a + d);
  const double half_gap = std::hypot(0.5 * (a - d), std::abs(b));

  HermEig<2> e;
  e.values = {mean - half_gap, mean + half_gap};
  if (std::abs(b) <= 1e-300) {
    if (a <= d) {
      e.vectors = Mat2::identity();
    } else {
      e.vectors = Mat2{{0.0, 1.0}, {1.0, 0.0}};
    }
    return e;
  }
  for (std::size_t k = 0; k < 2; ++k) {
    const double lambda = e.values[k];
    // Two candidate null vectors of (m - lambda); take the better conditioned one.
    std::array<cplx, 2> u{b, lambda - a};
    std::array<cplx, 2> w{lambda - d, std::conj(b)};
    const double nu = std::hypot(std::abs(u[0]), std::abs(u[1]));
    const double nw = std::hypot(std::abs(w[0]), std::abs(w[1]));
    const auto& pick = nu >= nw ? u : w;
    const double n = std::max(nu, nw);
    e.vectors(0, k) = pick[0] / n;
    e.vectors(1, k) = pick[1] / n;
  }
  return e;
}

}  // namespace detail

template <std::size_t N>
HermEig<N> eigh(const Mat<N>& m) {
  if constexpr (N == 2) {
    return detail::closed_form_eigh(m);
  } else {
    return detail::jacobi_eigh(m);
  }
}

template <std::size_t N>
double min_eigenvalue(const Mat<N>& m) {
  return eigh(m).values.front();
}

// Principal square root of a Hermitian PSD matrix. Eigenvalues in [-1e-9, 0)
// are treated as 0; anything more negative is an error. Positive eigenvalues
// at rounding level are zeroed as well, since sqrt would blow 1e-17 up to 3e-9.
template <std::size_t N>
Mat<N> sqrt_psd(const Mat<N>& m) {
  const HermEig<N> e = eigh(m);
  const double scale = std::max({1.0, std::abs(e.values.front()), std::abs(e.values.back())});
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  std::array<double, N> roots{};
  for (std::size_t k = 0; k < N; ++k) {
    const double lambda = e.values[k];
    if (lambda < -1e-9) throw NotPsdError("sqrt_psd: eigenvalue " + std::to_string(lambda));
    roots[k] = lambda > floor ? std::sqrt(lambda) : 0.0;
  }
  return e.vectors * Mat<N>::diagonal(roots) * e.vectors.adjoint();
}

}  // namespace bellrec
