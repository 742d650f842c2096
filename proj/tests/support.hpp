#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "incl/geometry.hpp"

namespace testing_support {

using incl::cplx;

// Random exterior map with K <= kmax; sum_k k |a_k| gamma^{-k-1} = budget < 1
// keeps Psi' away from zero on |w| >= gamma, which makes the map univalent.
inline incl::ConformalMap random_map(std::mt19937& rng, int kmax = 6, double budget = 0.6) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), gr(0.6, 1.6);
  std::uniform_int_distribution<int> kd(1, kmax);
  const double gamma = gr(rng);
  const int K = kd(rng);
  std::vector<cplx> a(K + 1);
  a[0] = cplx(u(rng), u(rng));
  double weight = 0.0;
  for (int k = 1; k <= K; ++k) {
    a[k] = cplx(u(rng), u(rng));
    weight += k * std::abs(a[k]) * std::pow(gamma, -k - 1);
  }
  const double s = budget / weight;
  for (int k = 1; k <= K; ++k) a[k] *= s;
  if (a.back() == cplx(0.0)) a.back() = 1e-3;
  return incl::ConformalMap(gamma, a);
}

// Coefficients b_j of a sampled periodic function f(theta) = sum_j b_j e^{ij theta},
// by direct DFT on q equispaced samples; index j in [-q/2, q/2).
template <class F>
std::vector<cplx> fourier(F&& f, int q) {
  std::vector<cplx> samples(q);
  for (int i = 0; i < q; ++i) samples[i] = f(2.0 * M_PI * i / q);
  std::vector<cplx> b(q);
  for (int j = -q / 2; j < q / 2; ++j) {
    cplx acc = 0.0;
    for (int i = 0; i < q; ++i) acc += samples[i] * std::polar(1.0, -2.0 * M_PI * double(j) * i / q);
    b[j + q / 2] = acc / double(q);
  }
  return b;
}

inline cplx fourier_at(const std::vector<cplx>& b, int j) {
  const int q = int(b.size());
  return b[j + q / 2];
}

// Minimal quad-precision complex arithmetic for reference products whose
// double or long double evaluation loses the digits under test.
struct qcplx {
  __float128 re = 0, im = 0;
  qcplx() = default;
  qcplx(__float128 r, __float128 i = 0) : re(r), im(i) {}
  explicit qcplx(cplx z) : re(z.real()), im(z.imag()) {}
  qcplx operator+(const qcplx& o) const { return {re + o.re, im + o.im}; }
  qcplx operator-(const qcplx& o) const { return {re - o.re, im - o.im}; }
  qcplx operator*(const qcplx& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  qcplx& operator+=(const qcplx& o) { return *this = *this + o; }
  qcplx& operator-=(const qcplx& o) { return *this = *this - o; }
  double abs() const { return std::hypot(double(re), double(im)); }
};

using QMatrix = std::vector<std::vector<qcplx>>;

inline QMatrix qzeros(int n) { return QMatrix(n, std::vector<qcplx>(n)); }

inline QMatrix qmul(const QMatrix& a, const QMatrix& b) {
  const int n = int(a.size());
  QMatrix c = qzeros(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// P from the coefficient recursion, P^-1 by forward substitution and
// P T P^-1, all in quad precision.
inline QMatrix derivative_reference(const incl::ConformalMap& map, int n) {
  const int N = n + 1;
  QMatrix P = qzeros(N);
  P[0][0] = qcplx(1);
  for (int m = 0; m < n; ++m) {
    for (int j = 0; j <= m; ++j) P[m + 1][j + 1] = P[m][j];
    P[m + 1][0] -= qcplx(__float128(m)) * qcplx(map.coefficient(m));
    for (int k = 0; k <= m; ++k) {
      const qcplx a(map.coefficient(m - k));
      for (int j = 0; j <= k; ++j) P[m + 1][j] -= a * P[k][j];
    }
  }
  QMatrix X = qzeros(N);
  for (int j = 0; j < N; ++j) {
    X[j][j] = qcplx(1);
    for (int i = j + 1; i < N; ++i) {
      qcplx acc;
      for (int k = j; k < i; ++k) acc -= P[i][k] * X[k][j];
      X[i][j] = acc;
    }
  }
  QMatrix T = qzeros(N);
  for (int i = 1; i < N; ++i) T[i][i - 1] = qcplx(__float128(i));
  return qmul(qmul(P, T), X);
}

}  // namespace testing_support
