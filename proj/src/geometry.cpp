#include "incl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace incl {

namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool segments_cross(cplx p1, cplx p2, cplx q1, cplx q2) {
  const double d1 = cross(p2 - p1, q1 - p1), d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1), d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 &&
         d2 != 0 && d3 != 0 && d4 != 0;
}

}  // namespace

ConformalMap::ConformalMap(double gamma, std::vector<cplx> a,
                           std::optional<double> delta)
    : gamma_(gamma), a_(std::move(a)), delta_(delta.value_or(0.1 * gamma)) {
  if (!(gamma_ > 0.0) || !std::isfinite(gamma_))
    throw Error(ErrorKind::validation, "conformal radius must be positive");
  if (a_.empty()) a_.assign(1, cplx(0.0));
  for (const auto& v : a_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error(ErrorKind::validation, "map coefficient is not finite");
  if (!(delta_ >= 0.0) || delta_ >= gamma_)
    throw Error(ErrorKind::validation,
                "extension margin delta must lie in [0, gamma)");
  // Trailing zeros carry no information and would inflate the band width.
  while (a_.size() > 1 && a_.back() == cplx(0.0)) a_.pop_back();

  constexpr int samples = 1024;
  for (int j = 0; j < samples; ++j) {
    const cplx w = std::polar(gamma_, 2.0 * pi * j / samples);
    cplx dpsi = 1.0;
    for (int k = 1; k <= depth(); ++k)
      dpsi -= double(k) * a_[k] * std::pow(w, -k - 1);
    if (std::abs(w * dpsi) < 1e-12 * gamma_) {
      std::ostringstream os;
      os << "degenerate boundary parametrization at theta="
         << 2.0 * pi * j / samples;
      throw Error(ErrorKind::validation, os.str());
    }
  }
  if (!boundary_is_simple(*this, samples))
    throw Error(ErrorKind::validation,
                "map coefficients do not give a simple boundary curve");
}

cplx ConformalMap::coefficient(int k) const {
  if (k == -1) return 1.0;
  if (k < -1 || k > depth()) return 0.0;
  return a_[k];
}

void ConformalMap::check_radius(cplx w) const {
  if (std::abs(w) < gamma_ - delta_) {
    std::ostringstream os;
    os << "|w|=" << std::abs(w) << " below the admissible radius "
       << gamma_ - delta_;
    throw Error(ErrorKind::domain, os.str());
  }
}

cplx ConformalMap::eval(cplx w) const {
  check_radius(w);
  const cplx u = 1.0 / w;
  cplx acc = 0.0;
  for (int k = depth(); k >= 0; --k) acc = acc * u + a_[k];
  return w + acc;
}

cplx ConformalMap::derivative(cplx w) const {
  check_radius(w);
  const cplx u = 1.0 / w;
  cplx acc = 0.0;
  for (int k = depth(); k >= 1; --k) acc = acc * u + double(k) * a_[k];
  const cplx d = 1.0 - acc * u * u;
  if (std::abs(d) < 1e-12)
    throw Error(ErrorKind::singular, "map derivative vanishes");
  return d;
}

cplx ConformalMap::second_derivative(cplx w) const {
  check_radius(w);
  cplx r = 0.0;
  for (int k = 1; k <= depth(); ++k)
    r += double(k) * double(k + 1) * a_[k] * std::pow(w, -k - 2);
  return r;
}

BoundaryPoint ConformalMap::boundary_point(double theta) const {
  BoundaryPoint b;
  b.w = std::polar(gamma_, theta);
  b.z = eval(b.w);
  b.h = std::abs(b.w * derivative(b.w));
  return b;
}

std::optional<cplx> ConformalMap::inverse(cplx z) const {
  const cplx base = z - a_[0];
  std::vector<cplx> guesses{base};
  const double r = std::max(std::abs(base), 1.05 * gamma_);
  for (int j = 0; j < 16; ++j) guesses.push_back(std::polar(r, 2 * pi * j / 16));
  for (cplx w : guesses) {
    if (std::abs(w) < gamma_) w *= 1.05 * gamma_ / std::max(std::abs(w), 1e-300);
    bool ok = false;
    for (int it = 0; it < 100; ++it) {
      if (std::abs(w) < gamma_ - delta_) break;
      const cplx step = (eval(w) - z) / derivative(w);
      w -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(w))) {
        ok = true;
        break;
      }
    }
    if (ok && std::abs(w) >= gamma_ * (1.0 - 1e-12)) return w;
  }
  return std::nullopt;
}

LaurentSeries ConformalMap::as_series() const {
  std::vector<cplx> c(depth() + 2);
  // lo = -K: c[0] is a_K, c[K] is a_0, c[K+1] is the w coefficient.
  for (int k = 0; k <= depth(); ++k) c[depth() - k] = a_[k];
  c[depth() + 1] = 1.0;
  return LaurentSeries(-depth(), std::move(c));
}

bool boundary_is_simple(const ConformalMap& map, int samples) {
  std::vector<cplx> p(samples);
  double area = 0.0;
  for (int j = 0; j < samples; ++j)
    p[j] = map.eval(std::polar(map.gamma(), 2.0 * pi * j / samples));
  for (int j = 0; j < samples; ++j) area += cross(p[j], p[(j + 1) % samples]);
  if (!(area > 0.0)) return false;
  for (int i = 0; i < samples; ++i) {
    const cplx a = p[i], b = p[(i + 1) % samples];
    for (int j = i + 2; j < samples; ++j) {
      if (i == 0 && j == samples - 1) continue;
      if (segments_cross(a, b, p[j], p[(j + 1) % samples])) return false;
    }
  }
  return true;
}

CMatrix faber_matrix(const ConformalMap& map, int n) {
  if (n < 0) throw Error(ErrorKind::validation, "negative truncation order");
  CMatrix P = CMatrix::Zero(n + 1, n + 1);
  P(0, 0) = 1.0;
  for (int m = 0; m < n; ++m) {
    // F_{m+1} = z F_m - m a_m - sum_{k=0}^{m} a_{m-k} F_k
    for (int j = 0; j <= m; ++j) P(m + 1, j + 1) = P(m, j);
    P(m + 1, 0) -= double(m) * map.coefficient(m);
    for (int k = 0; k <= m; ++k) {
      const cplx a = map.coefficient(m - k);
      if (a == cplx(0.0)) continue;
      P.row(m + 1).head(k + 1) -= a * P.row(k).head(k + 1);
    }
  }
  return P;
}

CMatrix faber_inverse(const CMatrix& P) {
  const Eigen::Index n = P.rows();
  if (P.cols() != n)
    throw Error(ErrorKind::order_mismatch, "Faber matrix must be square");
  CMatrix X = CMatrix::Zero(n, n);
  // Row-wise forward substitution of P X = I with unit diagonal.
  for (Eigen::Index j = 0; j < n; ++j) {
    X(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      cplx s = 0.0;
      for (Eigen::Index k = j; k < i; ++k) s += P(i, k) * X(k, j);
      X(i, j) = -s;
    }
  }
  return X;
}

Eigen::MatrixXd shift_matrix(int n) {
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i < n; ++i) T(i + 1, i) = i + 1;
  return T;
}

FaberDerivatives faber_derivative_matrices(const ConformalMap& map, int n) {
  // F_k(Psi(w)) = w^k + O(1/w), so tilde(m,k) is the w^k coefficient of
  // F_m'(Psi(w)) = m w^{m-1} / Psi'(w) + (negative powers), i.e. m e_{m-1-k}
  // with 1/Psi'(w) = sum_j e_j w^{-j}.
  if (n < 0) throw Error(ErrorKind::validation, "negative truncation order");
  std::vector<cplx> b(n + 1, 0.0), e(n + 1, 0.0);
  b[0] = 1.0;
  for (int j = 2; j <= n; ++j) b[j] = -double(j - 1) * map.coefficient(j - 1);
  e[0] = 1.0;
  for (int j = 1; j <= n; ++j) {
    cplx acc = 0.0;
    for (int i = 1; i <= j; ++i) acc -= b[i] * e[j - i];
    e[j] = acc;
  }
  FaberDerivatives d;
  d.tilde = CMatrix::Zero(n + 1, n + 1);
  for (int m = 1; m <= n; ++m)
    for (int k = 0; k < m; ++k) d.tilde(m, k) = double(m) * e[m - 1 - k];
  d.scaled = CMatrix::Zero(n + 1, n + 1);
  for (int m = 1; m <= n; ++m)
    d.scaled.row(m) = d.tilde.row(m) / (double(m) * std::pow(map.gamma(), m));
  return d;
}

CMatrix grunsky_matrix(const ConformalMap& map, int nrow, int ncol,
                       std::optional<int> guard) {
  const int g = guard.value_or(nrow);
  if (nrow < 0 || ncol < 0 || g < 0)
    throw Error(ErrorKind::validation, "negative Grunsky section size");
  // F_m(Psi(w)) is exact down to w^{-(ncol + g) + m} after m products.
  if (g < nrow) {
    std::ostringstream os;
    os << "Laurent window guard " << g << " leaves c_mk inexact for m > " << g;
    throw Error(ErrorKind::window, os.str());
  }
  const Window win{-(ncol + g), nrow};
  const LaurentSeries psi = map.as_series();
  std::vector<LaurentSeries> F;
  F.reserve(nrow + 1);
  F.push_back(LaurentSeries::monomial(0).truncated(win));
  for (int m = 0; m < nrow; ++m) {
    LaurentSeries next = multiply(psi, F[m], win);
    next.set(0, next.coefficient(0) - double(m) * map.coefficient(m));
    for (int k = 0; k <= m; ++k) {
      const cplx a = map.coefficient(m - k);
      if (a == cplx(0.0)) continue;
      next = add(next, scale(F[k], -a)).truncated(win);
    }
    F.push_back(std::move(next));
  }
  CMatrix C = CMatrix::Zero(nrow + 1, ncol + 1);
  for (int m = 1; m <= nrow; ++m)
    for (int k = 1; k <= ncol; ++k) C(m, k) = F[m].coefficient(-k);
  return C;
}

MapMatrices psi_matrices(const ConformalMap& map, int n) {
  MapMatrices M;
  M.plus = CMatrix::Zero(n + 1, n + 1);
  M.minus = CMatrix::Zero(n + 1, n + 1);
  M.zero = CMatrix::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      M.plus(i, j) = map.coefficient(i + j);
      M.minus(i, j) = map.coefficient(i - j);
    }
  M.zero(0, 0) = map.coefficient(0);
  if (n >= 1) {
    M.zero(1, 0) = 1.0;
    M.zero(0, 1) = 1.0;
  }
  return M;
}

Eigen::VectorXd DiagonalSet::gamma_power(double k) const {
  Eigen::VectorXd v(n + 1);
  for (int j = 0; j <= n; ++j) v(j) = std::pow(gamma, k * j);
  return v;
}

Eigen::VectorXd DiagonalSet::gamma_power0(double k) const {
  Eigen::VectorXd v = gamma_power(k);
  v(0) = 0.0;
  return v;
}

DiagonalSet diagonal_matrices(int n, double gamma) {
  if (n < 0 || !(gamma > 0.0))
    throw Error(ErrorKind::validation, "diagonal sections need n >= 0, gamma > 0");
  DiagonalSet d;
  d.n = n;
  d.gamma = gamma;
  d.counting.resize(n + 1);
  d.counting_inv.resize(n + 1);
  d.counting0.resize(n + 1);
  d.counting0_inv.resize(n + 1);
  d.identity0.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    d.counting(j) = j == 0 ? 1.0 : j;
    d.counting_inv(j) = 1.0 / d.counting(j);
    d.counting0(j) = j;
    d.counting0_inv(j) = j == 0 ? 0.0 : 1.0 / j;
    d.identity0(j) = j == 0 ? 0.0 : 1.0;
  }
  d.shift = shift_matrix(n);
  return d;
}

GeometryBundle::GeometryBundle(const ConformalMap& m, int order)
    : map(m), n(order), inner(order + m.depth() + 3) {
  if (n < 1) throw Error(ErrorKind::validation, "truncation order must be >= 1");
  P = faber_matrix(map, inner);
  P_inv = faber_inverse(P);
  D = faber_derivative_matrices(map, inner);
  C = grunsky_matrix(map, inner);
  Psi = psi_matrices(map, inner);
  diag = diagonal_matrices(inner, map.gamma());
}

}  // namespace incl
