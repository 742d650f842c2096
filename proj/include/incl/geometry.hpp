#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "incl/common.hpp"
#include "incl/laurent.hpp"

namespace incl {

struct BoundaryPoint {
  cplx w;    // gamma * e^{i theta}
  cplx z;    // Psi(w)
  double h;  // |w Psi'(w)|, so that d sigma = h d theta
};

/// Exterior conformal map Psi(w) = w + a_0 + a_1/w + ... + a_K/w^K from
/// |w| > gamma onto the complement of the inclusion.
class ConformalMap {
 public:
  // a holds a_0..a_K. delta is the inward analytic-extension margin used for
  // evaluation below |w| = gamma (default 0.1 gamma). Throws
  // ErrorKind::validation for gamma <= 0, non-finite data, a degenerate
  // parametrization, or a boundary curve that is not simple.
  ConformalMap(double gamma, std::vector<cplx> a,
               std::optional<double> delta = std::nullopt);

  double gamma() const { return gamma_; }
  double log_gamma() const { return std::log(gamma_); }
  double delta() const { return delta_; }
  int depth() const { return static_cast<int>(a_.size()) - 1; }
  const std::vector<cplx>& coefficients() const { return a_; }

  // a_k with a_{-1} = 1 and a_k = 0 for k < -1 or k > K.
  cplx coefficient(int k) const;

  // Throw ErrorKind::domain when |w| < gamma - delta.
  cplx eval(cplx w) const;
  // Also throws ErrorKind::singular when |Psi'(w)| < 1e-12.
  cplx derivative(cplx w) const;
  cplx second_derivative(cplx w) const;

  BoundaryPoint boundary_point(double theta) const;

  // Exterior preimage of z by Newton iteration; nullopt when the iteration
  // leaves |w| >= gamma - delta or fails to converge.
  std::optional<cplx> inverse(cplx z) const;

  LaurentSeries as_series() const;

 private:
  void check_radius(cplx w) const;

  double gamma_;
  std::vector<cplx> a_;
  double delta_;
};

// Sampled test of the curve theta -> Psi(gamma e^{i theta}): positively
// oriented and free of self-intersections between non-adjacent segments.
bool boundary_is_simple(const ConformalMap& map, int samples = 1024);

// Faber coefficient matrix P: row m holds F_m(z) = sum_n p_mn z^n.
CMatrix faber_matrix(const ConformalMap& map, int n);
CMatrix faber_inverse(const CMatrix& P);
// Subdiagonal (1, 2, ..., n): the derivative in the monomial basis.
Eigen::MatrixXd shift_matrix(int n);

struct FaberDerivatives {
  CMatrix tilde;   // F_m' = sum_k tilde(m,k) F_k
  CMatrix scaled;  // tilde(m,k) / (m gamma^m), row 0 zero
};
FaberDerivatives faber_derivative_matrices(const ConformalMap& map, int n);

// c_mk for 0 <= m <= nrow, 0 <= k <= ncol from the Faber recursion run on
// the Laurent series of Psi in the window [-(ncol + guard), nrow]. guard
// defaults to nrow, the smallest value for which every entry is exact.
CMatrix grunsky_matrix(const ConformalMap& map, int nrow, int ncol,
                       std::optional<int> guard = std::nullopt);
inline CMatrix grunsky_matrix(const ConformalMap& map, int n) {
  return grunsky_matrix(map, n, n);
}

struct MapMatrices {
  CMatrix plus;   // a_{m+n}
  CMatrix minus;  // a_{m-n}
  CMatrix zero;   // a_0 at (0,0), 1 at (1,0) and (0,1)
};
MapMatrices psi_matrices(const ConformalMap& map, int n);

/// Diagonal scalings of the finite sections, stored as vectors.
struct DiagonalSet {
  int n = 0;
  double gamma = 1.0;
  Eigen::VectorXd counting;       // (1, 1, 2, 3, ...)
  Eigen::VectorXd counting_inv;   // (1, 1, 1/2, 1/3, ...)
  Eigen::VectorXd counting0;      // (0, 1, 2, 3, ...)
  Eigen::VectorXd counting0_inv;  // (0, 1, 1/2, 1/3, ...)
  Eigen::VectorXd identity0;      // (0, 1, 1, 1, ...)
  Eigen::MatrixXd shift;          // T

  Eigen::VectorXd gamma_power(double k) const;   // gamma^{k j}
  Eigen::VectorXd gamma_power0(double k) const;  // same with entry 0 zeroed
};
DiagonalSet diagonal_matrices(int n, double gamma);

/// Every map-derived finite section at one shared inner order. Products are
/// formed at the inner order and cut back to n + 1 afterwards so the banded
/// map matrices never lose entries at the edge.
struct GeometryBundle {
  GeometryBundle(const ConformalMap& map, int n);

  ConformalMap map;
  int n;
  int inner;
  CMatrix P, P_inv;
  FaberDerivatives D;
  CMatrix C;
  MapMatrices Psi;
  DiagonalSet diag;
};

}  // namespace incl
