#include "incl/loading.hpp"

#include <cmath>
#include <sstream>

namespace incl {

int LoadingSpec::order() const {
  int m = 0;
  for (std::size_t i = 0; i < A.size(); ++i)
    if (A[i] != cplx(0.0)) m = std::max<int>(m, i + 1);
  for (std::size_t i = 0; i < B.size(); ++i)
    if (B[i] != cplx(0.0)) m = std::max<int>(m, i + 1);
  return m;
}

cplx LoadingSpec::a(int m) const {
  return m >= 1 && m <= static_cast<int>(A.size()) ? A[m - 1] : cplx(0.0);
}

cplx LoadingSpec::b(int m) const {
  return m >= 1 && m <= static_cast<int>(B.size()) ? B[m - 1] : cplx(0.0);
}

void LoadingSpec::validate(int n) const {
  for (const auto* v : {&A, &B})
    for (const auto& c : *v)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw Error(ErrorKind::validation, "loading coefficient is not finite");
  if (order() > n) {
    std::ostringstream os;
    os << "loading order " << order() << " exceeds truncation order " << n;
    throw Error(ErrorKind::validation, os.str());
  }
}

CVector RhsVector::blocks() const {
  const Eigen::Index len = h[0].size();
  CVector out(8 * len);
  for (int j = 0; j < 4; ++j) {
    out.segment(2 * j * len, len) = h[j];
    out.segment((2 * j + 1) * len, len) = h[j].conjugate();
  }
  return out;
}

double RhsVector::norm() const { return blocks().norm(); }

HMatrices h_matrices(const MaterialPair& material, const GeometryBundle& geo,
                     const LoadingSpec& loading) {
  loading.validate(geo.n);
  const int N = geo.inner;
  const double kappa = material.exterior().kappa;
  const double mu = material.mu_ext();
  const auto& d = geo.diag;

  CVector a = CVector::Zero(N + 1), b = CVector::Zero(N + 1);
  for (int m = 1; m <= N; ++m) {
    a(m) = loading.a(m);
    b(m) = loading.b(m);
  }
  const CMatrix Db = geo.D.scaled.conjugate();
  const CMatrix Cb = geo.C.conjugate();
  const Eigen::VectorXd g1 = d.gamma_power(1), g2 = d.gamma_power(2),
                        gm2 = d.gamma_power(-2);

  // conj(A) N gamma^N conj(D) (...)
  const CVector left = a.conjugate().cwiseProduct(d.counting.cast<cplx>())
                           .cwiseProduct(g1.cast<cplx>());
  const CMatrix inner1 = g2.cast<cplx>().asDiagonal() * geo.Psi.zero +
                         Cb * gm2.cast<cplx>().asDiagonal() * geo.Psi.minus;
  const CMatrix inner2 =
      g2.cast<cplx>().asDiagonal() * geo.Psi.minus.transpose() +
      Cb * gm2.cast<cplx>().asDiagonal() * geo.Psi.plus;
  CMatrix X1 = left.asDiagonal() * (Db * inner1);
  X1 = X1 * d.identity0.cast<cplx>().asDiagonal();
  const CMatrix X2 = left.asDiagonal() * (Db * inner2);

  const CMatrix A = a.asDiagonal();
  const CMatrix AC = a.asDiagonal() * geo.C;
  const CMatrix BC = b.conjugate().asDiagonal() * Cb * gm2.cast<cplx>().asDiagonal();
  const CMatrix Bg = (b.conjugate().cwiseProduct(g2.cast<cplx>())).asDiagonal();

  HMatrices out;
  const int n = geo.n;
  out.H[0] = (kappa * A - X1 + BC).topLeftCorner(n + 1, n + 1);
  out.H[1] = (kappa * AC - X2 + Bg).topLeftCorner(n + 1, n + 1);
  out.H[2] = (mu * (A + X1 - BC)).topLeftCorner(n + 1, n + 1);
  out.H[3] = (mu * (AC + X2 * d.identity0.cast<cplx>().asDiagonal() - Bg))
                 .topLeftCorner(n + 1, n + 1);
  return out;
}

RhsVector h_vectors(const HMatrices& H) {
  RhsVector r;
  for (int j = 0; j < 4; ++j) {
    const Eigen::Index n = H.H[j].rows() - 1;
    r.h[j] = H.H[j].bottomRows(n).colwise().sum().transpose();
  }
  return r;
}

BackgroundField::BackgroundField(const GeometryBundle& geo,
                                 const MaterialPair& material,
                                 const LoadingSpec& loading)
    : loading_(loading),
      kappa_(material.exterior().kappa),
      mu_(material.mu_ext()) {
  loading_.validate(geo.inner);
  const int M = loading_.order();
  P_ = geo.P.topLeftCorner(M + 1, M + 1);
  Dtilde_ = geo.D.tilde.topLeftCorner(M + 1, M + 1);
}

BackgroundField::Pair BackgroundField::pair(cplx z) const {
  const int M = static_cast<int>(P_.rows()) - 1;
  CVector F(M + 1);
  for (int m = 0; m <= M; ++m) {
    cplx acc = 0.0;
    for (int k = m; k >= 0; --k) acc = acc * z + P_(m, k);
    F(m) = acc;
  }
  // F_m' = sum_k Dtilde(m,k) F_k, applied twice for F_m''.
  const CVector dF = Dtilde_ * F;
  const CVector ddF = Dtilde_ * dF;
  Pair p{0.0, 0.0, 0.0, 0.0, 0.0};
  for (int m = 1; m <= M; ++m) {
    const cplx a = loading_.a(m), b = loading_.b(m);
    p.f += a * F(m);
    p.df += a * dF(m);
    p.ddf += a * ddF(m);
    p.g -= b * F(m);
    p.dg -= b * dF(m);
  }
  return p;
}

BackgroundValue BackgroundField::eval(cplx z) const {
  const Pair p = pair(z);
  BackgroundValue v;
  v.u = kappa_ * p.f - z * std::conj(p.df) - std::conj(p.g);
  v.traction_potential = mu_ * (p.f + z * std::conj(p.df) + std::conj(p.g));
  return v;
}

}  // namespace incl
