#include "incl/system.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace incl {

namespace {

using DiagC = Eigen::DiagonalMatrix<cplx, Eigen::Dynamic>;

DiagC diag(const Eigen::VectorXd& v) { return DiagC(v.cast<cplx>()); }

struct Scalings {
  DiagC g1, gm1, g2, gm2, n0inv, i0;
};

Scalings scalings(const GeometryBundle& geo) {
  const auto& d = geo.diag;
  return {diag(d.gamma_power(1)),   diag(d.gamma_power(-1)),
          diag(d.gamma_power(2)),   diag(d.gamma_power(-2)),
          diag(d.counting0_inv),    diag(d.identity0)};
}

CMatrix cut(const CMatrix& M, int n) { return M.topLeftCorner(n + 1, n + 1); }

// Both block families share everything except the I0 placements on the
// M-driven rows and a few signs in the traction columns.
SBlocks blocks(const GeometryBundle& geo, const KelvinConstants& k, double mu,
               bool interior) {
  const MBlocks M = m_blocks(geo);
  const Scalings s = scalings(geo);
  const CMatrix C = geo.C, Cb = geo.C.conjugate();
  const double al = k.alpha, be = k.beta;
  const int N = geo.inner;

  const CMatrix A11 = s.n0inv * CMatrix(s.gm1);
  const CMatrix A31 = A11 * Cb * s.gm2;
  const CMatrix A12 = A11 * C;
  const CMatrix A32 = s.n0inv * CMatrix(s.g1);

  const CMatrix M21 = s.i0 * M.m21 * s.i0;
  const CMatrix M22 = s.i0 * M.m22;
  const CMatrix M22r = s.i0 * M.m22 * s.i0;
  const CMatrix M41 = interior ? CMatrix(M.m41 * s.i0) : CMatrix(s.i0 * M.m41 * s.i0);
  const CMatrix M42 = interior ? M.m42 : CMatrix(s.i0 * M.m42);
  const CMatrix M42r = interior ? CMatrix(M.m42 * s.i0) : CMatrix(s.i0 * M.m42 * s.i0);

  SBlocks S;
  S[0][0] = -al * A11;
  S[1][0] = be * M21;
  S[2][0] = -al * A31;
  S[3][0] = be * M41;

  S[0][1] = -al * A12;
  S[1][1] = be * M22;
  S[2][1] = -al * A32;
  if (interior) S[2][1](0, 0) += 2.0 * al * geo.map.log_gamma() - be;
  S[3][1] = be * M42;

  S[0][2] = interior ? CMatrix(-mu * be * A11) : CMatrix(mu * al * A11);
  S[1][2] = -mu * be * M21;
  S[2][2] = mu * al * A31;
  S[3][2] = -mu * be * M41;

  S[0][3] = -mu * be * A12;
  S[1][3] = -mu * be * M22r;
  S[2][3] = interior ? CMatrix(mu * al * A32) : CMatrix(-mu * be * A32);
  S[3][3] = -mu * be * M42r;

  for (auto& row : S)
    for (auto& b : row) {
      if (b.rows() != N + 1 || b.cols() != N + 1)
        throw Error(ErrorKind::order_mismatch, "block size mismatch");
      b = cut(b, geo.n);
    }
  return S;
}

}  // namespace

MBlocks m_blocks(const GeometryBundle& geo) {
  const Scalings s = scalings(geo);
  const CMatrix Db = geo.D.scaled.conjugate();
  const CMatrix Cb = geo.C.conjugate();
  const CMatrix& Pp = geo.Psi.plus;
  const CMatrix& Pm = geo.Psi.minus;
  const CMatrix& P0 = geo.Psi.zero;
  const CMatrix DbCb = Db * Cb * s.gm2;
  const CMatrix Db2 = Db * s.g2;

  MBlocks M;
  M.m21 = Db2 * P0 + DbCb * Pm - s.g1 * Pm.transpose() * s.gm1 * DbCb;
  M.m41 = -(s.gm1 * Pp * s.gm1 * DbCb);
  M.m22 = Db2 * Pm.transpose() + DbCb * Pp -
          s.g1 * Pm.transpose() * s.gm1 * Db2;
  M.m42 = -(s.gm1 * Pp * s.gm1 * Db2);
  return M;
}

SBlocks exterior_blocks(const MaterialPair& material, const GeometryBundle& geo) {
  return blocks(geo, material.exterior(), material.mu_ext(), false);
}

SBlocks interior_blocks(const MaterialPair& material, const GeometryBundle& geo) {
  if (material.is_cavity())
    throw Error(ErrorKind::mode, "interior blocks are undefined for a cavity");
  return blocks(geo, material.interior(), material.mu_int(), true);
}

CMatrix BlockSystem::dense() const {
  const Eigen::Index b = n + 1;
  CMatrix D(row_blocks() * b, col_blocks() * b);
  for (int r = 0; r < row_blocks(); ++r)
    for (int c = 0; c < col_blocks(); ++c) D.block(r * b, c * b, b, b) = E[r][c];
  return D;
}

CVector BlockSystem::rhs() const {
  const Eigen::Index b = n + 1;
  CVector r(col_blocks() * b);
  for (std::size_t e = 0; e < equations.size(); ++e) {
    const CVector& hj = h.h[equations[e] - 1];
    r.segment(2 * e * b, b) = -2.0 * hj;
    r.segment((2 * e + 1) * b, b) = -2.0 * hj.conjugate();
  }
  return r;
}

bool BlockSystem::conjugate_pairing_holds(double tol) const {
  for (int r = 0; r < row_blocks(); ++r)
    for (int c = 0; c + 1 < col_blocks(); c += 2)
      if ((E[r ^ 1][c + 1] - E[r][c].conjugate()).cwiseAbs().maxCoeff() > tol)
        return false;
  return true;
}

BlockSystem assemble_E(const MaterialPair& material, const GeometryBundle& geo,
                       const LoadingSpec& loading) {
  loading.validate(geo.n);
  BlockSystem sys;
  sys.n = geo.n;
  sys.mode = material.is_cavity() ? Mode::cavity : Mode::transmission;
  sys.equations = material.is_cavity() ? std::vector<int>{3, 4}
                                       : std::vector<int>{1, 2, 3, 4};
  sys.h = h_vectors(h_matrices(material, geo, loading));
  sys.map = geo.map;

  const SBlocks S = exterior_blocks(material, geo);
  SBlocks St;
  if (!material.is_cavity()) St = interior_blocks(material, geo);

  const int rows = material.is_cavity() ? 4 : 8;
  const int cols = 2 * static_cast<int>(sys.equations.size());
  sys.E.assign(rows, std::vector<CMatrix>(cols));
  for (int e = 0; e < cols / 2; ++e) {
    const int j = sys.equations[e] - 1;
    auto fill = [&](const SBlocks& B, int r0, double sign) {
      // (S1j, conj S2j), (S2j, conj S1j), (S3j, conj S4j), (S4j, conj S3j)
      for (int p = 0; p < 2; ++p) {
        const int a = 2 * p, b = 2 * p + 1;
        sys.E[r0 + a][2 * e] = sign * B[a][j];
        sys.E[r0 + a][2 * e + 1] = sign * B[b][j].conjugate();
        sys.E[r0 + b][2 * e] = sign * B[b][j];
        sys.E[r0 + b][2 * e + 1] = sign * B[a][j].conjugate();
      }
    };
    fill(S, 0, 1.0);
    if (!material.is_cavity()) fill(St, 4, -1.0);
  }
  if (!sys.conjugate_pairing_holds())
    throw Error(ErrorKind::assembly, "conjugate block pairing violated");
  return sys;
}

CMatrix mode_block(const BlockSystem& sys, int m) {
  if (m < 0 || m > sys.n)
    throw Error(ErrorKind::validation, "mode index outside truncation");
  CMatrix B(sys.col_blocks(), sys.row_blocks());
  for (int c = 0; c < sys.col_blocks(); ++c)
    for (int r = 0; r < sys.row_blocks(); ++r) B(c, r) = sys.E[r][c](m, m);
  return B;
}

CVector DensitySolution::full_row() const {
  const Eigen::Index b = xe_plus.size();
  const bool cav = mode == Mode::cavity;
  CVector x(b * (cav ? 4 : 8));
  x.segment(0, b) = xe_plus;
  x.segment(b, b) = xe_plus.conjugate();
  x.segment(2 * b, b) = xe_minus;
  x.segment(3 * b, b) = xe_minus.conjugate();
  if (!cav) {
    x.segment(4 * b, b) = xi_plus;
    x.segment(5 * b, b) = xi_plus.conjugate();
    x.segment(6 * b, b) = xi_minus;
    x.segment(7 * b, b) = xi_minus.conjugate();
  }
  return x;
}

double rotation_projection(const ConformalMap& map, const CVector& xe_plus,
                           const CVector& xe_minus) {
  cplx s = xe_plus.size() > 1 ? map.gamma() * xe_plus(1) : cplx(0.0);
  for (Eigen::Index m = 1; m < xe_minus.size(); ++m)
    s += std::conj(map.coefficient(static_cast<int>(m))) *
         std::pow(map.gamma(), -double(m)) * xe_minus(m);
  return 2.0 * pi * s.imag();
}

DensitySolution solve(const BlockSystem& sys, const SolveOptions& opt) {
  const int b = sys.n + 1;
  const CMatrix Et = sys.dense().transpose();  // equations x unknowns
  const CVector r_all = sys.rhs();

  // Equations kept: the k = 0 column of j = 1, 3 is identically zero and
  // the k = 0 traction column of j = 4 only fixes a free constant.
  std::vector<int> eq_rows;
  for (std::size_t e = 0; e < sys.equations.size(); ++e) {
    const int j = sys.equations[e];
    for (int half = 0; half < 2; ++half)
      for (int k = 0; k < b; ++k) {
        if (k == 0 && (j == 1 || j == 3 || j == 4)) continue;
        eq_rows.push_back((2 * static_cast<int>(e) + half) * b + k);
      }
  }
  // Independent unknowns: blocks 0, 2 (4, 6) with leading zeros removed,
  // except x^i_0 in block 6.
  struct Unknown {
    int block, k;
  };
  std::vector<Unknown> unk;
  const std::vector<int> indep = sys.mode == Mode::cavity
                                     ? std::vector<int>{0, 2}
                                     : std::vector<int>{0, 2, 4, 6};
  for (int blk : indep)
    for (int k = 0; k < b; ++k)
      if (k != 0 || blk == 6) unk.push_back({blk, k});

  const Eigen::Index ne = static_cast<Eigen::Index>(eq_rows.size());
  const Eigen::Index nu = static_cast<Eigen::Index>(unk.size());
  Eigen::MatrixXd A(2 * ne, 2 * nu);
  Eigen::VectorXd rhs(2 * ne);
  for (Eigen::Index i = 0; i < ne; ++i) {
    rhs(i) = r_all(eq_rows[i]).real();
    rhs(ne + i) = r_all(eq_rows[i]).imag();
  }
  // x = xr + i xi; the conjugate block carries xr - i xi.
  for (Eigen::Index c = 0; c < nu; ++c) {
    const int col_u = unk[c].block * b + unk[c].k;
    const int col_c = (unk[c].block + 1) * b + unk[c].k;
    for (Eigen::Index i = 0; i < ne; ++i) {
      const cplx eu = Et(eq_rows[i], col_u), ec = Et(eq_rows[i], col_c);
      const cplx cr = eu + ec, ci = cplx(0.0, 1.0) * (eu - ec);
      A(i, c) = cr.real();
      A(ne + i, c) = cr.imag();
      A(i, nu + c) = ci.real();
      A(ne + i, nu + c) = ci.imag();
    }
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double eps = std::numeric_limits<double>::epsilon();
  const double rtol = opt.rank_rtol > 0.0
                          ? opt.rank_rtol
                          : double(std::max(A.rows(), A.cols())) * eps;
  svd.setThreshold(rtol);
  const Eigen::VectorXd sol = svd.solve(rhs);
  const Eigen::VectorXd& sv = svd.singularValues();

  DensitySolution out;
  out.mode = sys.mode;
  out.xe_plus = CVector::Zero(b);
  out.xe_minus = CVector::Zero(b);
  out.xi_plus = CVector::Zero(b);
  out.xi_minus = CVector::Zero(b);
  CVector* targets[8] = {&out.xe_plus, nullptr, &out.xe_minus, nullptr,
                         &out.xi_plus, nullptr, &out.xi_minus, nullptr};
  for (Eigen::Index c = 0; c < nu; ++c)
    (*targets[unk[c].block])(unk[c].k) = cplx(sol(c), sol(nu + c));

  out.unknowns = static_cast<int>(2 * nu);
  out.rank = static_cast<int>(svd.rank());
  out.sigma_max = sv.size() ? sv(0) : 0.0;
  out.sigma_min = sv.size() ? sv(sv.size() - 1) : 0.0;
  if (out.rank > 0 && out.rank < sv.size())
    out.singular_gap = sv(out.rank - 1) / std::max(sv(out.rank), 1e-300);
  out.residual = (A * sol - rhs).norm();
  const double hn = sys.h.norm();
  out.relative_residual = hn > 0.0 ? out.residual / hn : out.residual;
  out.converged = out.relative_residual <= opt.residual_tol;
  if (sys.map)
    out.rotation_projection =
        rotation_projection(*sys.map, out.xe_plus, out.xe_minus);
  return out;
}

}  // namespace incl
