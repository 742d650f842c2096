#include "incl/oracle.hpp"

#include <cmath>
#include <sstream>

namespace incl::oracle {

namespace {

// Kress weights R_j for the log(4 sin^2((t - tau)/2)) kernel, by node offset.
std::vector<double> kress_weights(int q) {
  const int nh = q / 2;
  std::vector<double> R(q);
  for (int off = 0; off < q; ++off) {
    const double t = 2.0 * pi * off / q;
    double s = 0.0;
    for (int m = 1; m < nh; ++m) s += std::cos(m * t) / m;
    R[off] = -(2.0 * pi / nh) * s - (pi / (double(nh) * nh)) * std::cos(nh * t);
  }
  return R;
}

// Displacement gradient of H from its holomorphic pair, then sigma N.
cplx traction(const BackgroundField::Pair& p, cplx z, double kappa,
              double lambda, double mu, cplx N) {
  const cplx Hz = kappa * p.df - std::conj(p.df);
  const cplx Hzb = -z * std::conj(p.ddf) - std::conj(p.dg);
  const cplx ux = Hz + Hzb, uy = cplx(0, 1) * (Hz - Hzb);
  const double u11 = ux.real(), u21 = ux.imag(), u12 = uy.real(), u22 = uy.imag();
  const double div = u11 + u22;
  const double s11 = lambda * div + 2 * mu * u11, s22 = lambda * div + 2 * mu * u22;
  const double s12 = mu * (u12 + u21);
  return {s11 * N.real() + s12 * N.imag(), s12 * N.real() + s22 * N.imag()};
}

void single_layer_row(const BoundaryMesh& M, const KelvinConstants& k,
                      const std::vector<double>& R, int i, Eigen::MatrixXd& S) {
  const int q = M.q;
  const double w = M.weight();
  const double ca = k.alpha / (2 * pi), cb = k.beta / (2 * pi);
  for (int j = 0; j < q; ++j) {
    const cplx r = M.z[i] - M.z[j];
    double smooth, r11, r22, r12;
    if (j == i) {
      smooth = std::log(M.h[i]);
      const cplx t = M.tangent[i];
      r11 = t.real() * t.real();
      r22 = t.imag() * t.imag();
      r12 = t.real() * t.imag();
    } else {
      const double rho2 = std::norm(r);
      const double s = std::sin(0.5 * (M.theta[i] - M.theta[j]));
      smooth = 0.5 * std::log(rho2 / (4.0 * s * s));
      r11 = r.real() * r.real() / rho2;
      r22 = r.imag() * r.imag() / rho2;
      r12 = r.real() * r.imag() / rho2;
    }
    const int off = ((j - i) % q + q) % q;
    const double lg = ca * (0.5 * R[off] + w * smooth) * M.h[j];
    const double tw = cb * w * M.h[j];
    S(2 * i, 2 * j) = lg - tw * r11;
    S(2 * i, 2 * j + 1) = -tw * r12;
    S(2 * i + 1, 2 * j) = -tw * r12;
    S(2 * i + 1, 2 * j + 1) = lg - tw * r22;
  }
}

void conormal_row(const BoundaryMesh& M, double m, int i, Eigen::MatrixXd& K) {
  const int q = M.q;
  const double w = M.weight();
  const cplx N = M.normal[i];
  for (int j = 0; j < q; ++j) {
    const cplx r = M.z[i] - M.z[j];
    double rN, r11, r22, r12;
    if (j == i) {
      const cplx dd = M.ddz[i];
      rN = -0.5 * (dd.real() * N.real() + dd.imag() * N.imag()) / (M.h[i] * M.h[i]);
      const cplx t = M.tangent[i];
      r11 = t.real() * t.real();
      r22 = t.imag() * t.imag();
      r12 = t.real() * t.imag();
    } else {
      const double rho2 = std::norm(r);
      rN = (r.real() * N.real() + r.imag() * N.imag()) / rho2;
      r11 = r.real() * r.real() / rho2;
      r22 = r.imag() * r.imag() / rho2;
      r12 = r.real() * r.imag() / rho2;
    }
    const double c = w * M.h[j] / (2 * pi);
    double k12 = rN * 2 * (1 - m) * r12 * c, k21 = k12;
    // Cauchy part on the odd-offset sub-grid, which skips the singular node.
    if (((j - i) % 2 + 2) % 2 == 1) {
      const double cr = (N.imag() * r.real() - N.real() * r.imag()) / std::norm(r);
      const double cw = 2.0 * c * m * cr;
      k12 += cw;
      k21 -= cw;
    }
    K(2 * i, 2 * j) = rN * (m + 2 * (1 - m) * r11) * c;
    K(2 * i, 2 * j + 1) = k12;
    K(2 * i + 1, 2 * j) = k21;
    K(2 * i + 1, 2 * j + 1) = rN * (m + 2 * (1 - m) * r22) * c;
  }
}

std::vector<cplx> offset_points(const ConformalMap& map, int count, double radius) {
  std::vector<cplx> w(count);
  for (int j = 0; j < count; ++j)
    w[j] = std::polar(radius * map.gamma(), 2.0 * pi * j / count);
  return w;
}

}  // namespace

BoundaryMesh make_mesh(const ConformalMap& map, int q) {
  if (q < 8 || q % 2 != 0) {
    std::ostringstream os;
    os << "Nystrom node count must be even and >= 8, got " << q;
    throw Error(ErrorKind::validation, os.str());
  }
  BoundaryMesh M;
  M.q = q;
  M.theta.resize(q);
  M.z.resize(q);
  M.dz.resize(q);
  M.ddz.resize(q);
  M.h.resize(q);
  M.tangent.resize(q);
  M.normal.resize(q);
  double area = 0.0, flux = 0.0;
  for (int j = 0; j < q; ++j) {
    const double th = 2.0 * pi * j / q;
    const cplx w = std::polar(map.gamma(), th);
    const cplx d1 = map.derivative(w), d2 = map.second_derivative(w);
    M.theta[j] = th;
    M.z[j] = map.eval(w);
    M.dz[j] = cplx(0, 1) * w * d1;
    M.ddz[j] = -(w * d1 + w * w * d2);
    M.h[j] = std::abs(M.dz[j]);
    M.tangent[j] = M.dz[j] / M.h[j];
    M.normal[j] = -cplx(0, 1) * M.tangent[j];
  }
  // Green: area = (1/2) oint x dy - y dx, flux of z through the normals = 2 area.
  for (int j = 0; j < q; ++j) {
    area += 0.5 * (std::conj(M.z[j]) * M.dz[j]).imag() * M.weight();
    flux += (std::conj(M.normal[j]) * M.z[j]).real() * M.h[j] * M.weight();
  }
  if (!(area > 0.0) || std::abs(flux - 2.0 * area) > 1e-6 * std::abs(area))
    throw Error(ErrorKind::validation, "boundary normals are not outward");
  return M;
}

Eigen::Matrix2d kelvin_kernel(cplx x, cplx y, const KelvinConstants& k) {
  const cplx r = x - y;
  const double rho2 = std::norm(r);
  if (rho2 == 0.0) throw Error(ErrorKind::singular, "coincident kernel points");
  const double lg = k.alpha / (2 * pi) * 0.5 * std::log(rho2);
  const double cb = k.beta / (2 * pi);
  Eigen::Matrix2d G;
  G(0, 0) = lg - cb * r.real() * r.real() / rho2;
  G(1, 1) = lg - cb * r.imag() * r.imag() / rho2;
  G(0, 1) = G(1, 0) = -cb * r.real() * r.imag() / rho2;
  return G;
}

Eigen::MatrixXd single_layer_matrix(const BoundaryMesh& mesh,
                                    const KelvinConstants& k, Exec exec) {
  const int q = mesh.q;
  const std::vector<double> R = kress_weights(q);
  Eigen::MatrixXd S(2 * q, 2 * q);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < q; ++i) single_layer_row(mesh, k, R, i, S);
  } else {
    for (int i = 0; i < q; ++i) single_layer_row(mesh, k, R, i, S);
  }
  return S;
}

Eigen::MatrixXd conormal_matrix(const BoundaryMesh& mesh, double lambda,
                                double mu, Exec exec) {
  const int q = mesh.q;
  const double m = mu / (2 * mu + lambda);
  Eigen::MatrixXd K(2 * q, 2 * q);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < q; ++i) conormal_row(mesh, m, i, K);
  } else {
    for (int i = 0; i < q; ++i) conormal_row(mesh, m, i, K);
  }
  return K;
}

NystromSystem assemble_nystrom(const BoundaryMesh& mesh,
                               const MaterialPair& material,
                               const BackgroundField& background, Exec exec) {
  const int q = mesh.q, n2 = 2 * q;
  const double lam = material.lambda_ext(), mu = material.mu_ext();
  const auto& ke = material.exterior();

  Eigen::VectorXd Hn(n2), Tn(n2);
  for (int j = 0; j < q; ++j) {
    const auto p = background.pair(mesh.z[j]);
    const cplx H = ke.kappa * p.f - mesh.z[j] * std::conj(p.df) - std::conj(p.g);
    const cplx t = traction(p, mesh.z[j], ke.kappa, lam, mu, mesh.normal[j]);
    Hn(2 * j) = H.real();
    Hn(2 * j + 1) = H.imag();
    Tn(2 * j) = t.real();
    Tn(2 * j + 1) = t.imag();
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n2, n2);
  const Eigen::MatrixXd Ke = conormal_matrix(mesh, lam, mu, exec);

  NystromSystem sys;
  sys.cavity = material.is_cavity();
  if (sys.cavity) {
    // (1/2 I + K*) psi = -dH/dnu plus orthogonality to the rigid motions.
    sys.A.resize(n2 + 3, n2);
    sys.A.topRows(n2) = 0.5 * I + Ke;
    sys.A.bottomRows(3).setZero();
    for (int j = 0; j < q; ++j) {
      const double w = mesh.h[j] * mesh.weight();
      sys.A(n2, 2 * j) = w;
      sys.A(n2 + 1, 2 * j + 1) = w;
      sys.A(n2 + 2, 2 * j) = -mesh.z[j].imag() * w;
      sys.A(n2 + 2, 2 * j + 1) = mesh.z[j].real() * w;
    }
    sys.rhs = Eigen::VectorXd::Zero(n2 + 3);
    sys.rhs.head(n2) = -Tn;
    return sys;
  }
  const auto& ki = material.interior();
  const Eigen::MatrixXd Se = single_layer_matrix(mesh, ke, exec);
  const Eigen::MatrixXd Si = single_layer_matrix(mesh, ki, exec);
  const Eigen::MatrixXd Ki =
      conormal_matrix(mesh, material.lambda_int(), material.mu_int(), exec);
  sys.A.resize(2 * n2, 2 * n2);
  sys.A << Si, -Se, -0.5 * I + Ki, -(0.5 * I + Ke);
  sys.rhs.resize(2 * n2);
  sys.rhs << Hn, Tn;
  return sys;
}

cplx OracleSolution::exterior_displacement(cplx x,
                                           const BackgroundField& background) const {
  cplx u = background(x);
  for (int j = 0; j < mesh.q; ++j) {
    const Eigen::Matrix2d G = kelvin_kernel(x, mesh.z[j], ext);
    const double w = mesh.h[j] * mesh.weight();
    u += w * cplx(G(0, 0) * psi(2 * j) + G(0, 1) * psi(2 * j + 1),
                  G(1, 0) * psi(2 * j) + G(1, 1) * psi(2 * j + 1));
  }
  return u;
}

cplx OracleSolution::interior_displacement(cplx x) const {
  if (cavity) throw Error(ErrorKind::mode, "no interior field for a cavity");
  cplx u = 0.0;
  for (int j = 0; j < mesh.q; ++j) {
    const Eigen::Matrix2d G = kelvin_kernel(x, mesh.z[j], in);
    const double w = mesh.h[j] * mesh.weight();
    u += w * cplx(G(0, 0) * phi(2 * j) + G(0, 1) * phi(2 * j + 1),
                  G(1, 0) * phi(2 * j) + G(1, 1) * phi(2 * j + 1));
  }
  return u;
}

OracleSolution solve_oracle(const ConformalMap& map, const MaterialPair& material,
                            const BackgroundField& background, int q, Exec exec) {
  OracleSolution sol;
  sol.mesh = make_mesh(map, q);
  sol.cavity = material.is_cavity();
  sol.ext = material.exterior();
  if (!sol.cavity) sol.in = material.interior();
  const NystromSystem sys = assemble_nystrom(sol.mesh, material, background, exec);
  const int n2 = 2 * q;
  if (sol.cavity) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sys.A);
    sol.psi = qr.solve(sys.rhs);
    const auto R = qr.matrixR().diagonal().cwiseAbs();
    sol.condition = R.maxCoeff() / std::max(R.minCoeff(), 1e-300);
  } else {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.A);
    const Eigen::VectorXd x = lu.solve(sys.rhs);
    sol.phi = x.head(n2);
    sol.psi = x.tail(n2);
    sol.condition = 1.0 / std::max(lu.rcond(), 1e-300);
  }
  if (!sol.psi.allFinite())
    throw Error(ErrorKind::oracle, "Nystrom solve produced non-finite densities");

  const Eigen::MatrixXd Se = single_layer_matrix(sol.mesh, sol.ext, exec);
  const Eigen::VectorXd Spsi = Se * sol.psi;
  sol.u_boundary.resize(q);
  for (int j = 0; j < q; ++j) {
    sol.u_boundary[j] = background(sol.mesh.z[j]) + cplx(Spsi(2 * j), Spsi(2 * j + 1));
    const double w = sol.mesh.h[j] * sol.mesh.weight();
    const double p1 = sol.psi(2 * j), p2 = sol.psi(2 * j + 1);
    sol.rigid_moments(0) += w * p1;
    sol.rigid_moments(1) += w * p2;
    sol.rigid_moments(2) += w * (-sol.mesh.z[j].imag() * p1 + sol.mesh.z[j].real() * p2);
  }
  return sol;
}

ComparisonReport compare(const OracleSolution& oracle, const FieldEvaluator& series,
                         const BackgroundField& background, const ConformalMap& map,
                         int offset_points_count, double offset_radius) {
  ComparisonReport r;
  r.q = oracle.mesh.q;
  r.offset_radius = offset_radius;
  r.offset_points = offset_points_count;
  r.oracle_condition = oracle.condition;
  double s2 = 0.0;
  for (int j = 0; j < oracle.mesh.q; ++j) {
    const double e =
        std::abs(series.exterior_trace(oracle.mesh.theta[j]).u - oracle.u_boundary[j]);
    r.boundary_max = std::max(r.boundary_max, e);
    s2 += e * e;
  }
  r.boundary_l2 = std::sqrt(s2 / oracle.mesh.q);
  s2 = 0.0;
  for (const cplx& w : offset_points(map, offset_points_count, offset_radius)) {
    const double e = std::abs(series.eval_exterior(w).u -
                              oracle.exterior_displacement(map.eval(w), background));
    r.offset_max = std::max(r.offset_max, e);
    s2 += e * e;
  }
  r.offset_l2 = offset_points_count ? std::sqrt(s2 / offset_points_count) : 0.0;
  return r;
}

SelfConvergence self_convergence(const ConformalMap& map, const MaterialPair& material,
                                 const BackgroundField& background, int q,
                                 int offset_points_count, double offset_radius) {
  const auto pts = offset_points(map, offset_points_count, offset_radius);
  auto field = [&](int qq) {
    const OracleSolution s = solve_oracle(map, material, background, qq);
    std::vector<cplx> u;
    for (const cplx& w : pts) u.push_back(s.exterior_displacement(map.eval(w), background));
    return u;
  };
  const auto u1 = field(q), u2 = field(2 * q), u4 = field(4 * q);
  SelfConvergence c;
  c.q = q;
  double scale = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    c.coarse_error = std::max(c.coarse_error, std::abs(u1[i] - u4[i]));
    c.fine_error = std::max(c.fine_error, std::abs(u2[i] - u4[i]));
    scale = std::max(scale, std::abs(u4[i]));
  }
  c.improvement = c.coarse_error / std::max(c.fine_error, 1e-300);
  c.adequate = c.improvement >= 10.0 || c.coarse_error <= 1e-11 * std::max(scale, 1.0);
  return c;
}

}  // namespace incl::oracle
