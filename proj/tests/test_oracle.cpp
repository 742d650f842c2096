#include <cmath>

#include <doctest.h>

#include "incl/oracle.hpp"
#include "incl/system.hpp"

using namespace incl;
using namespace incl::oracle;

namespace {

const ConformalMap kEllipse(1.0, {0.5, 0.3});
const ConformalMap kDisk(1.0, {0.5});
const MaterialPair kTrans = MaterialPair::transmission(1.0, 1.0, 2.0, 3.0);
const MaterialPair kCavity = MaterialPair::cavity(1.0, 1.0);

LoadingSpec b1_loading() {
  LoadingSpec L;
  L.B = {cplx(1.0, -0.3)};
  return L;
}

Eigen::Matrix2d rotation(double t) {
  Eigen::Matrix2d R;
  R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return R;
}

// Rigid fields sampled at the nodes, interleaved, times the arc-length weights.
Eigen::MatrixXd weighted_rigid(const BoundaryMesh& M) {
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(2 * M.q, 3);
  for (int j = 0; j < M.q; ++j) {
    const double w = M.h[j] * M.weight();
    R(2 * j, 0) = w;
    R(2 * j + 1, 1) = w;
    R(2 * j, 2) = -M.z[j].imag() * w;
    R(2 * j + 1, 2) = M.z[j].real() * w;
  }
  return R;
}

}  // namespace

TEST_CASE("Kelvin kernel at unit distance") {
  const KelvinConstants k = derive_constants(1.0, 1.0);
  const Eigen::Matrix2d G = kelvin_kernel(1.0, 0.0, k);
  CHECK(G(0, 0) == doctest::Approx(-k.beta / (2 * M_PI)));
  CHECK(std::abs(G(1, 1)) < 1e-16);
  CHECK(std::abs(G(0, 1)) < 1e-16);
  const Eigen::Matrix2d G2 = kelvin_kernel(cplx(0, 2), 0.0, k);
  CHECK(G2(0, 0) == doctest::Approx(k.alpha / (2 * M_PI) * std::log(2.0)));
  CHECK(G2(1, 1) == doctest::Approx((k.alpha * std::log(2.0) - k.beta) / (2 * M_PI)));
}

TEST_CASE("Kelvin kernel symmetry and isotropy") {
  const KelvinConstants k = derive_constants(0.7, 1.9);
  const cplx x(0.3, -1.1), y(-0.4, 0.2);
  const Eigen::Matrix2d G = kelvin_kernel(x, y, k);
  CHECK(G(0, 1) == G(1, 0));
  CHECK((kelvin_kernel(y, x, k) - G).norm() < 1e-15);
  for (double t : {0.3, 1.7, -2.2}) {
    const Eigen::Matrix2d R = rotation(t);
    const cplx rx = std::polar(1.0, t) * (x - y);
    const Eigen::Matrix2d lhs = kelvin_kernel(rx, 0.0, k);
    CHECK((lhs - R * G * R.transpose()).norm() < 1e-14);
  }
}

TEST_CASE("coincident kernel points are rejected") {
  try {
    kelvin_kernel(cplx(1, 1), cplx(1, 1), derive_constants(1.0, 1.0));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::singular);
  }
}

TEST_CASE("mesh") {
  CHECK_THROWS_AS(make_mesh(kDisk, 7), Error);
  CHECK_THROWS_AS(make_mesh(kDisk, 6), Error);
  const BoundaryMesh M = make_mesh(kDisk, 32);
  CHECK(M.q == 32);
  for (int j = 0; j < M.q; ++j) {
    CHECK(std::abs(std::abs(M.normal[j]) - 1.0) < 1e-14);
    CHECK(std::abs(M.normal[j] - (M.z[j] - 0.5)) < 1e-14);  // unit circle about 0.5
    CHECK(M.h[j] == doctest::Approx(1.0));
    if (j) CHECK(std::abs(M.z[j] - M.z[j - 1]) > 0.0);
  }
}

TEST_CASE("single layer matrix reproduces the series single layer") {
  // For psi = x phi_k the series evaluator gives S[psi] on the boundary in closed
  // form; the Nystrom operator applied to the nodal values must agree.
  const int q = 256, n = 4;
  for (const ConformalMap* m : {&kDisk, &kEllipse}) {
    const GeometryBundle geo(*m, n);
    const BoundaryMesh M = make_mesh(*m, q);
    const Eigen::MatrixXd S = single_layer_matrix(M, kTrans.exterior());
    for (int k : {-3, -1, 1, 2, 4}) {
      DensitySolution s;
      s.mode = Mode::transmission;
      s.xe_plus = s.xe_minus = s.xi_plus = s.xi_minus = CVector::Zero(n + 1);
      const cplx x(0.6, -0.8);
      (k > 0 ? s.xe_plus : s.xe_minus)(std::abs(k)) = x;
      const FieldEvaluator fe(geo, kTrans, LoadingSpec{}, s);
      Eigen::VectorXd psi(2 * q);
      for (int j = 0; j < q; ++j) {
        const cplx v = x * std::polar(1.0, k * M.theta[j]) / M.h[j];
        psi(2 * j) = v.real();
        psi(2 * j + 1) = v.imag();
      }
      const Eigen::VectorXd u = S * psi;
      double err = 0.0;
      for (int j = 0; j < q; ++j)
        err = std::max(err, std::abs(cplx(u(2 * j), u(2 * j + 1)) - fe.exterior_trace(M.theta[j]).u));
      CHECK(err < 1e-12);
    }
  }
}

TEST_CASE("rigid motions are orthogonal to interior tractions") {
  // For every density the interior traction (-1/2 I + K*) psi carries no net
  // force or moment: the weighted rigid fields span a left null space.
  for (const ConformalMap* m : {&kDisk, &kEllipse}) {
    const BoundaryMesh M = make_mesh(*m, 128);
    const Eigen::MatrixXd K = conormal_matrix(M, 1.0, 1.0);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2 * M.q, 2 * M.q);
    const Eigen::MatrixXd W = weighted_rigid(M);
    const Eigen::MatrixXd r = W.transpose() * (-0.5 * I + K);
    CHECK(r.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("serial and parallel assembly agree bitwise") {
  const BoundaryMesh M = make_mesh(kEllipse, 64);
  const auto k = kTrans.exterior();
  CHECK((single_layer_matrix(M, k, Exec::serial) - single_layer_matrix(M, k, Exec::parallel))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((conormal_matrix(M, 1.0, 2.0, Exec::serial) - conormal_matrix(M, 1.0, 2.0, Exec::parallel))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("zero loading gives zero densities") {
  const GeometryBundle geo(kEllipse, 4);
  const BackgroundField bg(geo, kTrans, LoadingSpec{});
  const OracleSolution s = solve_oracle(kEllipse, kTrans, bg, 64);
  CHECK(s.psi.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.phi.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("system shapes") {
  const GeometryBundle geo(kEllipse, 4);
  const BoundaryMesh M = make_mesh(kEllipse, 32);
  const NystromSystem t = assemble_nystrom(M, kTrans, BackgroundField(geo, kTrans, b1_loading()));
  CHECK(t.A.rows() == 128);
  CHECK(t.A.cols() == 128);
  const NystromSystem c = assemble_nystrom(M, kCavity, BackgroundField(geo, kCavity, b1_loading()));
  CHECK(c.cavity);
  CHECK(c.A.rows() == 67);
  CHECK(c.A.cols() == 64);
}

TEST_CASE("oracle against the series solution") {
  struct Run {
    const ConformalMap* map;
    MaterialPair mat;
    int q;
    double tol;
  };
  for (const Run& r : {Run{&kDisk, kTrans, 128, 1e-4}, Run{&kDisk, kCavity, 128, 1e-4},
                       Run{&kEllipse, kTrans, 256, 1e-3}, Run{&kEllipse, kCavity, 256, 1e-3}}) {
    const GeometryBundle geo(*r.map, 16);
    const LoadingSpec L = b1_loading();
    const BackgroundField bg(geo, r.mat, L);
    const FieldEvaluator fe(geo, r.mat, L, solve(assemble_E(r.mat, geo, L)));
    const OracleSolution os = solve_oracle(*r.map, r.mat, bg, r.q);
    const ComparisonReport c = compare(os, fe, bg, *r.map);
    CHECK(c.boundary_max <= r.tol);
    CHECK(c.offset_max <= r.tol);
    CHECK(c.boundary_l2 <= c.boundary_max);
    CHECK(c.offset_points == 64);
    CHECK(c.oracle_condition > 1.0);
    CHECK(os.rigid_moments.cwiseAbs().maxCoeff() < 1e-10);
    if (!r.mat.is_cavity()) {
      // interior oracle field matches the series interior field
      for (cplx z : {cplx(0.4, 0.1), cplx(0.9, -0.2)})
        CHECK(std::abs(os.interior_displacement(z) - fe.eval_interior_at(z).u) < r.tol);
    } else {
      CHECK_THROWS_AS(os.interior_displacement(0.5), Error);
    }
  }
}

TEST_CASE("oracle exterior field decays like 1/|x|") {
  const GeometryBundle geo(kEllipse, 4);
  const LoadingSpec L = b1_loading();
  const BackgroundField bg(geo, kCavity, L);
  const OracleSolution os = solve_oracle(kEllipse, kCavity, bg, 128);
  double d[2];
  int i = 0;
  for (double R : {20.0, 40.0}) {
    d[i] = 0.0;
    for (int j = 0; j < 16; ++j) {
      const cplx x = std::polar(R, 2 * M_PI * j / 16);
      d[i] = std::max(d[i], std::abs(os.exterior_displacement(x, bg) - bg(x)));
    }
    ++i;
  }
  CHECK(d[0] / d[1] == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("self-convergence") {
  const GeometryBundle geo(kEllipse, 4);
  const LoadingSpec L = b1_loading();
  for (const MaterialPair& mat : {kTrans, kCavity}) {
    const BackgroundField bg(geo, mat, L);
    const SelfConvergence coarse = self_convergence(kEllipse, mat, bg, 16);
    CHECK(coarse.improvement >= 10.0);
    CHECK(coarse.adequate);
    const SelfConvergence fine = self_convergence(kEllipse, mat, bg, 64);
    CHECK(fine.adequate);
    CHECK(fine.coarse_error < 1e-10);
  }
}
