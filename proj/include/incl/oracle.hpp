#pragma once

#include <vector>

#include "incl/common.hpp"
#include "incl/field.hpp"
#include "incl/geometry.hpp"
#include "incl/loading.hpp"
#include "incl/material.hpp"

namespace incl::oracle {

/// Equispaced Nystrom nodes on the boundary curve.
struct BoundaryMesh {
  int q = 0;
  std::vector<double> theta;
  std::vector<cplx> z;       // Psi(gamma e^{i theta})
  std::vector<cplx> dz;      // dz/dtheta
  std::vector<cplx> ddz;     // d^2z/dtheta^2
  std::vector<double> h;     // |dz/dtheta|
  std::vector<cplx> tangent;
  std::vector<cplx> normal;  // outward unit normal

  double weight() const { return 2.0 * pi / q; }
};

// q must be even and >= 8. Throws ErrorKind::validation otherwise or when
// the normals fail the orientation check.
BoundaryMesh make_mesh(const ConformalMap& map, int q);

// Kelvin matrix Gamma(x - y). Throws ErrorKind::singular for x == y.
Eigen::Matrix2d kelvin_kernel(cplx x, cplx y, const KelvinConstants& k);

// Nodal operators. Unknowns and equations are interleaved as
// (v1(z_0), v2(z_0), v1(z_1), ...); densities are per unit arc length.
Eigen::MatrixXd single_layer_matrix(const BoundaryMesh& mesh,
                                    const KelvinConstants& k,
                                    Exec exec = Exec::parallel);
// Principal-value conormal operator K* (no jump term).
Eigen::MatrixXd conormal_matrix(const BoundaryMesh& mesh, double lambda,
                                double mu, Exec exec = Exec::parallel);

struct NystromSystem {
  bool cavity = false;
  Eigen::MatrixXd A;  // 4q x 4q, or (2q + 3) x 2q for a cavity
  Eigen::VectorXd rhs;
};

NystromSystem assemble_nystrom(const BoundaryMesh& mesh,
                               const MaterialPair& material,
                               const BackgroundField& background,
                               Exec exec = Exec::parallel);

struct OracleSolution {
  BoundaryMesh mesh;
  KelvinConstants ext, in;
  bool cavity = false;
  Eigen::VectorXd psi, phi;          // phi is empty for a cavity
  std::vector<cplx> u_boundary;      // exterior trace at the nodes
  double condition = 0.0;            // estimate of the system's condition
  Eigen::Vector3d rigid_moments{0, 0, 0};  // int psi . theta d sigma

  cplx exterior_displacement(cplx x, const BackgroundField& background) const;
  cplx interior_displacement(cplx x) const;
};

OracleSolution solve_oracle(const ConformalMap& map, const MaterialPair& material,
                            const BackgroundField& background, int q,
                            Exec exec = Exec::parallel);

struct ComparisonReport {
  int q = 0;
  double boundary_max = 0.0, boundary_l2 = 0.0;
  double offset_max = 0.0, offset_l2 = 0.0;
  double offset_radius = 1.5;  // in units of gamma
  int offset_points = 0;
  double oracle_condition = 0.0;
};

ComparisonReport compare(const OracleSolution& oracle,
                         const FieldEvaluator& series,
                         const BackgroundField& background,
                         const ConformalMap& map, int offset_points = 64,
                         double offset_radius = 1.5);

struct SelfConvergence {
  int q = 0;
  double coarse_error = 0.0;  // |u_q - u_4q| on the offset circle
  double fine_error = 0.0;    // |u_2q - u_4q|
  double improvement = 0.0;   // coarse / fine
  bool adequate = false;      // improvement >= 10 or already at roundoff
};

SelfConvergence self_convergence(const ConformalMap& map,
                                 const MaterialPair& material,
                                 const BackgroundField& background, int q,
                                 int offset_points = 64,
                                 double offset_radius = 1.5);

}  // namespace incl::oracle
