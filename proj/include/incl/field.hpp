#pragma once

#include <string>
#include <vector>

#include "incl/common.hpp"
#include "incl/geometry.hpp"
#include "incl/loading.hpp"
#include "incl/material.hpp"
#include "incl/system.hpp"

namespace incl {

enum class Region { exterior, interior, boundary, cavity };
const char* to_string(Region r);

/// Contributions to the displacement. For interior samples `background` is
/// zero and `constant` holds the mean-density shift.
struct FieldParts {
  cplx background = 0.0;  // H(z)
  cplx kappa_f = 0.0;     // kappa f / 2
  cplx z_conj_df = 0.0;   // -z conj(f') / 2
  cplx conj_g = 0.0;      // -conj(g) / 2
  cplx constant = 0.0;    // -c_phi / 2
};

struct FieldSample {
  cplx w{std::nan(""), std::nan("")};
  cplx z = 0.0;
  cplx u = 0.0;
  Region region = Region::exterior;
  FieldParts parts;
  cplx traction_potential = 0.0;  // defined up to an additive constant
};

/// f, f', g of a single-layer potential: 2 S = kappa f - z conj f' - conj g.
struct HolomorphicPair {
  cplx f = 0.0, df = 0.0, g = 0.0;
};

struct GridSpec {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  int nx = 0, ny = 0;
  std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }
  cplx point(int ix, int iy) const;
};

struct FieldOptions {
  double far_radius = 1.1;  // Grunsky form for |w| >= far_radius * gamma
  double band = 1e-2;       // boundary band half-width, in units of gamma
  double epsilon = 1e-5;    // boundary approach offset, in units of gamma
  int boundary_samples = 2048;
};

struct ResidualReport {
  double displacement = 0.0;  // max |u_e - u_i| on the boundary
  double traction = 0.0;      // max variation of I^e - I^i along the boundary
};

/// Evaluates the displacement represented by a solved density pair.
class FieldEvaluator {
 public:
  FieldEvaluator(const GeometryBundle& geo, const MaterialPair& material,
                 const LoadingSpec& loading, const DensitySolution& solution,
                 const FieldOptions& opt = {});

  // |w| > gamma; throws ErrorKind::domain otherwise.
  FieldSample eval_exterior(cplx w) const;
  // Limit from outside at w = gamma e^{i theta}.
  FieldSample exterior_trace(double theta) const;
  // gamma - delta < |w| < gamma; throws ErrorKind::mode for a cavity.
  FieldSample eval_interior(cplx w) const;
  // Any z inside the inclusion.
  FieldSample eval_interior_at(cplx z) const;

  HolomorphicPair exterior_pair(cplx w) const;
  HolomorphicPair interior_pair(cplx z) const;

  // Throws ErrorKind::mode for a cavity.
  ResidualReport transmission_residual(const std::vector<double>& angles) const;

  Region classify(cplx z) const;
  std::vector<FieldSample> grid_field(const GridSpec& grid,
                                      Exec exec = Exec::parallel) const;

  const FieldOptions& options() const { return opt_; }

 private:
  FieldSample exterior_at(cplx w) const;
  // C[phi_k] for k in [-kmax, n+K+1] at an exterior point.
  void exterior_ops(cplx w, cplx z, CVector& Lp, CVector& Cp) const;

  ConformalMap map_;
  MaterialPair material_;
  BackgroundField background_;
  DensitySolution sol_;
  FieldOptions opt_;
  int n_, top_;
  CMatrix P_, dP_;   // monomial coefficients of F_m and F_m', m <= top_
  CMatrix C_far_;    // c_mk for m <= top_, k <= far columns
  std::vector<cplx> polygon_;
};

}  // namespace incl
