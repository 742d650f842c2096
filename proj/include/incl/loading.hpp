#pragma once

#include <array>
#include <vector>

#include "incl/common.hpp"
#include "incl/geometry.hpp"
#include "incl/material.hpp"

namespace incl {

/// Background field H = sum_m kappa A_m F_m - z conj(A_m F_m') + conj(B_m F_m).
/// A[0] is A_1; constant modes are not represented.
struct LoadingSpec {
  std::vector<cplx> A;
  std::vector<cplx> B;

  int order() const;  // highest m with a nonzero A_m or B_m
  cplx a(int m) const;
  cplx b(int m) const;
  // Throws ErrorKind::validation for non-finite data or order() > n.
  void validate(int n) const;
};

struct HMatrices {
  std::array<CMatrix, 4> H;  // (n+1) x (n+1)
};

struct RhsVector {
  std::array<CVector, 4> h;  // h^(1..4), each of length n+1

  int n() const { return static_cast<int>(h[0].size()) - 1; }
  // [h1, conj h1, h2, conj h2, h3, conj h3, h4, conj h4]
  CVector blocks() const;
  double norm() const;
};

HMatrices h_matrices(const MaterialPair& material, const GeometryBundle& geo,
                     const LoadingSpec& loading);
RhsVector h_vectors(const HMatrices& H);

struct BackgroundValue {
  cplx u;                 // H(z)
  cplx traction_potential;  // mu (f + z conj f' + conj g) for the pair of H
};

/// Polynomial background field evaluated from the Faber matrices.
class BackgroundField {
 public:
  BackgroundField(const GeometryBundle& geo, const MaterialPair& material,
                  const LoadingSpec& loading);

  BackgroundValue eval(cplx z) const;
  cplx operator()(cplx z) const { return eval(z).u; }

  // Pair (f, f', f'', g, g') with u = kappa f - z conj f' - conj g.
  struct Pair {
    cplx f, df, ddf, g, dg;
  };
  Pair pair(cplx z) const;

  const LoadingSpec& loading() const { return loading_; }

 private:
  LoadingSpec loading_;
  CMatrix P_;      // rows 0..M
  CMatrix Dtilde_; // rows 0..M
  double kappa_, mu_;
};

inline cplx eval_H(const GeometryBundle& geo, const MaterialPair& material,
                   const LoadingSpec& loading, cplx z) {
  return BackgroundField(geo, material, loading)(z);
}

}  // namespace incl
