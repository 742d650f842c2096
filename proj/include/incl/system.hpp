#pragma once

#include <array>
#include <optional>
#include <vector>

#include "incl/common.hpp"
#include "incl/geometry.hpp"
#include "incl/loading.hpp"
#include "incl/material.hpp"

namespace incl {

// M-blocks at the bundle's inner order.
struct MBlocks {
  CMatrix m21, m41, m22, m42;
};
MBlocks m_blocks(const GeometryBundle& geo);

/// S^(i,j) stored at [i-1][j-1], each (n+1) x (n+1).
/// Row index: density coefficient; column index: power of w.
/// j = 1: w^k in the displacement, j = 2: w^{-k} in the displacement,
/// j = 3, 4: the same for the traction potential.
using SBlocks = std::array<std::array<CMatrix, 4>, 4>;

SBlocks exterior_blocks(const MaterialPair& material, const GeometryBundle& geo);
// Throws ErrorKind::mode for a cavity.
SBlocks interior_blocks(const MaterialPair& material, const GeometryBundle& geo);

enum class Mode { transmission, cavity };

/// x E = -2h in block form. Row blocks are the unknowns
/// (xe+, conj, xe-, conj[, xi+, conj, xi-, conj]); column blocks are the
/// equations (j, conj j) for j = 1..4 (transmission) or j = 3, 4 (cavity).
struct BlockSystem {
  Mode mode = Mode::transmission;
  int n = 0;
  std::vector<std::vector<CMatrix>> E;
  std::vector<int> equations;  // j of each column-block pair
  RhsVector h;
  std::optional<ConformalMap> map;

  int row_blocks() const { return static_cast<int>(E.size()); }
  int col_blocks() const { return static_cast<int>(E.front().size()); }
  CMatrix dense() const;
  CVector rhs() const;  // -2h restricted to the included equations
  // E[r'][2c+1] == conj(E[r][2c]) with r' the conjugate partner of r.
  bool conjugate_pairing_holds(double tol = 0.0) const;
};

BlockSystem assemble_E(const MaterialPair& material, const GeometryBundle& geo,
                       const LoadingSpec& loading);

// Transposed per-mode block: rows are the equations (j, conj j) at power m,
// columns the unknown blocks at index m.
CMatrix mode_block(const BlockSystem& sys, int m);

struct SolveOptions {
  double residual_tol = 1e-8;  // relative to ||h||
  double rank_rtol = 0.0;      // 0 selects max(rows, cols) * eps
};

struct DensitySolution {
  Mode mode = Mode::transmission;
  CVector xe_plus, xe_minus;  // entry 0 is zero
  CVector xi_plus;            // entry 0 is zero
  CVector xi_minus;           // entry 0 is x^i_0
  double residual = 0.0;      // ||x E + 2h|| over the solved equations
  double relative_residual = 0.0;
  bool converged = false;
  int unknowns = 0;
  int rank = 0;
  double sigma_max = 0.0, sigma_min = 0.0;
  double singular_gap = 0.0;  // sigma_rank / sigma_{rank+1}, 0 at full rank
  double rotation_projection = 0.0;

  int n() const { return static_cast<int>(xe_plus.size()) - 1; }
  // Complex row vector in the 8-block (or 4-block) layout of E.
  CVector full_row() const;
};

DensitySolution solve(const BlockSystem& sys, const SolveOptions& opt = {});

// int psi . (-y, x) d sigma for the exterior density.
double rotation_projection(const ConformalMap& map, const CVector& xe_plus,
                           const CVector& xe_minus);

}  // namespace incl
