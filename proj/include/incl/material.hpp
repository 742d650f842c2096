#pragma once

#include "incl/common.hpp"

namespace incl {

/// Constants of the Kelvin matrix and the complex representation for one
/// isotropic medium. kappa * beta == alpha.
struct KelvinConstants {
  double alpha = 0.0;
  double beta = 0.0;
  double kappa = 0.0;
};

// Throws ErrorKind::validation unless mu > 0 and lambda + mu > 0.
KelvinConstants derive_constants(double lambda, double mu);

/// Exterior medium plus either an elastic inclusion or a cavity.
class MaterialPair {
 public:
  static MaterialPair transmission(double lambda, double mu, double lambda_int,
                                   double mu_int);
  static MaterialPair cavity(double lambda, double mu);

  // Same exterior medium with the interior replaced by a hole.
  MaterialPair cavity_limit() const;

  bool is_cavity() const { return cavity_; }

  double lambda_ext() const { return lambda_; }
  double mu_ext() const { return mu_; }
  double lambda_int() const { return lambda_t_; }
  double mu_int() const { return mu_t_; }

  const KelvinConstants& exterior() const { return ext_; }
  // Throws ErrorKind::mode for a cavity: 1/mu_int is undefined there.
  const KelvinConstants& interior() const;

 private:
  MaterialPair() = default;

  double lambda_ = 0.0, mu_ = 0.0, lambda_t_ = 0.0, mu_t_ = 0.0;
  bool cavity_ = false;
  KelvinConstants ext_, int_;
};

}  // namespace incl
