#include "incl/material.hpp"

#include <cmath>
#include <sstream>

namespace incl {

KelvinConstants derive_constants(double lambda, double mu) {
  if (!std::isfinite(lambda) || !std::isfinite(mu) || mu <= 0.0 ||
      lambda + mu <= 0.0) {
    std::ostringstream os;
    os << "Lame constants not elliptic: lambda=" << lambda << " mu=" << mu;
    throw Error(ErrorKind::validation, os.str());
  }
  KelvinConstants c;
  const double a = 1.0 / mu;
  const double b = 1.0 / (2.0 * mu + lambda);
  c.alpha = 0.5 * (a + b);
  c.beta = 0.5 * (a - b);
  c.kappa = (lambda + 3.0 * mu) / (lambda + mu);
  return c;
}

MaterialPair MaterialPair::transmission(double lambda, double mu,
                                        double lambda_int, double mu_int) {
  MaterialPair p;
  p.ext_ = derive_constants(lambda, mu);
  p.int_ = derive_constants(lambda_int, mu_int);
  const double dl = lambda - lambda_int, dm = mu - mu_int;
  if (dl * dl + dm * dm == 0.0)
    throw Error(ErrorKind::validation,
                "interior and exterior Lame constants coincide; no inclusion");
  p.lambda_ = lambda;
  p.mu_ = mu;
  p.lambda_t_ = lambda_int;
  p.mu_t_ = mu_int;
  return p;
}

MaterialPair MaterialPair::cavity(double lambda, double mu) {
  MaterialPair p;
  p.ext_ = derive_constants(lambda, mu);
  p.lambda_ = lambda;
  p.mu_ = mu;
  p.cavity_ = true;
  return p;
}

MaterialPair MaterialPair::cavity_limit() const { return cavity(lambda_, mu_); }

const KelvinConstants& MaterialPair::interior() const {
  if (cavity_)
    throw Error(ErrorKind::mode, "interior constants undefined for a cavity");
  return int_;
}

}  // namespace incl
