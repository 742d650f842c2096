#include "incl/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace incl {

namespace {

cplx horner(const CMatrix& coeffs, int row, int degree, cplx z) {
  cplx acc = 0.0;
  for (int k = degree; k >= 0; --k) acc = acc * z + coeffs(row, k);
  return acc;
}

const cplx nan_c{std::numeric_limits<double>::quiet_NaN(),
                 std::numeric_limits<double>::quiet_NaN()};

double segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  double t = len2 > 0 ? ((p - a) * std::conj(d)).real() / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

}  // namespace

const char* to_string(Region r) {
  switch (r) {
    case Region::exterior: return "exterior";
    case Region::interior: return "interior";
    case Region::boundary: return "boundary";
    case Region::cavity: return "cavity";
  }
  return "unknown";
}

cplx GridSpec::point(int ix, int iy) const {
  const double x = nx > 1 ? x0 + (x1 - x0) * ix / (nx - 1) : x0;
  const double y = ny > 1 ? y0 + (y1 - y0) * iy / (ny - 1) : y0;
  return {x, y};
}

FieldEvaluator::FieldEvaluator(const GeometryBundle& geo,
                               const MaterialPair& material,
                               const LoadingSpec& loading,
                               const DensitySolution& solution,
                               const FieldOptions& opt)
    : map_(geo.map),
      material_(material),
      background_(geo, material, loading),
      sol_(solution),
      opt_(opt),
      n_(solution.n()),
      top_(solution.n() + geo.map.depth() + 1) {
  if (n_ != geo.n)
    throw Error(ErrorKind::order_mismatch,
                "solution and geometry use different truncation orders");
  if ((solution.mode == Mode::cavity) != material.is_cavity())
    throw Error(ErrorKind::mode, "solution mode does not match material");
  if (!(opt_.far_radius > 1.0))
    throw Error(ErrorKind::validation, "far_radius must exceed 1");
  P_ = faber_matrix(map_, top_);
  dP_ = P_ * shift_matrix(top_).cast<cplx>();
  // Tail of the Grunsky series is below 2m (1/far_radius)^k.
  const int ncol = std::max(
      n_, int(std::ceil(std::log(1e-18) / std::log(1.0 / opt_.far_radius))));
  C_far_ = grunsky_matrix(map_, top_, ncol);
  polygon_.resize(opt_.boundary_samples);
  for (int j = 0; j < opt_.boundary_samples; ++j)
    polygon_[j] = map_.boundary_point(2.0 * pi * j / opt_.boundary_samples).z;
}

void FieldEvaluator::exterior_ops(cplx w, cplx z, CVector& Lp, CVector& Cp) const {
  const double g = map_.gamma();
  const cplx dp = map_.derivative(w);
  Lp = CVector::Zero(top_ + 1);
  Cp = CVector::Zero(top_ + 1);
  if (std::abs(w) >= opt_.far_radius * g) {
    const Eigen::Index nc = C_far_.cols();
    CVector u0(nc), u1(nc);
    const cplx winv = 1.0 / w;
    cplx p = 1.0;
    for (Eigen::Index k = 0; k < nc; ++k) {
      u0(k) = p;               // w^{-k}
      u1(k) = double(k) * p * winv;  // k w^{-k-1}
      p *= winv;
    }
    const CVector s0 = C_far_ * u0, s1 = C_far_ * u1;
    for (int m = 1; m <= top_; ++m) {
      const double c = std::pow(g, -m) / m;
      Lp(m) = -c * s0(m);
      Cp(m) = c * s1(m) / dp;
    }
  } else {
    for (int m = 1; m <= top_; ++m) {
      const double c = std::pow(g, -m) / m;
      const cplx wm = std::pow(w, m);
      Lp(m) = -c * (horner(P_, m, m, z) - wm);
      Cp(m) = -c * horner(dP_, m, m - 1, z) + std::pow(g, -m) * wm / w / dp;
    }
  }
}

HolomorphicPair FieldEvaluator::exterior_pair(cplx w) const {
  const auto& k = material_.exterior();
  const double g = map_.gamma();
  const cplx z = map_.eval(w);
  const cplx dp = map_.derivative(w);
  CVector Lp, Cp;
  exterior_ops(w, z, Lp, Cp);

  const int neg = n_ + 1;
  CVector Lm(neg + 1), Cm(neg + 1);
  Lm(0) = 0.0;
  Cm(0) = 1.0 / (w * dp);
  for (int m = 1; m <= neg; ++m) {
    Lm(m) = -std::pow(g, m) / m * std::pow(w, -m);
    Cm(m) = std::pow(g, m) * std::pow(w, -m - 1) / dp;
  }
  auto C_of = [&](int idx) -> cplx { return idx > 0 ? Cp(idx) : Cm(-idx); };
  auto C_zeta = [&](int l) {
    cplx s = 0.0;
    for (int j = -1; j <= map_.depth(); ++j)
      s += std::conj(map_.coefficient(j)) * std::pow(g, -j) * C_of(j + l);
    return s;
  };

  HolomorphicPair p;
  const CVector& xp = sol_.xe_plus;
  const CVector& xm = sol_.xe_minus;
  cplx Lpsi = 0.0, Cpsi = 0.0, Lbar = 0.0, Cz = 0.0;
  for (int m = 1; m <= n_; ++m) {
    Lpsi += xp(m) * Lp(m) + xm(m) * Lm(m);
    Cpsi += xp(m) * Cp(m) + xm(m) * Cm(m);
    Lbar += std::conj(xp(m)) * Lm(m) + std::conj(xm(m)) * Lp(m);
    Cz += xp(m) * C_zeta(m) + xm(m) * C_zeta(-m);
  }
  p.f = k.beta * Lpsi;
  p.df = k.beta * Cpsi;
  p.g = -k.alpha * Lbar - k.beta * Cz;
  return p;
}

HolomorphicPair FieldEvaluator::interior_pair(cplx z) const {
  if (material_.is_cavity())
    throw Error(ErrorKind::mode, "no interior field for a cavity");
  const auto& k = material_.interior();
  const double g = map_.gamma(), lg = map_.log_gamma();
  CVector Lp = CVector::Zero(top_ + 1), Cp = CVector::Zero(top_ + 1);
  for (int m = 1; m <= top_; ++m) {
    const double c = std::pow(g, -m) / m;
    Lp(m) = -c * horner(P_, m, m, z);
    Cp(m) = -c * horner(dP_, m, m - 1, z);
  }
  auto C_zeta = [&](int l) {
    cplx s = 0.0;
    for (int j = std::max(-1, 1 - l); j <= map_.depth(); ++j)
      s += std::conj(map_.coefficient(j)) * std::pow(g, -j) * Cp(j + l);
    return s;
  };
  const CVector& xp = sol_.xi_plus;
  const CVector& xm = sol_.xi_minus;
  cplx Lphi = xm(0) * lg, Cphi = 0.0, Lbar = std::conj(xm(0)) * lg,
       Cz = xm(0) * C_zeta(0);
  for (int m = 1; m <= n_; ++m) {
    Lphi += xp(m) * Lp(m);
    Cphi += xp(m) * Cp(m);
    Lbar += std::conj(xm(m)) * Lp(m);
    Cz += xp(m) * C_zeta(m) + xm(m) * C_zeta(-m);
  }
  HolomorphicPair p;
  p.f = k.beta * Lphi;
  p.df = k.beta * Cphi;
  p.g = -k.alpha * Lbar - k.beta * Cz;
  return p;
}

FieldSample FieldEvaluator::exterior_at(cplx w) const {
  FieldSample s;
  s.w = w;
  s.z = map_.eval(w);
  s.region = Region::exterior;
  const HolomorphicPair p = exterior_pair(w);
  const BackgroundValue H = background_.eval(s.z);
  const double kappa = material_.exterior().kappa, mu = material_.mu_ext();
  s.parts.background = H.u;
  s.parts.kappa_f = 0.5 * kappa * p.f;
  s.parts.z_conj_df = -0.5 * s.z * std::conj(p.df);
  s.parts.conj_g = -0.5 * std::conj(p.g);
  s.u = H.u + s.parts.kappa_f + s.parts.z_conj_df + s.parts.conj_g;
  s.traction_potential =
      H.traction_potential +
      0.5 * mu * (p.f + s.z * std::conj(p.df) + std::conj(p.g));
  return s;
}

FieldSample FieldEvaluator::eval_exterior(cplx w) const {
  if (!(std::abs(w) > map_.gamma()))
    throw Error(ErrorKind::domain, "exterior evaluation needs |w| > gamma");
  return exterior_at(w);
}

FieldSample FieldEvaluator::exterior_trace(double theta) const {
  return exterior_at(std::polar(map_.gamma(), theta));
}

FieldSample FieldEvaluator::eval_interior_at(cplx z) const {
  const HolomorphicPair p = interior_pair(z);
  const auto& k = material_.interior();
  FieldSample s;
  s.z = z;
  s.region = Region::interior;
  s.parts.kappa_f = 0.5 * k.kappa * p.f;
  s.parts.z_conj_df = -0.5 * z * std::conj(p.df);
  s.parts.conj_g = -0.5 * std::conj(p.g);
  s.parts.constant = -0.5 * k.beta * sol_.xi_minus(0);
  s.u = s.parts.kappa_f + s.parts.z_conj_df + s.parts.conj_g + s.parts.constant;
  s.traction_potential =
      0.5 * material_.mu_int() * (p.f + z * std::conj(p.df) + std::conj(p.g));
  return s;
}

FieldSample FieldEvaluator::eval_interior(cplx w) const {
  if (!(std::abs(w) < map_.gamma()))
    throw Error(ErrorKind::domain, "interior evaluation needs |w| < gamma");
  FieldSample s = eval_interior_at(map_.eval(w));
  s.w = w;
  return s;
}

ResidualReport FieldEvaluator::transmission_residual(
    const std::vector<double>& angles) const {
  if (material_.is_cavity())
    throw Error(ErrorKind::mode, "transmission residual needs an inclusion");
  ResidualReport r;
  const double g = map_.gamma(), eps = opt_.epsilon;
  auto jump = [&](double theta, double e) {
    const cplx dir = std::polar(1.0, theta);
    const FieldSample out = exterior_at(g * (1.0 + e) * dir);
    const FieldSample in = eval_interior_at(map_.eval(g * (1.0 - e) * dir));
    return std::pair<cplx, cplx>(out.u - in.u,
                                 out.traction_potential - in.traction_potential);
  };
  std::vector<cplx> tjump;
  for (double theta : angles) {
    const auto a = jump(theta, eps), b = jump(theta, 0.5 * eps);
    // One Richardson step removes the O(eps) term.
    const cplx du = 2.0 * b.first - a.first;
    const cplx dt = 2.0 * b.second - a.second;
    r.displacement = std::max(r.displacement, std::abs(du));
    tjump.push_back(dt);
  }
  for (const cplx& t : tjump)
    r.traction = std::max(r.traction, std::abs(t - tjump.front()));
  return r;
}

Region FieldEvaluator::classify(cplx z) const {
  const std::size_t np = polygon_.size();
  double dist = std::numeric_limits<double>::infinity();
  bool inside = false;
  for (std::size_t i = 0, j = np - 1; i < np; j = i++) {
    const cplx a = polygon_[i], b = polygon_[j];
    dist = std::min(dist, segment_distance(z, a, b));
    if ((a.imag() > z.imag()) != (b.imag() > z.imag()) &&
        z.real() < (b.real() - a.real()) * (z.imag() - a.imag()) /
                           (b.imag() - a.imag()) + a.real())
      inside = !inside;
  }
  if (dist < opt_.band * map_.gamma()) return Region::boundary;
  if (inside) return material_.is_cavity() ? Region::cavity : Region::interior;
  return Region::exterior;
}

std::vector<FieldSample> FieldEvaluator::grid_field(const GridSpec& grid,
                                                    Exec exec) const {
  const long total = static_cast<long>(grid.size());
  std::vector<FieldSample> out(total);
  auto sample = [&](long idx) {
    const int ix = static_cast<int>(idx % grid.nx);
    const int iy = static_cast<int>(idx / grid.nx);
    const cplx z = grid.point(ix, iy);
    FieldSample s;
    s.z = z;
    s.u = nan_c;
    const Region region = classify(z);
    try {
      if (region == Region::exterior || region == Region::boundary) {
        const auto w = map_.inverse(z);
        if (w && std::abs(*w) > map_.gamma()) {
          s = exterior_at(*w);
        } else if (region == Region::boundary && !material_.is_cavity()) {
          s = eval_interior_at(z);
        } else if (region == Region::exterior) {
          s.region = Region::boundary;  // no exterior preimage found
        }
      } else if (region == Region::interior) {
        s = eval_interior_at(z);
      }
    } catch (const Error&) {
      s.u = nan_c;
    }
    s.z = z;
    if (s.region != Region::boundary) s.region = region;
    out[idx] = s;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < total; ++i) sample(i);
  } else {
    for (long i = 0; i < total; ++i) sample(i);
  }
  return out;
}

}  // namespace incl
