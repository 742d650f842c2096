#include <cmath>

#include <doctest.h>

#include "incl/field.hpp"
#include "incl/system.hpp"
#include "support.hpp"

using namespace incl;
using namespace testing_support;

namespace {

const ConformalMap kEllipse(1.0, {0.5, 0.3});
const ConformalMap kDisk(1.0, {0.5});
const MaterialPair kTrans = MaterialPair::transmission(1.0, 1.0, 2.0, 3.0);
const MaterialPair kCavity = MaterialPair::cavity(1.0, 1.0);

LoadingSpec mixed_loading() {
  LoadingSpec L;
  L.A = {cplx(0.2, 0.1), cplx(0.0, -0.1)};
  L.B = {cplx(1.0, -0.5), cplx(0.3, 0.2)};
  return L;
}

DensitySolution zero_solution(Mode mode, int n) {
  DensitySolution s;
  s.mode = mode;
  s.xe_plus = s.xe_minus = s.xi_plus = s.xi_minus = CVector::Zero(n + 1);
  return s;
}

std::vector<double> angles(int count) {
  std::vector<double> a(count);
  for (int j = 0; j < count; ++j) a[j] = 2 * M_PI * j / count;
  return a;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::io;
}

}  // namespace

TEST_CASE("zero densities: u = H outside, u = 0 inside") {
  const GeometryBundle geo(kEllipse, 8);
  const LoadingSpec L = mixed_loading();
  const FieldEvaluator fe(geo, kTrans, L, zero_solution(Mode::transmission, 8));
  const BackgroundField H(geo, kTrans, L);
  for (double r : {1.05, 2.0, 7.0}) {
    const cplx w = std::polar(r, 0.8);
    const FieldSample s = fe.eval_exterior(w);
    CHECK(std::abs(s.u - H(kEllipse.eval(w))) < 1e-14);
    CHECK(s.region == Region::exterior);
  }
  CHECK(std::abs(fe.eval_interior_at(cplx(0.3, 0.1)).u) == 0.0);
  CHECK(std::abs(fe.eval_interior(std::polar(0.95, 1.0)).u) == 0.0);
}

TEST_CASE("constant density: L[phi_0] = ln gamma inside") {
  const ConformalMap m(1.7, {cplx(0.2, 0.1), 0.3});
  const GeometryBundle geo(m, 6);
  DensitySolution s = zero_solution(Mode::transmission, 6);
  const cplx x0(0.4, -0.3);
  s.xi_minus(0) = x0;
  const FieldEvaluator fe(geo, kTrans, LoadingSpec{}, s);
  const double bt = kTrans.interior().beta;
  for (cplx z : {cplx(0.1, 0.0), cplx(-0.5, 0.4)}) {
    const HolomorphicPair p = fe.interior_pair(z);
    CHECK(std::abs(p.f - bt * x0 * std::log(1.7)) < 1e-14);
    CHECK(std::abs(p.df) < 1e-14);
  }
}

TEST_CASE("disk cavity: traction potential constant on the boundary") {
  const GeometryBundle geo(kDisk, 16);
  const LoadingSpec L = mixed_loading();
  const DensitySolution s = solve(assemble_E(kCavity, geo, L));
  const FieldEvaluator fe(geo, kCavity, L, s);
  const cplx t0 = fe.exterior_trace(0.0).traction_potential;
  for (double th : angles(32)) CHECK(std::abs(fe.exterior_trace(th).traction_potential - t0) < 1e-8);
}

TEST_CASE("ellipse cavity: traction potential constant on the boundary") {
  const GeometryBundle geo(kEllipse, 16);
  const LoadingSpec L = mixed_loading();
  const FieldEvaluator fe(geo, kCavity, L, solve(assemble_E(kCavity, geo, L)));
  const cplx t0 = fe.exterior_trace(0.0).traction_potential;
  for (double th : angles(32)) CHECK(std::abs(fe.exterior_trace(th).traction_potential - t0) < 1e-8);
}

TEST_CASE("far-field decay") {
  for (const MaterialPair& mat : {kTrans, kCavity}) {
    const GeometryBundle geo(kEllipse, 16);
    const LoadingSpec L = mixed_loading();
    const FieldEvaluator fe(geo, mat, L, solve(assemble_E(mat, geo, L)));
    double d[3];
    int i = 0;
    for (double R : {10.0, 20.0, 40.0}) {
      d[i] = 0.0;
      for (double th : angles(32)) {
        const FieldSample s = fe.eval_exterior(std::polar(R, th));
        d[i] = std::max(d[i], std::abs(s.u - s.parts.background));
      }
      ++i;
    }
    const double p1 = std::log(d[0] / d[1]) / std::log(2.0), p2 = std::log(d[1] / d[2]) / std::log(2.0);
    CHECK(p1 == doctest::Approx(1.0).epsilon(0.05));
    CHECK(p2 == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("solved transmission: traces agree across the interface") {
  for (const ConformalMap* m : {&kDisk, &kEllipse}) {
    const GeometryBundle geo(*m, 16);
    const LoadingSpec L = mixed_loading();
    const FieldEvaluator fe(geo, kTrans, L, solve(assemble_E(kTrans, geo, L)));
    std::vector<cplx> dt;
    for (double th : angles(48)) {
      const FieldSample out = fe.exterior_trace(th);
      const FieldSample in = fe.eval_interior_at(out.z);
      CHECK(std::abs(out.u - in.u) < 1e-10);
      dt.push_back(out.traction_potential - in.traction_potential);
    }
    for (const cplx& d : dt) CHECK(std::abs(d - dt.front()) < 1e-10);
    const ResidualReport r = fe.transmission_residual(angles(64));
    CHECK(r.displacement <= 1e-8);
    CHECK(r.traction <= 1e-8);
  }
}

TEST_CASE("transmission residual of the zero problem vanishes") {
  const GeometryBundle geo(kEllipse, 8);
  const FieldEvaluator fe(geo, kTrans, LoadingSpec{}, zero_solution(Mode::transmission, 8));
  const ResidualReport r = fe.transmission_residual(angles(16));
  CHECK(r.displacement == 0.0);
  CHECK(r.traction == 0.0);
}

TEST_CASE("mode and domain errors") {
  const GeometryBundle geo(kEllipse, 8);
  const FieldEvaluator cav(geo, kCavity, LoadingSpec{}, zero_solution(Mode::cavity, 8));
  CHECK(kind_of([&] { cav.eval_interior(0.95); }) == ErrorKind::mode);
  CHECK(kind_of([&] { cav.transmission_residual(angles(4)); }) == ErrorKind::mode);
  CHECK(kind_of([&] { cav.eval_exterior(1.0); }) == ErrorKind::domain);
  const FieldEvaluator tr(geo, kTrans, LoadingSpec{}, zero_solution(Mode::transmission, 8));
  CHECK(kind_of([&] { tr.eval_interior(1.0); }) == ErrorKind::domain);
  CHECK(kind_of([&] { FieldEvaluator(geo, kTrans, LoadingSpec{}, zero_solution(Mode::cavity, 8)); }) ==
        ErrorKind::mode);
  CHECK(kind_of([&] { FieldEvaluator(geo, kTrans, LoadingSpec{}, zero_solution(Mode::transmission, 6)); }) ==
        ErrorKind::order_mismatch);
}

TEST_CASE("Grunsky far form and closed near form agree") {
  const ConformalMap m(1.2, {cplx(0.1, 0.2), cplx(0.3, -0.1), cplx(0.05, 0.02)});
  const GeometryBundle geo(m, 12);
  const LoadingSpec L = mixed_loading();
  const DensitySolution s = solve(assemble_E(kTrans, geo, L));
  const FieldEvaluator far(geo, kTrans, L, s);
  FieldOptions near_opt;
  near_opt.far_radius = 1e6;
  const FieldEvaluator near(geo, kTrans, L, s, near_opt);
  for (double r : {1.1, 1.5, 3.0}) {
    for (double th : angles(8)) {
      const cplx w = std::polar(r * m.gamma(), th);
      const FieldSample a = far.eval_exterior(w), b = near.eval_exterior(w);
      CHECK(std::abs(a.u - b.u) < 1e-11 * std::max(1.0, std::abs(a.u)));
      CHECK(std::abs(a.traction_potential - b.traction_potential) <
            1e-11 * std::max(1.0, std::abs(a.traction_potential)));
    }
  }
}

TEST_CASE("holomorphy of the pairs by central differences") {
  const GeometryBundle geo(kEllipse, 12);
  const LoadingSpec L = mixed_loading();
  const FieldEvaluator fe(geo, kTrans, L, solve(assemble_E(kTrans, geo, L)));
  const double h = 1e-5;
  auto dbar = [&](auto&& F, cplx x, auto&& get) {
    const cplx dx = (get(F(x + h)) - get(F(x - h))) / (2 * h);
    const cplx dy = (get(F(x + cplx(0, h))) - get(F(x - cplx(0, h)))) / (2 * h);
    return 0.5 * (dx + cplx(0, 1) * dy);
  };
  auto ext = [&](cplx w) { return fe.exterior_pair(w); };
  auto in = [&](cplx z) { return fe.interior_pair(z); };
  auto f = [](const HolomorphicPair& p) { return p.f; };
  auto g = [](const HolomorphicPair& p) { return p.g; };
  auto df = [](const HolomorphicPair& p) { return p.df; };
  for (cplx w : {std::polar(1.3, 0.4), std::polar(2.0, 2.0), std::polar(1.05, -1.0)}) {
    const HolomorphicPair p = ext(w);
    CHECK(std::abs(dbar(ext, w, f)) <= 1e-6 * std::max(std::abs(p.f), 1e-3));
    CHECK(std::abs(dbar(ext, w, g)) <= 1e-6 * std::max(std::abs(p.g), 1e-3));
    CHECK(std::abs(dbar(ext, w, df)) <= 1e-6 * std::max(std::abs(p.df), 1e-3));
    // f' is the z-derivative of f.
    const cplx dfdw = (ext(w + h).f - ext(w - h).f) / (2 * h);
    CHECK(std::abs(dfdw / kEllipse.derivative(w) - p.df) < 1e-7 * std::max(1.0, std::abs(p.df)));
  }
  for (cplx z : {cplx(0.2, 0.1), cplx(-0.9, 0.05), cplx(0.5, -0.3)}) {
    const HolomorphicPair p = in(z);
    CHECK(std::abs(dbar(in, z, f)) <= 1e-6 * std::max(std::abs(p.f), 1e-3));
    CHECK(std::abs(dbar(in, z, g)) <= 1e-6 * std::max(std::abs(p.g), 1e-3));
    CHECK(std::abs((in(z + h).f - in(z - h).f) / (2 * h) - p.df) < 1e-7 * std::max(1.0, std::abs(p.df)));
  }
}

TEST_CASE("C1 part of C[phi_k] is continuous across the boundary") {
  // C[psi] = f'/beta outside and C[phi] = f'/beta~ inside; outside, removing
  // C2[phi_k] = gamma^-k w^{k-1}/Psi'(w) leaves the C1 part.
  const ConformalMap m(1.1, {cplx(0.2, 0.1), cplx(0.25, -0.05), cplx(0.0, 0.03)});
  const int n = 6;
  const GeometryBundle geo(m, n);
  const double be = kTrans.exterior().beta, bt = kTrans.interior().beta;
  const double eps = 1e-10;
  for (int k = 1; k <= n; ++k) {
    DensitySolution s = zero_solution(Mode::transmission, n);
    s.xe_plus(k) = 1.0;
    s.xi_plus(k) = 1.0;
    const FieldEvaluator fe(geo, kTrans, LoadingSpec{}, s);
    for (double th : angles(12)) {
      const cplx wo = std::polar(m.gamma() * (1 + eps), th), wi = std::polar(m.gamma() * (1 - eps), th);
      const cplx c2 = std::pow(m.gamma(), -k) * std::pow(wo, k - 1) / m.derivative(wo);
      const cplx c1_out = fe.exterior_pair(wo).df / be - c2;
      const cplx c1_in = fe.interior_pair(m.eval(wi)).df / bt;
      CHECK(std::abs(c1_out - c1_in) <= 1e-8);
    }
  }
}

TEST_CASE("L[phi] + conj L[conj phi] is continuous for zero-mean densities") {
  // Closed forms for L[phi_{+-n}] on both sides, tied to the evaluator through f.
  const ConformalMap m(1.0, {cplx(0.3, 0.1), cplx(0.2, 0.1)});
  const int n = 5;
  const GeometryBundle geo(m, n);
  const CMatrix P = faber_matrix(m, n);
  const double g = m.gamma();
  auto F = [&](int k, cplx z) {
    cplx a = 0.0;
    for (int j = k; j >= 0; --j) a = a * z + P(k, j);
    return a;
  };
  auto L_in = [&](int k, cplx z) -> cplx {
    return k > 0 ? -std::pow(g, -k) / k * F(k, z) : cplx(0.0);
  };
  auto L_out = [&](int k, cplx w) -> cplx {
    const cplx z = m.eval(w);
    return k > 0 ? -std::pow(g, -k) / k * (F(k, z) - std::pow(w, k))
                 : -std::pow(g, -k) / (-k) * std::pow(w, k);
  };
  for (int k = 1; k <= n; ++k) {
    DensitySolution s = zero_solution(Mode::transmission, n);
    s.xe_plus(k) = 1.0;
    s.xi_plus(k) = 1.0;
    const FieldEvaluator fe(geo, kTrans, LoadingSpec{}, s);
    const cplx w = std::polar(1.3, 0.7);
    CHECK(std::abs(fe.exterior_pair(w).f - kTrans.exterior().beta * L_out(k, w)) < 1e-13);
    CHECK(std::abs(fe.interior_pair(0.2).f - kTrans.interior().beta * L_in(k, 0.2)) < 1e-13);
  }
  for (int k : {-3, -2, -1, 1, 2, 3}) {
    for (double th : angles(16)) {
      const cplx w = std::polar(g, th);
      const cplx z = m.eval(w);
      // conj(phi_k) = phi_{-k}.
      const cplx out = L_out(k, w) + std::conj(L_out(-k, w));
      const cplx in = L_in(k, z) + std::conj(L_in(-k, z));
      CHECK(std::abs(out - in) < 1e-12);
    }
  }
}

TEST_CASE("grid evaluation") {
  const GeometryBundle geo(kDisk, 8);
  const LoadingSpec L = mixed_loading();
  const FieldEvaluator fe(geo, kTrans, L, solve(assemble_E(kTrans, geo, L)));

  SUBCASE("3x3 around the disk") {
    const auto s = fe.grid_field({-1.5, 2.5, -2.0, 2.0, 3, 3});
    CHECK(s.size() == 9);
    CHECK(s[4].region == Region::interior);  // centre 0.5
    CHECK(s[0].region == Region::exterior);
    CHECK(std::isnan(s[4].w.real()));
    CHECK(std::abs(s[0].z - cplx(-1.5, -2.0)) == 0.0);
    CHECK(std::abs(s[1].z - cplx(0.5, -2.0)) == 0.0);
  }
  SUBCASE("all exterior") {
    const auto s = fe.grid_field({3.0, 5.0, -1.0, 1.0, 5, 4});
    for (const auto& x : s) CHECK(x.region == Region::exterior);
  }
  SUBCASE("straddling the boundary") {
    const auto s = fe.grid_field({1.0, 2.0, 0.0, 0.0, 201, 1});  // crosses |z - 0.5| = 1 at 1.5
    int flagged = 0;
    for (const auto& x : s) {
      if (x.region == Region::boundary) {
        ++flagged;
        CHECK(std::abs(std::abs(x.z - 0.5) - 1.0) <= 1e-2 + 1e-12);
      }
    }
    CHECK(flagged >= 1);
    CHECK(s.front().region == Region::interior);
    CHECK(s.back().region == Region::exterior);
  }
  SUBCASE("empty grid") { CHECK(fe.grid_field({0, 1, 0, 1, 0, 5}).empty()); }
  SUBCASE("serial and parallel agree bitwise") {
    const GridSpec g{-3.0, 3.0, -2.5, 2.5, 23, 19};
    const auto a = fe.grid_field(g, Exec::serial), b = fe.grid_field(g, Exec::parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].region == b[i].region);
      CHECK(((a[i].u == b[i].u) || (std::isnan(a[i].u.real()) && std::isnan(b[i].u.real()))));
    }
  }
}

TEST_CASE("cavity grid marks the hole") {
  const GeometryBundle geo(kEllipse, 8);
  const LoadingSpec L = mixed_loading();
  const FieldEvaluator fe(geo, kCavity, L, solve(assemble_E(kCavity, geo, L)));
  const auto s = fe.grid_field({0.5, 0.5, 0.0, 0.0, 1, 1});
  CHECK(s[0].region == Region::cavity);
  CHECK(std::isnan(s[0].u.real()));
  CHECK(std::string(to_string(Region::cavity)) == "cavity");
}
