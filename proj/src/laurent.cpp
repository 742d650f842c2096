#include "incl/laurent.hpp"

#include <algorithm>

namespace incl {

LaurentSeries::LaurentSeries(int lo, std::vector<cplx> coeffs)
    : lo_(lo), c_(std::move(coeffs)) {
  if (c_.empty()) c_.assign(1, cplx(0.0));
}

LaurentSeries LaurentSeries::monomial(int power, cplx value) {
  return LaurentSeries(power, {value});
}

LaurentSeries LaurentSeries::zero(Window w) {
  LaurentSeries s(w.lo, std::vector<cplx>(w.hi - w.lo + 1, cplx(0.0)));
  s.window_ = w;
  return s;
}

cplx LaurentSeries::coefficient(int k) const {
  if (k < lo_ || k > hi()) return 0.0;
  return c_[k - lo_];
}

void LaurentSeries::set(int k, cplx value) {
  if (k < lo_ || k > hi())
    throw Error(ErrorKind::window, "coefficient index outside series range");
  c_[k - lo_] = value;
}

LaurentSeries LaurentSeries::truncated(Window w) const {
  LaurentSeries r = zero(w);
  const int a = std::max(w.lo, lo_), b = std::min(w.hi, hi());
  for (int k = a; k <= b; ++k) r.c_[k - w.lo] = c_[k - lo_];
  return r;
}

cplx LaurentSeries::evaluate(cplx w) const {
  // Horner in w from the top, then scale by w^lo.
  cplx acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * w + *it;
  return acc * std::pow(w, lo_);
}

LaurentSeries multiply(const LaurentSeries& a, const LaurentSeries& b,
                       Window window) {
  LaurentSeries r = LaurentSeries::zero(window);
  std::vector<cplx> out(window.hi - window.lo + 1, cplx(0.0));
  const auto& ca = a.coeffs();
  const auto& cb = b.coeffs();
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (ca[i] == cplx(0.0)) continue;
    const int pi_ = a.lo() + static_cast<int>(i);
    // Only j with pi_ + pj inside the window contribute.
    const int jlo = std::max(0, window.lo - pi_ - b.lo());
    const int jhi = std::min(static_cast<int>(cb.size()) - 1,
                             window.hi - pi_ - b.lo());
    for (int j = jlo; j <= jhi; ++j)
      out[pi_ + b.lo() + j - window.lo] += ca[i] * cb[j];
  }
  for (int k = window.lo; k <= window.hi; ++k) r.set(k, out[k - window.lo]);
  return r;
}

LaurentSeries add(const LaurentSeries& a, const LaurentSeries& b) {
  const int lo = std::min(a.lo(), b.lo()), hi = std::max(a.hi(), b.hi());
  std::vector<cplx> c(hi - lo + 1);
  for (int k = lo; k <= hi; ++k) c[k - lo] = a.coefficient(k) + b.coefficient(k);
  return LaurentSeries(lo, std::move(c));
}

LaurentSeries scale(const LaurentSeries& a, cplx s) {
  std::vector<cplx> c = a.coeffs();
  for (auto& v : c) v *= s;
  return LaurentSeries(a.lo(), std::move(c));
}

LaurentSeries shift_power(const LaurentSeries& a, int p) {
  return LaurentSeries(a.lo() + p, a.coeffs());
}

}  // namespace incl
