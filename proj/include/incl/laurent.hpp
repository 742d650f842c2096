#pragma once

#include <optional>
#include <vector>

#include "incl/common.hpp"

namespace incl {

/// Closed range of powers [lo, hi].
struct Window {
  int lo = 0;
  int hi = 0;
  bool contains(int k) const { return k >= lo && k <= hi; }
};

/// Dense two-sided series sum_{k=lo}^{hi} c_k w^k.
class LaurentSeries {
 public:
  LaurentSeries() : lo_(0), c_(1, cplx(0.0)) {}
  LaurentSeries(int lo, std::vector<cplx> coeffs);

  static LaurentSeries monomial(int power, cplx value = 1.0);
  static LaurentSeries zero(Window w);

  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(c_.size()) - 1; }
  std::size_t size() const { return c_.size(); }

  // Zero outside [lo, hi].
  cplx coefficient(int k) const;
  void set(int k, cplx value);  // k must lie in [lo, hi]

  // Set once the series has been cut back to a working window.
  const std::optional<Window>& window() const { return window_; }

  LaurentSeries truncated(Window w) const;
  cplx evaluate(cplx w) const;

  const std::vector<cplx>& coeffs() const { return c_; }

 private:
  int lo_;
  std::vector<cplx> c_;
  std::optional<Window> window_;
};

LaurentSeries multiply(const LaurentSeries& a, const LaurentSeries& b,
                       Window window);
LaurentSeries add(const LaurentSeries& a, const LaurentSeries& b);
LaurentSeries scale(const LaurentSeries& a, cplx s);
LaurentSeries shift_power(const LaurentSeries& a, int p);

}  // namespace incl
