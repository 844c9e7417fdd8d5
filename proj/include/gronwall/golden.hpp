#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

namespace gronwall {

class bracket_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct scalar_minimum {
  double x;
  double value;
};

namespace detail {

// Expands [lo, hi] around seed by the given factor until f(mid) is below
// both endpoint values, i.e. a unimodal bracket has been found.
inline std::pair<double, double> expand_bracket(
    const std::function<double(double)>& f, double seed, double half_width,
    double factor, int max_expansions) {
  double lo = seed - half_width;
  double hi = seed + half_width;
  for (int i = 0; i < max_expansions; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < f(lo) && f(mid) < f(hi)) return {lo, hi};
    lo = mid - (mid - lo) * factor;
    hi = mid + (hi - mid) * factor;
  }
  throw bracket_error("bracket expansion failed to enclose a minimum");
}

}  // namespace detail

/// Golden-section search on [a, b]; f must be unimodal there.
inline scalar_minimum golden_section_minimize(
    const std::function<double(double)>& f, double a, double b,
    double xtol = 1e-10, int max_iters = 300) {
  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - (b - a) * invphi;
  double d = a + (b - a) * invphi;
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iters && (b - a) > xtol; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * invphi;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * invphi;
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

/// Bracket around the seed (expanding by `factor` as needed), then minimize.
inline scalar_minimum bracketed_minimize(const std::function<double(double)>& f,
                                         double seed, double half_width,
                                         double xtol = 1e-10,
                                         double factor = 4.0,
                                         int max_expansions = 200) {
  const auto [lo, hi] =
      detail::expand_bracket(f, seed, half_width, factor, max_expansions);
  return golden_section_minimize(f, lo, hi, xtol);
}

}  // namespace gronwall
