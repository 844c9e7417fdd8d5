#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace gronwall {

/// Thrown when an adaptive rule cannot reach the requested tolerance
/// within its subdivision budget.
class quadrature_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct simpson_state {
  std::int64_t evals = 0;
  std::int64_t budget = 0;
};

inline double simpson_panel(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double tol,
                                   int depth, simpson_state& st) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  st.evals += 2;
  if (st.evals > st.budget) {
    throw quadrature_error("adaptive Simpson: evaluation budget exhausted "
                           "before tolerance reached");
  }
  const double left = simpson_panel(fa, flm, fm, m - a);
  const double right = simpson_panel(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0) {
    throw quadrature_error("adaptive Simpson: recursion depth exhausted "
                           "before tolerance reached");
  }
  // Richardson: |S2 - S1|/15 estimates the error of S2.
  if (std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1,
                              st) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                              depth - 1, st);
}

}  // namespace detail

/// Integrates f over the compact interval [a, b] to absolute accuracy tol.
/// Throws quadrature_error if the budget runs out first.
inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double tol,
                               std::int64_t max_evals = 1'000'000) {
  if (!(tol > 0.0)) throw std::invalid_argument("adaptive_simpson: tol must be > 0");
  if (a == b) return 0.0;
  detail::simpson_state st;
  st.budget = max_evals;
  const double fa = f(a);
  const double fm = f(0.5 * (a + b));
  const double fb = f(b);
  st.evals = 3;
  const double whole = detail::simpson_panel(fa, fm, fb, b - a);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60, st);
}

}  // namespace gronwall
