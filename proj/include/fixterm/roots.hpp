#pragma once

// Small 1-D root and extremum helpers shared by the solvers.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "fixterm/error.hpp"

namespace fixterm {

// Plain bisection; f(lo) and f(hi) must differ in sign.
template <class F>
double bisect(F&& f, double lo, double hi, double xtol, int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw Error(ErrorKind::NumericalFailure, "bisect: no sign change on bracket");
  for (int i = 0; i < max_iter && hi - lo > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Bracketed root via TOMS 748. Stops once the bracket is within rel_tol (relative to
// its magnitude, with abs_floor as an absolute floor).
template <class F>
double solve_bracketed(F&& f, double lo, double hi, double rel_tol, double abs_floor = 0.0,
                       int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw Error(ErrorKind::NumericalFailure, "root solve: no sign change on bracket");
  auto stop = [&](double a, double b) {
    return std::abs(b - a) <= std::max(rel_tol * std::min(std::abs(a), std::abs(b)), abs_floor);
  };
  std::uintmax_t it = static_cast<std::uintmax_t>(max_iter);
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, it);
  return 0.5 * (r.first + r.second);
}

// Solve g(x) = target for x > 0 where g is strictly decreasing. The bracket is grown
// geometrically from x0, then the solve runs in log x.
template <class G>
double solve_decreasing_positive(G&& g, double target, double x0, double rel_tol,
                                 int max_expand = 400) {
  if (!(x0 > 0.0) || !std::isfinite(x0)) x0 = 1.0;
  auto resid = [&](double lx) { return g(std::exp(lx)) - target; };
  double lo = std::log(x0), hi = lo;
  double rlo = resid(lo);
  if (rlo == 0.0) return x0;
  double step = std::log(2.0);
  if (rlo > 0.0) {
    // g too large: move right
    double rhi = rlo;
    for (int i = 0; rhi > 0.0; ++i) {
      if (i >= max_expand) throw Error(ErrorKind::NumericalFailure, "no bracket for multiplier");
      lo = hi;
      hi += step;
      step *= 1.5;
      rhi = resid(hi);
    }
  } else {
    double rl = rlo;
    for (int i = 0; rl < 0.0; ++i) {
      if (i >= max_expand) throw Error(ErrorKind::NumericalFailure, "no bracket for multiplier");
      hi = lo;
      lo -= step;
      step *= 1.5;
      rl = resid(lo);
    }
  }
  // bracket width in log space equals relative width in x
  const double lx = solve_bracketed(resid, lo, hi, 0.0, rel_tol);
  return std::exp(lx);
}

// Maximise a unimodal function on [lo, hi] (Brent's parabolic/golden search).
// Returns (argmax, max).
template <class F>
std::pair<double, double> maximize_unimodal(F&& f, double lo, double hi,
                                            int bits = std::numeric_limits<double>::digits / 2,
                                            int max_iter = 200) {
  std::uintmax_t it = static_cast<std::uintmax_t>(max_iter);
  auto r = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, lo, hi, bits,
                                                 it);
  return {r.first, -r.second};
}

}  // namespace fixterm
