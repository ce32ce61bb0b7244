#include "fixterm/split.hpp"

#include <algorithm>
#include <cmath>

#include "fixterm/roots.hpp"
#include "fixterm/uoc.hpp"
#include "fixterm/uow.hpp"

namespace fixterm {

double v0_min(const Scenario& s) {
  return v1_min(s.constraints, s.market, s.horizon) + v2_min(s.constraints, s.market, s.horizon);
}

double value_derivative(const ValueFn& V, double v, double h, double domain_lo) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "finite-difference step must be positive");
  if (v - h < domain_lo) {
    h = 0.5 * (v - domain_lo);
    if (!(h > 0.0))
      throw Error(ErrorKind::InvalidArgument, "finite-difference point outside the value domain");
  }
  return (V(v + h) - V(v - h)) / (2.0 * h);
}

SplitResult split_capital(const ValueFn& V1, const ValueFn& V2, double v0, double v1_min,
                          double v2_min, double fd_rel_step) {
  const double lo = v1_min, hi = v0 - v2_min;
  if (hi < lo - 1e-12 * v0)
    throw InfeasibleCapital("initial capital below the minimum " + std::to_string(v1_min + v2_min),
                            v1_min + v2_min, v0);
  SplitResult out;
  auto finish = [&](double v1) {
    out.v1_star = std::clamp(v1, lo, std::max(lo, hi));
    out.v2_star = v0 - out.v1_star;
    return out;
  };
  auto step = [&](double v) { return std::max(fd_rel_step * v, 1e-7 * v0); };
  auto total = [&](double v1) { return V1(v1) + V2(v0 - v1); };

  const double delta = 2.0 * std::max(fd_rel_step, 1e-7) * v0;
  if (hi - lo <= 4.0 * delta) {
    // too narrow for derivative probes; maximise the concave total directly
    if (hi <= lo) {
      out.vbar1 = lo;
      out.projected = true;
      return finish(lo);
    }
    const auto m = maximize_unimodal(total, lo, hi);
    out.vbar1 = m.first;
    return finish(m.first);
  }

  auto gap = [&](double v1) {
    const double v2 = v0 - v1;
    return value_derivative(V1, v1, step(v1), lo) - value_derivative(V2, v2, step(v2), v2_min);
  };
  const double a = lo + delta, b = hi - delta;
  const double ga = gap(a);
  if (ga <= 0.0) {
    out.vbar1 = -kInf;
    out.projected = true;
    return finish(lo);
  }
  const double gb = gap(b);
  if (gb >= 0.0) {
    out.vbar1 = kInf;
    out.projected = true;
    return finish(hi);
  }
  try {
    out.vbar1 = solve_bracketed(gap, a, b, 1e-10, 1e-12 * v0);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NumericalFailure) throw;
    out.vbar1 = maximize_unimodal(total, a, b).first;
  }
  out.fd_gap = gap(out.vbar1);
  return finish(out.vbar1);
}

SplitResult solve_split(double v0, const Scenario& s, bool liquid_only) {
  const double m1 = v1_min(s.constraints, s.market, s.horizon);
  const double m2 = v2_min(s.constraints, s.market, s.horizon);
  if (v0 < (m1 + m2) * (1.0 - 1e-12))
    throw InfeasibleCapital("initial capital below the minimum " + std::to_string(m1 + m2), m1 + m2,
                            v0);
  // Inner tolerances one order tighter than configured so difference quotients stay clean.
  Scenario tight = s;
  tight.numerics.bisect_tol = std::min(s.numerics.bisect_tol, 1e-13);
  auto V1 = [&](double v) { return uoc_value(v, tight); };
  auto V2 = [&](double v) {
    return liquid_only ? solve_uow_fixed_psi(v, 0.0, tight).value : optimize_psi2(v, tight).value;
  };
  return split_capital(V1, V2, v0, m1, m2, s.numerics.fd_rel_step);
}

}  // namespace fixterm
