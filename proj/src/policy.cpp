#include "fixterm/policy.hpp"

#include <cmath>
#include <string>

#include "fixterm/roots.hpp"

namespace fixterm {

PolicySolution solve_policy(const Scenario& s, bool liquid_only) {
  s.validate();
  PolicySolution out;
  out.v0 = s.v0;
  out.v0_min = v0_min(s);
  out.liquid_only = liquid_only;
  if (s.v0 < out.v0_min * (1.0 - 1e-12))
    throw InfeasibleCapital("initial capital " + std::to_string(s.v0) + " below v0_min " +
                                std::to_string(out.v0_min),
                            out.v0_min, s.v0);
  out.split = solve_split(s.v0, s, liquid_only);
  out.uoc = solve_uoc(out.split.v1_star, s);
  out.uow = liquid_only ? solve_uow_fixed_psi(out.split.v2_star, 0.0, s)
                        : optimize_psi2(out.split.v2_star, s);
  out.total_value = out.uoc.value + out.uow.value;
  return out;
}

PolicyEvaluation evaluate_policy(const MarketState& st, const PolicySolution& sol,
                                 const Scenario& s) {
  if (!(st.t >= 0.0 && st.t < s.horizon))
    throw Error(ErrorKind::InvalidArgument, "evaluate_policy needs 0 <= t < T");
  PolicyEvaluation out;
  out.c_rate = optimal_consumption(st.t, st.z, sol.uoc.lambda1, s.prefs, s.constraints.c_floor);
  out.x1 = uoc_wealth(st.t, st.z, sol.uoc.lambda1, s);
  out.x2 = uow_wealth(st, sol.uow, s);
  out.liquid_wealth = out.x1 + out.x2;
  if (out.liquid_wealth > 0.0) {
    const double d = uoc_wealth_dz(st.t, st.z, sol.uoc.lambda1, s) + uow_wealth_dz(st, sol.uow, s);
    out.pi_fraction = -s.gamma() * st.z * d / (s.market.sigma * out.liquid_wealth);
  }
  return out;
}

double osiw(const PolicySolution& sol, const Scenario& s) {
  return sol.psi_star() * s.illiquid.f0 / sol.v0;
}

double liquid_only_value(double v0, const Scenario& s) {
  Scenario c = s;
  c.v0 = v0;
  return solve_policy(c, true).total_value;
}

namespace {

bool worth_holding(const Scenario& s) {
  return classify_nonredundancy(s.market, s.illiquid) == Attractiveness::StrictlyAttractive;
}

constexpr double kMetricTol = 1e-8;
constexpr double kBracketCap = 10.0;

}  // namespace

double svf(const Scenario& s) {
  if (!worth_holding(s)) return 0.0;
  const double target = solve_policy(s).total_value;
  auto f = [&](double alpha) { return liquid_only_value(s.v0 * (1.0 + alpha), s) - target; };
  const double f0 = f(0.0);
  if (f0 >= 0.0) return 0.0;
  double lo = 0.0, hi = 0.5;
  double fhi = f(hi);
  while (fhi < 0.0) {
    if (hi >= kBracketCap)
      throw Error(ErrorKind::NumericalFailure, "svf: no bracket below alpha = 10");
    lo = hi;
    hi = std::min(2.0 * hi, kBracketCap);
    fhi = f(hi);
  }
  return solve_bracketed(f, lo, hi, 0.0, kMetricTol);
}

double geug(const Scenario& s) {
  if (!worth_holding(s)) return 0.0;
  const double target = liquid_only_value(s.v0, s);
  const double m1 = v1_min(s.constraints, s.market, s.horizon);
  const double vf = s.constraints.v_floor;
  // largest beta that keeps v0 >= v0_min
  const double beta_max = (s.v0 - m1) * std::exp(s.market.r * s.horizon) / vf - 1.0;
  auto g = [&](double beta) {
    Scenario c = s;
    c.constraints.v_floor = vf * (1.0 + beta);
    return solve_policy(c).total_value - target;
  };
  if (g(0.0) <= 0.0) return 0.0;
  double lo = 0.0, hi = 0.5;
  while (true) {
    const bool pulled = hi >= beta_max;
    if (pulled) hi = beta_max * (1.0 - 1e-12);
    if (g(hi) < 0.0) break;
    if (pulled || hi >= kBracketCap)
      throw Error(ErrorKind::NumericalFailure,
                  "geug: guarantee inflation hits the capital limit before utility parity");
    lo = hi;
    hi = std::min(2.0 * hi, kBracketCap);
  }
  return solve_bracketed(g, lo, hi, 0.0, kMetricTol);
}

}  // namespace fixterm
