#include "fixterm/uoc.hpp"

#include <cmath>

#include "fixterm/roots.hpp"
#include "fixterm/xi.hpp"

namespace fixterm {

const char* to_string(Boundary b) {
  return b == Boundary::Interior ? "interior" : "at_minimum";
}

double v1_min(const Constraints& c, const MarketSpec& m, double T) {
  return c.c_floor * -std::expm1(-m.r * T) / m.r;
}

namespace {

struct Legs {
  double power = 0.0;  // integral of the unconstrained consumption leg
  double floor = 0.0;  // integral of the floor leg
};

// Integrals over [t, T] of xi(s, t, z, kp, 0, theta) and xi(s, t, z, kf, theta, inf).
// dz selects xi_dz instead of xi.
Legs legs(double t, double z, double theta, double kp, double kf, const Scenario& s, bool dz) {
  const double g = s.gamma(), r = s.market.r;
  auto eval = [&](const XiArgs& a) { return dz ? xi_dz(a) : xi(a); };
  Legs out;
  const int n = s.numerics.quad_nodes;
  if (theta > 0.0)
    out.power = integrate_over_time(
        [&](double u) { return eval(XiArgs{u, t, z, kp, 0.0, theta, g, r}); }, t, s.horizon, n);
  out.floor = integrate_over_time(
      [&](double u) { return eval(XiArgs{u, t, z, kf, theta, kInf, g, r}); }, t, s.horizon, n);
  return out;
}

double theta_of(double lambda1, const Scenario& s) {
  if (std::isinf(lambda1)) return 0.0;
  return std::pow(s.constraints.c_floor, s.prefs.p1 - 1.0) / lambda1;
}

// Numerator of the wealth expression (wealth times z), or its z-derivative.
double numerator(double t, double z, double lambda1, const Scenario& s, bool dz) {
  const double p1 = s.prefs.p1;
  const double theta = theta_of(lambda1, s);
  const Legs l = legs(t, z, theta, p1 / (p1 - 1.0), 1.0, s, dz);
  double out = s.constraints.c_floor * l.floor;
  if (theta > 0.0) out += std::pow(lambda1, 1.0 / (p1 - 1.0)) * l.power;
  return out;
}

}  // namespace

double uoc_budget(double lambda1, const Scenario& s) {
  if (!(lambda1 > 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda1 must be positive");
  return numerator(0.0, 1.0, lambda1, s, false);
}

double solve_lambda1(double v1, const Scenario& s) {
  const double vmin = v1_min(s.constraints, s.market, s.horizon);
  if (!(v1 > vmin))
    throw InfeasibleCapital("consumption capital at or below its minimum", vmin, v1);
  const double x0 = std::pow(v1, s.prefs.p1 - 1.0);
  return solve_decreasing_positive([&](double l) { return uoc_budget(l, s); }, v1, x0,
                                   s.numerics.bisect_tol);
}

double optimal_consumption(double t, double z, double lambda1, const Preferences& prefs,
                           double c_floor) {
  (void)t;
  if (std::isinf(lambda1)) return c_floor;
  const double theta = std::pow(c_floor, prefs.p1 - 1.0) / lambda1;
  if (z > theta) return c_floor;
  return std::max(c_floor, std::pow(lambda1 * z, 1.0 / (prefs.p1 - 1.0)));
}

double uoc_wealth(double t, double z, double lambda1, const Scenario& s) {
  if (!(z > 0.0)) throw Error(ErrorKind::InvalidArgument, "z must be positive");
  if (t >= s.horizon) return 0.0;
  return numerator(t, z, lambda1, s, false) / z;
}

double uoc_wealth_dz(double t, double z, double lambda1, const Scenario& s) {
  if (t >= s.horizon) return 0.0;
  const double n = numerator(t, z, lambda1, s, false);
  const double dn = numerator(t, z, lambda1, s, true);
  return dn / z - n / (z * z);
}

double uoc_strategy(double t, double z, double lambda1, const Scenario& s) {
  if (!(t < s.horizon)) throw Error(ErrorKind::UndefinedStrategy, "strategy needs t < T");
  const double n = numerator(t, z, lambda1, s, false);
  if (!(n > 0.0)) throw Error(ErrorKind::UndefinedStrategy, "zero consumption wealth");
  const double dn = numerator(t, z, lambda1, s, true);
  // -gamma z g'/(sigma g) with g = n/z
  return s.gamma() / s.market.sigma * (1.0 - z * dn / n);
}

UoCSolution solve_uoc(double v1, const Scenario& s) {
  const double vmin = v1_min(s.constraints, s.market, s.horizon);
  const double p1 = s.prefs.p1, c = s.constraints.c_floor;
  UoCSolution out;
  out.v1 = v1;
  if (v1 < vmin * (1.0 - 1e-14))
    throw InfeasibleCapital("consumption capital below its minimum", vmin, v1);
  if (v1 <= vmin * (1.0 + 1e-14)) {
    out.lambda1 = kInf;
    out.boundary = Boundary::AtMinimum;
    out.value = s.horizon * std::pow(c, p1) / p1;
    return out;
  }
  out.lambda1 = solve_lambda1(v1, s);
  out.budget_residual = std::abs(uoc_budget(out.lambda1, s) - v1) / v1;
  const double theta = theta_of(out.lambda1, s);
  const Legs l = legs(0.0, 1.0, theta, p1 / (p1 - 1.0), 0.0, s, false);
  out.value = std::pow(out.lambda1, p1 / (p1 - 1.0)) / p1 * l.power + std::pow(c, p1) / p1 * l.floor;
  return out;
}

double uoc_value(double v1, const Scenario& s) { return solve_uoc(v1, s).value; }

}  // namespace fixterm
