#include "fixterm/bound.hpp"

#include <cmath>

#include "fixterm/xi.hpp"

namespace fixterm {

double illiquid_exponent(const Scenario& s) { return s.illiquid.sigma_f / s.gamma(); }

double strike_coefficient(const MarketState& st, double psi2, const Scenario& s) {
  if (psi2 == 0.0) return 0.0;
  const double e = illiquid_exponent(s);
  const double h = h_factor(st.t, s.horizon, s.illiquid, s.market);
  return psi2 * st.f * h * std::exp(e * std::log(st.z));
}

double in_the_money_threshold(double k_coef, double v_floor, double e) {
  if (k_coef <= 0.0) return 0.0;
  if (v_floor <= 0.0) return kInf;
  return std::exp((std::log(k_coef) - std::log(v_floor)) / e);
}

namespace {

void check_psi(double psi2) {
  if (!(psi2 >= 0.0) || !std::isfinite(psi2))
    throw Error(ErrorKind::InvalidArgument, "psi2 must be a finite non-negative number");
}

// Discounted forward of psi2 F(T) seen from t when F is deterministic.
double det_payoff_level(const MarketState& st, double psi2, const Scenario& s) {
  return psi2 * st.f * std::exp(s.illiquid.mu_f * (s.horizon - st.t));
}

// z * X_B (or its z-derivative) at a state; the threshold does not move with z.
double put_numerator(const MarketState& st, double psi2, const Scenario& s, bool dz) {
  const double e = illiquid_exponent(s);
  const double v = s.constraints.v_floor;
  const double kc = strike_coefficient(st, psi2, s);
  const double zv = in_the_money_threshold(kc, v, e);
  const double g = s.gamma(), r = s.market.r, T = s.horizon;
  auto eval = [&](double k) {
    const XiArgs a{T, st.t, st.z, k, zv, kInf, g, r};
    return dz ? xi_dz(a) : xi(a);
  };
  double out = v * eval(1.0);
  if (kc > 0.0) out -= kc * eval(1.0 - e);
  return out;
}

}  // namespace

double put_price_x_B(double psi2, const Scenario& s) {
  check_psi(psi2);
  const double v = s.constraints.v_floor;
  const double disc = std::exp(-s.market.r * s.horizon);
  if (psi2 == 0.0) return disc * v;
  const MarketState st0{0.0, 1.0, s.illiquid.f0};
  if (deterministic_f(s.illiquid)) return disc * std::max(v - det_payoff_level(st0, psi2, s), 0.0);
  return std::max(put_numerator(st0, psi2, s, false), 0.0);
}

double put_price_dpsi(double psi2, const Scenario& s) {
  check_psi(psi2);
  const double T = s.horizon;
  if (deterministic_f(s.illiquid)) {
    const double fwd = s.illiquid.f0 * std::exp(s.illiquid.mu_f * T);
    return psi2 * fwd < s.constraints.v_floor ? -std::exp(-s.market.r * T) * fwd : 0.0;
  }
  const double e = illiquid_exponent(s);
  const double kc = psi2 * s.illiquid.f0 * h_factor(0.0, T, s.illiquid, s.market);
  const double zv = psi2 == 0.0 ? 0.0 : in_the_money_threshold(kc, s.constraints.v_floor, e);
  const double k_per_psi = s.illiquid.f0 * h_factor(0.0, T, s.illiquid, s.market);
  return -k_per_psi * xi(XiArgs{T, 0.0, 1.0, 1.0 - e, zv, kInf, s.gamma(), s.market.r});
}

double put_value_X_B(const MarketState& st, double psi2, const Scenario& s) {
  check_psi(psi2);
  const double v = s.constraints.v_floor;
  const double tau = s.horizon - st.t;
  if (tau <= 0.0) return std::max(v - psi2 * st.f, 0.0);
  if (psi2 == 0.0) return std::exp(-s.market.r * tau) * v;
  if (deterministic_f(s.illiquid))
    return std::exp(-s.market.r * tau) * std::max(v - det_payoff_level(st, psi2, s), 0.0);
  return std::max(put_numerator(st, psi2, s, false) / st.z, 0.0);
}

double put_value_dz(const MarketState& st, double psi2, const Scenario& s) {
  check_psi(psi2);
  if (st.t >= s.horizon)
    throw Error(ErrorKind::InvalidArgument, "put_value_dz needs t < T");
  if (psi2 == 0.0 || deterministic_f(s.illiquid)) return 0.0;
  const double n = put_numerator(st, psi2, s, false);
  const double dn = put_numerator(st, psi2, s, true);
  return dn / st.z - n / (st.z * st.z);
}

double put_replication_pi_B(const MarketState& st, double psi2, const Scenario& s) {
  check_psi(psi2);
  if (!(st.t < s.horizon)) throw Error(ErrorKind::UndefinedStrategy, "strategy needs t < T");
  const double x = put_value_X_B(st, psi2, s);
  if (!(x > 0.0)) throw Error(ErrorKind::UndefinedStrategy, "replicating portfolio is worthless");
  if (psi2 == 0.0 || deterministic_f(s.illiquid)) return 0.0;
  const double n = put_numerator(st, psi2, s, false);
  const double dn = put_numerator(st, psi2, s, true);
  return s.gamma() / s.market.sigma * (1.0 - st.z * dn / n);
}

}  // namespace fixterm
