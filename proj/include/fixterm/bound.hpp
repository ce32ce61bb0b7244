#pragma once

#include "fixterm/market.hpp"

namespace fixterm {

// Price at t = 0 of (V_floor - psi2 F(T))^+.
double put_price_x_B(double psi2, const Scenario& s);

// d x_B / d psi2.
double put_price_dpsi(double psi2, const Scenario& s);

// Value of the replicating portfolio at a state.
double put_value_X_B(const MarketState& st, double psi2, const Scenario& s);

// z-derivative of put_value_X_B with F(t) tied to z, so the strike leg scales
// like z^(-sigma_f/gamma) around the given state.
double put_value_dz(const MarketState& st, double psi2, const Scenario& s);

// Risky fraction of the replicating portfolio.
double put_replication_pi_B(const MarketState& st, double psi2, const Scenario& s);

// Helpers shared with the wealth solver.
double illiquid_exponent(const Scenario& s);  // sigma_f / gamma

// psi2 f h(t,T) z^(sigma_f/gamma): the strike leg coefficient in kernel space. Equals
// psi2 F0 h(0,T) on any path consistent with F0.
double strike_coefficient(const MarketState& st, double psi2, const Scenario& s);

// Kernel level at T below which psi2 F(T) exceeds V_floor: (K / V_floor)^(gamma/sigma_f).
double in_the_money_threshold(double k_coef, double v_floor, double e);

}  // namespace fixterm
