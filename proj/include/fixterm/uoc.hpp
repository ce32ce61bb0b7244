#pragma once

#include "fixterm/market.hpp"

namespace fixterm {

enum class Boundary { Interior, AtMinimum };

const char* to_string(Boundary b);

struct UoCSolution {
  double v1 = 0.0;
  // +inf at the minimum-capital boundary, where consumption sits on the floor throughout.
  double lambda1 = 0.0;
  double value = 0.0;
  Boundary boundary = Boundary::Interior;
  double budget_residual = 0.0;  // relative
};

// c_floor (1 - e^{-rT}) / r
double v1_min(const Constraints& c, const MarketSpec& m, double T);

// Cost at t = 0 of the consumption plan generated by lambda1.
double uoc_budget(double lambda1, const Scenario& s);

double solve_lambda1(double v1, const Scenario& s);

double optimal_consumption(double t, double z, double lambda1, const Preferences& prefs,
                           double c_floor);

UoCSolution solve_uoc(double v1, const Scenario& s);

// Liquid wealth of the consumption sub-portfolio at (t, z).
double uoc_wealth(double t, double z, double lambda1, const Scenario& s);

// d uoc_wealth / dz, analytic.
double uoc_wealth_dz(double t, double z, double lambda1, const Scenario& s);

// Risky-asset fraction of the consumption sub-portfolio.
double uoc_strategy(double t, double z, double lambda1, const Scenario& s);

double uoc_value(double v1, const Scenario& s);

}  // namespace fixterm
