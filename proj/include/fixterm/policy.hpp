#pragma once

#include "fixterm/market.hpp"
#include "fixterm/split.hpp"
#include "fixterm/uoc.hpp"
#include "fixterm/uow.hpp"

namespace fixterm {

struct PolicySolution {
  SplitResult split;
  UoCSolution uoc;
  UoWSolution uow;
  double total_value = 0.0;
  double v0 = 0.0;
  double v0_min = 0.0;
  bool liquid_only = false;

  double psi_star() const { return uow.psi2_star; }
};

struct PolicyEvaluation {
  double c_rate = 0.0;
  double pi_fraction = 0.0;
  double liquid_wealth = 0.0;
  double x1 = 0.0;  // consumption sub-portfolio
  double x2 = 0.0;  // terminal-wealth sub-portfolio
};

// liquid_only pins the fixed-term position to zero (the benchmark investor).
PolicySolution solve_policy(const Scenario& s, bool liquid_only = false);

PolicyEvaluation evaluate_policy(const MarketState& st, const PolicySolution& sol,
                                 const Scenario& s);

double osiw(const PolicySolution& sol, const Scenario& s);

double liquid_only_value(double v0, const Scenario& s);

// Relative extra capital alpha with V(v0) = V_liquid(v0 (1 + alpha)).
double svf(const Scenario& s);

// Relative guarantee uplift beta with V(v0; floor (1 + beta)) = V_liquid(v0; floor).
double geug(const Scenario& s);

}  // namespace fixterm
