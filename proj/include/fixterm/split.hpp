#pragma once

#include <functional>

#include "fixterm/market.hpp"
#include "fixterm/xi.hpp"

namespace fixterm {

using ValueFn = std::function<double(double)>;

struct SplitResult {
  double v1_star = 0.0;
  double v2_star = 0.0;
  double vbar1 = 0.0;     // unprojected root; +-inf when the derivative gap never changes sign
  bool projected = false;
  double fd_gap = 0.0;    // V1' - V2' at the returned split (interior only)
};

double v0_min(const Scenario& s);

// Central difference (V(v+h) - V(v-h)) / 2h. If v - h falls below domain_lo the step is
// halved toward the boundary once; a second violation is an error.
double value_derivative(const ValueFn& V, double v, double h, double domain_lo = -kInf);

// Splits v0 between two concave value functions with minimal capitals v1_min, v2_min.
SplitResult split_capital(const ValueFn& V1, const ValueFn& V2, double v0, double v1_min,
                          double v2_min, double fd_rel_step);

// liquid_only pins the fixed-term position to zero in the wealth subproblem.
SplitResult solve_split(double v0, const Scenario& s, bool liquid_only = false);

}  // namespace fixterm
