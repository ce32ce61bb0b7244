#pragma once

#include "fixterm/market.hpp"
#include "fixterm/uoc.hpp"
#include "fixterm/xi.hpp"

namespace fixterm {

enum class CaseTag { CaseI, CaseII, CaseIII, PsiZero, DeterministicF };

const char* to_string(CaseTag c);

struct UoWSolution {
  double v2 = 0.0;
  double psi2_star = 0.0;
  double psi_max = 0.0;
  // +inf when no free capital is left (pure replication of the floor).
  double lambda2 = kInf;
  double x_b = 0.0;
  double x_tilde2 = 0.0;
  double value = 0.0;
  CaseTag case_tag = CaseTag::PsiZero;
  Boundary boundary = Boundary::Interior;
  double budget_residual = 0.0;  // relative to max(x_tilde2, 1e-300)
};

double v2_min(const Constraints& c, const MarketSpec& m, double T);

// 1 + sigma_f (p2 - 1) / gamma
double case_discriminant(double gamma, double sigma_f, double p2);

inline constexpr double kCaseIITol = 1e-12;

CaseTag classify_case(double psi2, const Scenario& s);

// Free capital left after buying psi2 units and the floor put.
double free_capital(double psi2, double v2, const Scenario& s);

double solve_lambda2(double x_tilde2, double psi2, const Scenario& s);

// Auxiliary (unconstrained-part) wealth at a state.
double auxiliary_wealth(const MarketState& st, double psi2, double lambda2, const Scenario& s);
double auxiliary_wealth_dz(const MarketState& st, double psi2, double lambda2, const Scenario& s);

// E[U2(V(T))] for the optimal terminal wealth given psi2 and v2.
double conditional_value(double psi2, double v2, const Scenario& s);

// Same with the multiplier already known (lambda2 = +inf means pure replication).
double conditional_value_given_lambda(double psi2, double lambda2, const Scenario& s);

double feasible_psi_max(double v2, const Scenario& s);

UoWSolution optimize_psi2(double v2, const Scenario& s);

// Solve with psi2 pinned (used for the liquid-only benchmark).
UoWSolution solve_uow_fixed_psi(double v2, double psi2, const Scenario& s);

double uow_wealth(const MarketState& st, const UoWSolution& sol, const Scenario& s);
double uow_wealth_dz(const MarketState& st, const UoWSolution& sol, const Scenario& s);
double uow_strategy(const MarketState& st, const UoWSolution& sol, const Scenario& s);

// max{V_floor, psi2 F(T), (lambda2 Z(T))^(1/(p2-1))}
double terminal_wealth_V2(double z_T, double f_T, const UoWSolution& sol, const Scenario& s);

}  // namespace fixterm
