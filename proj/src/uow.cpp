#include "fixterm/uow.hpp"

#include <cmath>
#include <vector>

#include "fixterm/bound.hpp"
#include "fixterm/roots.hpp"

namespace fixterm {

const char* to_string(CaseTag c) {
  switch (c) {
    case CaseTag::CaseI:
      return "I";
    case CaseTag::CaseII:
      return "II";
    case CaseTag::CaseIII:
      return "III";
    case CaseTag::PsiZero:
      return "psi_zero";
    case CaseTag::DeterministicF:
      return "deterministic_f";
  }
  return "?";
}

double v2_min(const Constraints& c, const MarketSpec& m, double T) {
  return std::exp(-m.r * T) * c.v_floor;
}

double case_discriminant(double gamma, double sigma_f, double p2) {
  return 1.0 + sigma_f * (p2 - 1.0) / gamma;
}

CaseTag classify_case(double psi2, const Scenario& s) {
  if (psi2 == 0.0) return CaseTag::PsiZero;
  if (deterministic_f(s.illiquid)) return CaseTag::DeterministicF;
  const double d = case_discriminant(s.gamma(), s.illiquid.sigma_f, s.prefs.p2);
  if (std::abs(d) <= kCaseIITol) return CaseTag::CaseII;
  return d > 0.0 ? CaseTag::CaseI : CaseTag::CaseIII;
}

double free_capital(double psi2, double v2, const Scenario& s) {
  return v2 - psi2 * s.illiquid.f0 - put_price_x_B(psi2, s);
}

namespace {

struct Term {
  double coef;
  double k;
  double a;
  double b;
};

// exp(k ln x) with x = +inf mapped to 0 for k < 0
double power(double x, double k) {
  if (k == 0.0) return 1.0;
  return std::exp(k * std::log(x));
}

struct Levels {
  CaseTag tag;
  double v;      // floor
  double kc;     // strike-leg coefficient, F(T) psi2 = kc Z(T)^(-e)
  double e;      // sigma_f / gamma
  double q;      // 1/(p2-1)
  double k2;     // p2/(p2-1)
  double zl;     // (lambda Z)^q = v
  double zv;     // kc Z^-e = v
  double zf;     // (lambda Z)^q = kc Z^-e
  double m;      // deterministic branch: max(v, psi2 F(T))
  double zm;
  bool lambda_dominates_ii;  // case II: lambda leg above the F leg everywhere
  bool pure;                 // lambda = +inf
  double log_lambda;
};

Levels levels(const MarketState& st, double psi2, double lambda2, const Scenario& s) {
  Levels L{};
  const double p2 = s.prefs.p2;
  L.tag = classify_case(psi2, s);
  L.v = s.constraints.v_floor;
  L.q = 1.0 / (p2 - 1.0);
  L.k2 = p2 / (p2 - 1.0);
  L.pure = std::isinf(lambda2);
  L.log_lambda = std::log(lambda2);
  L.zl = std::exp((p2 - 1.0) * std::log(L.v) - L.log_lambda);
  switch (L.tag) {
    case CaseTag::PsiZero:
      break;
    case CaseTag::DeterministicF:
      L.m = std::max(L.v, psi2 * st.f * std::exp(s.illiquid.mu_f * (s.horizon - st.t)));
      L.zm = std::exp((p2 - 1.0) * std::log(L.m) - L.log_lambda);
      break;
    default: {
      L.e = illiquid_exponent(s);
      L.kc = strike_coefficient(st, psi2, s);
      L.zv = in_the_money_threshold(L.kc, L.v, L.e);
      const double d = case_discriminant(s.gamma(), s.illiquid.sigma_f, p2);
      const double lk = (p2 - 1.0) * std::log(L.kc);
      if (L.tag == CaseTag::CaseII) {
        L.lambda_dominates_ii = L.log_lambda <= lk;
      } else {
        L.zf = std::exp((lk - L.log_lambda) / d);
      }
    }
  }
  return L;
}

// z * auxiliary wealth = sum coef * xi(T, t, z, k, a, b)
std::vector<Term> aux_terms(const Levels& L) {
  std::vector<Term> out;
  if (L.pure) return out;
  const double lq = std::exp(L.q * L.log_lambda);
  switch (L.tag) {
    case CaseTag::PsiZero:
      out = {{lq, L.k2, 0.0, L.zl}, {-L.v, 1.0, 0.0, L.zl}};
      break;
    case CaseTag::DeterministicF:
      out = {{lq, L.k2, 0.0, L.zm}, {-L.m, 1.0, 0.0, L.zm}};
      break;
    case CaseTag::CaseI: {
      const double m = std::min(L.zl, L.zf);
      out = {{lq, L.k2, 0.0, m}, {-L.v, 1.0, L.zv, m}, {-L.kc, 1.0 - L.e, 0.0, std::min(L.zv, m)}};
      break;
    }
    case CaseTag::CaseII:
      if (L.lambda_dominates_ii)
        out = {{lq, L.k2, 0.0, L.zl},
               {-L.v, 1.0, L.zv, L.zl},
               {-L.kc, 1.0 - L.e, 0.0, std::min(L.zv, L.zl)}};
      break;
    case CaseTag::CaseIII:
      out = {{lq, L.k2, L.zf, L.zl},
             {-L.v, 1.0, std::max(L.zv, L.zf), L.zl},
             {-L.kc, 1.0 - L.e, L.zf, std::min(L.zv, L.zl)}};
      break;
  }
  return out;
}

// E[U2(V(T)) | state] = sum coef * xi(T, t, z, k, a, b)
std::vector<Term> value_terms(const Levels& L, double p2) {
  std::vector<Term> out;
  const double lam = L.pure ? 0.0 : std::exp(L.k2 * L.log_lambda) / p2;
  auto add_lambda = [&](double a, double b) {
    if (!L.pure) out.push_back({lam, L.k2, a, b});
  };
  const double fk = -L.e * p2;  // exponent of the F leg
  switch (L.tag) {
    case CaseTag::PsiZero:
      out.push_back({power(L.v, p2) / p2, 0.0, L.zl, kInf});
      add_lambda(0.0, L.zl);
      break;
    case CaseTag::DeterministicF:
      out.push_back({power(L.m, p2) / p2, 0.0, L.zm, kInf});
      add_lambda(0.0, L.zm);
      break;
    case CaseTag::CaseI:
      out.push_back({power(L.v, p2) / p2, 0.0, std::max(L.zv, L.zl), kInf});
      out.push_back({power(L.kc, p2) / p2, fk, L.zf, L.zv});
      add_lambda(0.0, std::min(L.zl, L.zf));
      break;
    case CaseTag::CaseII:
      out.push_back({power(L.v, p2) / p2, 0.0, std::max(L.zv, L.zl), kInf});
      if (L.lambda_dominates_ii)
        add_lambda(0.0, L.zl);
      else
        out.push_back({power(L.kc, p2) / p2, fk, 0.0, L.zv});
      break;
    case CaseTag::CaseIII:
      out.push_back({power(L.v, p2) / p2, 0.0, std::max(L.zv, L.zl), kInf});
      out.push_back({power(L.kc, p2) / p2, fk, 0.0, std::min(L.zf, L.zv)});
      add_lambda(L.zf, L.zl);
      break;
  }
  return out;
}

double sum_terms(const std::vector<Term>& terms, const MarketState& st, const Scenario& s,
                 bool dz) {
  double out = 0.0;
  for (const auto& tm : terms) {
    if (!(tm.a < tm.b) || tm.coef == 0.0) continue;
    const XiArgs a{s.horizon, st.t, st.z, tm.k, tm.a, tm.b, s.gamma(), s.market.r};
    const double x = dz ? xi_dz(a) : xi(a);
    if (x != 0.0) out += tm.coef * x;
  }
  return out;
}

MarketState origin(const Scenario& s) { return MarketState{0.0, 1.0, s.illiquid.f0}; }

double aux_budget(double psi2, double lambda2, const Scenario& s) {
  const MarketState st = origin(s);
  return sum_terms(aux_terms(levels(st, psi2, lambda2, s)), st, s, false);
}

// Free capital below this fraction of v2 is treated as none.
constexpr double kNoFreeCapital = 1e-13;

}  // namespace

double solve_lambda2(double x_tilde2, double psi2, const Scenario& s) {
  if (x_tilde2 < 0.0)
    throw InfeasibleCapital("negative free capital in the wealth subproblem", 0.0, x_tilde2);
  if (x_tilde2 == 0.0) return kInf;
  const double x0 = std::pow(x_tilde2 + s.constraints.v_floor, s.prefs.p2 - 1.0);
  return solve_decreasing_positive([&](double l) { return aux_budget(psi2, l, s); }, x_tilde2, x0,
                                   s.numerics.bisect_tol);
}

double auxiliary_wealth(const MarketState& st, double psi2, double lambda2, const Scenario& s) {
  if (!(st.z > 0.0)) throw Error(ErrorKind::InvalidArgument, "z must be positive");
  if (std::isinf(lambda2)) return 0.0;
  if (st.t >= s.horizon) {
    const double top = std::exp(1.0 / (s.prefs.p2 - 1.0) * std::log(lambda2 * st.z));
    return std::max(top - std::max(s.constraints.v_floor, psi2 * st.f), 0.0);
  }
  return std::max(sum_terms(aux_terms(levels(st, psi2, lambda2, s)), st, s, false) / st.z, 0.0);
}

double auxiliary_wealth_dz(const MarketState& st, double psi2, double lambda2,
                           const Scenario& s) {
  if (st.t >= s.horizon) throw Error(ErrorKind::InvalidArgument, "derivative needs t < T");
  if (std::isinf(lambda2)) return 0.0;
  const auto terms = aux_terms(levels(st, psi2, lambda2, s));
  const double n = sum_terms(terms, st, s, false);
  const double dn = sum_terms(terms, st, s, true);
  return dn / st.z - n / (st.z * st.z);
}

double conditional_value_given_lambda(double psi2, double lambda2, const Scenario& s) {
  const MarketState st = origin(s);
  return sum_terms(value_terms(levels(st, psi2, lambda2, s), s.prefs.p2), st, s, false);
}

double conditional_value(double psi2, double v2, const Scenario& s) {
  double x = free_capital(psi2, v2, s);
  if (x < -kNoFreeCapital * v2)
    throw InfeasibleCapital("position not affordable with this capital",
                            psi2 * s.illiquid.f0 + put_price_x_B(psi2, s), v2);
  if (x <= kNoFreeCapital * v2) x = 0.0;
  return conditional_value_given_lambda(psi2, solve_lambda2(x, psi2, s), s);
}

double feasible_psi_max(double v2, const Scenario& s) {
  const double cap = v2 / s.illiquid.f0;
  if (free_capital(cap, v2, s) >= 0.0) return cap;
  // x_B + psi F0 is convex in psi, so {psi : free capital >= 0} is an interval holding 0.
  double lo = 0.0, hi = cap;
  const double tol = 1e-10 * cap;
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (free_capital(mid, v2, s) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

UoWSolution solve_uow_fixed_psi(double v2, double psi2, const Scenario& s) {
  const double vmin = v2_min(s.constraints, s.market, s.horizon);
  if (v2 < vmin * (1.0 - 1e-12))
    throw InfeasibleCapital("wealth capital below its minimum", vmin, v2);
  UoWSolution out;
  out.v2 = v2;
  out.psi2_star = psi2;
  out.psi_max = psi2;
  out.boundary = v2 <= vmin * (1.0 + 1e-12) ? Boundary::AtMinimum : Boundary::Interior;
  out.case_tag = classify_case(psi2, s);
  out.x_b = put_price_x_B(psi2, s);
  double x = v2 - psi2 * s.illiquid.f0 - out.x_b;
  if (x < -kNoFreeCapital * v2)
    throw InfeasibleCapital("position not affordable with this capital",
                            psi2 * s.illiquid.f0 + out.x_b, v2);
  if (x <= kNoFreeCapital * v2) x = 0.0;
  out.x_tilde2 = x;
  out.lambda2 = solve_lambda2(x, psi2, s);
  if (x > 0.0) out.budget_residual = std::abs(aux_budget(psi2, out.lambda2, s) - x) / x;
  out.value = conditional_value_given_lambda(psi2, out.lambda2, s);
  return out;
}

UoWSolution optimize_psi2(double v2, const Scenario& s) {
  const double vmin = v2_min(s.constraints, s.market, s.horizon);
  if (v2 < vmin * (1.0 - 1e-12))
    throw InfeasibleCapital("wealth capital below its minimum", vmin, v2);
  if (classify_nonredundancy(s.market, s.illiquid) != Attractiveness::StrictlyAttractive)
    return solve_uow_fixed_psi(v2, 0.0, s);

  const double psi_max = feasible_psi_max(v2, s);
  if (!(psi_max > 0.0)) return solve_uow_fixed_psi(v2, 0.0, s);

  const int n = s.numerics.psi_grid;
  std::vector<double> grid(n), vals(n);
  int best = 0;
  for (int i = 0; i < n; ++i) {
    grid[i] = psi_max * static_cast<double>(i) / (n - 1);
    vals[i] = conditional_value(grid[i], v2, s);
    if (vals[i] > vals[best]) best = i;
  }
  double psi = grid[best];
  const double lo = grid[std::max(best - 1, 0)];
  const double hi = grid[std::min(best + 1, n - 1)];
  const auto refined = maximize_unimodal([&](double p) { return conditional_value(p, v2, s); },
                                         lo, hi);
  if (refined.second > vals[best]) psi = refined.first;

  UoWSolution out = solve_uow_fixed_psi(v2, psi, s);
  out.psi_max = psi_max;
  return out;
}

double uow_wealth(const MarketState& st, const UoWSolution& sol, const Scenario& s) {
  return put_value_X_B(st, sol.psi2_star, s) + auxiliary_wealth(st, sol.psi2_star, sol.lambda2, s);
}

double uow_wealth_dz(const MarketState& st, const UoWSolution& sol, const Scenario& s) {
  return put_value_dz(st, sol.psi2_star, s) +
         auxiliary_wealth_dz(st, sol.psi2_star, sol.lambda2, s);
}

double uow_strategy(const MarketState& st, const UoWSolution& sol, const Scenario& s) {
  if (!(st.t < s.horizon)) throw Error(ErrorKind::UndefinedStrategy, "strategy needs t < T");
  const double w = uow_wealth(st, sol, s);
  if (!(w > 0.0)) throw Error(ErrorKind::UndefinedStrategy, "zero terminal-wealth portfolio");
  return -s.gamma() * st.z / s.market.sigma * uow_wealth_dz(st, sol, s) / w;
}

double terminal_wealth_V2(double z_T, double f_T, const UoWSolution& sol, const Scenario& s) {
  double out = std::max(s.constraints.v_floor, sol.psi2_star * f_T);
  if (!std::isinf(sol.lambda2))
    out = std::max(out, std::exp(std::log(sol.lambda2 * z_T) / (s.prefs.p2 - 1.0)));
  return out;
}

}  // namespace fixterm
