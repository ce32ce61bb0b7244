#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixterm/commands.hpp"
#include "fixterm/mc_oracle.hpp"
#include "fixterm/policy.hpp"
#include "support.hpp"

using namespace fixterm;

namespace {

MarketState on_path(double t, double z, const Scenario& s) {
  return {t, z, illiquid_price_from_kernel(t, z, s)};
}

const PolicySolution& base_solution() {
  static const PolicySolution sol = solve_policy(base_scenario());
  return sol;
}

}  // namespace

TEST(Policy, AssemblyInvariants) {
  const Scenario s = base_scenario();
  const PolicySolution& sol = base_solution();
  EXPECT_EQ(sol.total_value, sol.uoc.value + sol.uow.value);
  EXPECT_EQ(sol.psi_star(), sol.uow.psi2_star);
  const Residuals r = budget_residuals(sol, s);
  EXPECT_LE(r.uoc, 1e-8);
  EXPECT_LE(r.uow, 1e-8);
  EXPECT_LE(sol.uoc.budget_residual, 1e-8);
  EXPECT_LE(sol.uow.budget_residual, 1e-8);
}

TEST(Policy, InfeasibleCapitalNamesMinimum) {
  Scenario s = base_scenario();
  s.v0 = 50.0;
  try {
    solve_policy(s);
    FAIL();
  } catch (const InfeasibleCapital& e) {
    EXPECT_NE(std::string(e.what()).find("81.72"), std::string::npos);
    EXPECT_NEAR(e.required(), 81.7213762946, 1e-8);
  }
}

TEST(Policy, MinimumCapitalConsumesTheFloor) {
  // With a non-attractive asset every leg sits on its boundary.
  Scenario s = base_scenario();
  s.illiquid.mu_f = 0.05;
  s.v0 = v0_min(s);
  const PolicySolution sol = solve_policy(s);
  EXPECT_EQ(sol.psi_star(), 0.0);
  for (double t : {0.0, 1.0, 2.5})
    for (double z : {0.5, 1.0, 2.0}) {
      const PolicyEvaluation ev = evaluate_policy(on_path(t, z, s), sol, s);
      EXPECT_EQ(ev.c_rate, s.constraints.c_floor);
      EXPECT_NEAR(ev.pi_fraction, 0.0, 1e-12);
    }
}

TEST(Policy, MinimumCapitalStillBuysAnAttractiveAsset) {
  // The floor put plus psi F0 costs less than the floor bond for small psi when F beats
  // its market price, so a position survives at v0_min.
  Scenario s = base_scenario();
  s.v0 = v0_min(s);
  const PolicySolution sol = solve_policy(s);
  EXPECT_GT(sol.psi_star(), 0.0);
  EXPECT_EQ(evaluate_policy(on_path(1.0, 1.0, s), sol, s).c_rate, s.constraints.c_floor);
}

TEST(Policy, EvaluateAtOrigin) {
  const Scenario s = base_scenario();
  const PolicySolution& sol = base_solution();
  const PolicyEvaluation ev = evaluate_policy({0.0, 1.0, s.illiquid.f0}, sol, s);
  EXPECT_LE(oracle::rel(ev.liquid_wealth, s.v0 - sol.psi_star() * s.illiquid.f0), 1e-8);
  EXPECT_THROW(evaluate_policy({3.0, 1.0, 1.0}, sol, s), Error);
}

TEST(Policy, FloorAndMergeAtRandomStates) {
  const Scenario s = base_scenario();
  const PolicySolution& sol = base_solution();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double t = 2.99 * u(rng), z = std::exp(3.0 * (u(rng) - 0.5));
    const MarketState st = on_path(t, z, s);
    const PolicyEvaluation ev = evaluate_policy(st, sol, s);
    ASSERT_GE(ev.c_rate, s.constraints.c_floor);
    ASSERT_GE(ev.liquid_wealth, 0.0);
    if (i % 50 == 0) {
      const double p1 = uoc_strategy(t, z, sol.uoc.lambda1, s);
      const double p2 = uow_strategy(st, sol.uow, s);
      const double merged = (p1 * ev.x1 + p2 * ev.x2) / ev.liquid_wealth;
      EXPECT_LE(std::abs(ev.pi_fraction - merged), 1e-10 * std::max(1.0, std::abs(merged)));
    }
  }
}

TEST(Policy, OsiwExamples) {
  Scenario s = base_scenario();
  s.illiquid.mu_f = 0.05;
  EXPECT_EQ(osiw(solve_policy(s), s), 0.0);
  s = base_scenario();
  s.horizon = 1.0;
  const double o = osiw(solve_policy(s), s);
  EXPECT_GE(o, 2.0 / 3.0 - 0.07);
  EXPECT_LE(o, 2.0 / 3.0 + 0.07);
}

TEST(Policy, OsiwHomotheticWhenExponentsAgree) {
  // With p1 = p2 the whole problem scales; with p1 != p2 the split does not (see README).
  Scenario s = base_scenario();
  s.prefs.p1 = s.prefs.p2 = -1.5;
  Scenario big = s;
  big.v0 *= 10;
  big.constraints.c_floor *= 10;
  big.constraints.v_floor *= 10;
  big.illiquid.f0 *= 10;
  EXPECT_NEAR(osiw(solve_policy(s), s), osiw(solve_policy(big), big), 1e-6);
}

TEST(Policy, LiquidOnlyBenchmark) {
  Scenario red = base_scenario();
  red.illiquid.mu_f = 0.05;
  EXPECT_EQ(liquid_only_value(red.v0, red), solve_policy(red).total_value);
  const Scenario s = base_scenario();
  EXPECT_LT(liquid_only_value(s.v0, s), base_solution().total_value);
  Scenario ind = base_scenario();
  ind.illiquid.mu_f = 0.08;
  EXPECT_LE(oracle::rel(liquid_only_value(ind.v0, ind), solve_policy(ind).total_value), 1e-8);
}

TEST(Policy, MetricsVanishAtIndifference) {
  Scenario s = base_scenario();
  s.illiquid.mu_f = 0.08;
  EXPECT_LE(std::abs(svf(s)), 1e-6);
  EXPECT_LE(std::abs(geug(s)), 1e-6);
  s = base_scenario();
  s.illiquid.sigma_f = 0.35;
  EXPECT_LE(std::abs(svf(s)), 1e-6);
  EXPECT_LE(std::abs(geug(s)), 1e-6);
}

TEST(Policy, MetricsPositiveWhenAttractive) {
  const Scenario s = base_scenario();
  const double a = svf(s), b = geug(s);
  EXPECT_GT(a, 0.0);
  EXPECT_GT(b, 0.0);
  // defining equations hold at the roots
  EXPECT_LE(oracle::rel(liquid_only_value(s.v0 * (1 + a), s), base_solution().total_value), 1e-7);
  Scenario up = s;
  up.constraints.v_floor *= 1 + b;
  EXPECT_LE(oracle::rel(solve_policy(up).total_value, liquid_only_value(s.v0, s)), 1e-7);
}

TEST(Policy, MonotoneTrends) {
  auto osiw_at = [](auto edit) {
    Scenario s = base_scenario();
    edit(s);
    return osiw(solve_policy(s), s);
  };
  double prev = kInf;
  for (double T : {1.0, 2.0, 3.0, 4.0}) {
    const double o = osiw_at([&](Scenario& s) { s.horizon = T; });
    EXPECT_LE(o, prev + 1e-12) << T;
    prev = o;
  }
  prev = -kInf;
  for (double dmu : {0.0, 0.005, 0.01, 0.015, 0.02}) {
    const double o = osiw_at([&](Scenario& s) { s.illiquid.mu_f = 0.08 + dmu; });
    EXPECT_GE(o, prev - 1e-12) << dmu;
    prev = o;
  }
  prev = kInf;
  for (double sf : {0.05, 0.15, 0.25, 0.30}) {
    const double o = osiw_at([&](Scenario& s) { s.illiquid.sigma_f = sf; });
    EXPECT_LE(o, prev + 1e-12) << sf;
    prev = o;
  }
}

TEST(Policy, MonteCarloOracle) {
  const Scenario s = base_scenario();
  const PolicySolution& sol = base_solution();
  const McReport m = mc_policy_check(sol, s, 20000, 64, 123, 0, 1);
  EXPECT_EQ(m.violations, 0u);
  EXPECT_LE(std::abs(m.estimate - sol.total_value), 4 * m.std_error);
  EXPECT_LE(std::abs(m.budget_estimate - s.v0), 4 * m.budget_std_error);
}
