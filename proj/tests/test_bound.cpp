#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixterm/bound.hpp"
#include "fixterm/mc_oracle.hpp"
#include "fixterm/xi.hpp"
#include "support.hpp"

using namespace fixterm;

namespace {

// E[Z(T)/z (V - psi F(T))^+ | state] by Gaussian quadrature with the strike kink as a cut.
double put_by_quadrature(const MarketState& st, double psi, const Scenario& s) {
  auto pay = [&](double g) {
    const auto term = oracle::terminal(s, st.t, st.z, st.f, g);
    return term.ratio * std::max(s.constraints.v_floor - psi * term.f, 0.0);
  };
  return oracle::gauss_expect(pay, oracle::crossings([&](double g) {
                                return s.constraints.v_floor -
                                       psi * oracle::terminal(s, st.t, st.z, st.f, g).f;
                              }));
}

MarketState on_path(double t, double z, const Scenario& s) {
  return {t, z, illiquid_price_from_kernel(t, z, s)};
}

}  // namespace

TEST(PutPrice, Examples) {
  Scenario s = base_scenario();
  EXPECT_NEAR(put_price_x_B(0.0, s), 80.0 * std::exp(-0.09), 1e-12);
  EXPECT_NEAR(put_price_x_B(0.0, s), 73.1145, 1e-4);
  EXPECT_THROW(put_price_x_B(-1.0, s), Error);
  s.constraints.v_floor = 0.0;
  EXPECT_EQ(put_price_x_B(20.0, s), 0.0);
}

TEST(PutPrice, MatchesQuadrature) {
  for (double sf : {0.05, 0.1, 0.25, 0.6}) {
    Scenario s = base_scenario();
    s.illiquid.sigma_f = sf;
    for (double psi : {5.0, 20.0, 40.0, 60.0, 90.0}) {
      const double q = put_by_quadrature({0.0, 1.0, s.illiquid.f0}, psi, s);
      EXPECT_LE(std::abs(put_price_x_B(psi, s) - q), 1e-9 * 80.0) << sf << " " << psi;
    }
  }
}

TEST(PutPrice, MonteCarloAtFortyPercent) {
  const Scenario s = base_scenario();
  const double psi = 0.4 * s.v0 / s.illiquid.f0;
  const McReport m = mc_put_price(psi, s, 400000, 21, 1);
  EXPECT_LE(std::abs(put_price_x_B(psi, s) - m.estimate), 4 * m.std_error);
}

TEST(PutPrice, DerivativeInPsi) {
  const Scenario s = base_scenario();
  for (double psi : {1.0, 30.0, 70.0}) {
    const double h = 1e-5 * psi;
    const double fd = (put_price_x_B(psi + h, s) - put_price_x_B(psi - h, s)) / (2 * h);
    EXPECT_LE(oracle::rel(put_price_dpsi(psi, s), fd), 1e-6);
  }
}

TEST(PutPrice, BoundsAndMonotonicity) {
  const Scenario s = base_scenario();
  const double disc = std::exp(-0.09) * 80.0;
  // E[Z(T) F(T)]
  const double ezf = s.illiquid.f0 * std::exp((s.illiquid.mu_f - s.market.r -
                                               s.gamma() * s.illiquid.sigma_f) * s.horizon);
  double prev = kInf;
  for (int i = 0; i <= 60; ++i) {
    const double psi = 2.0 * i;
    const double x = put_price_x_B(psi, s);
    EXPECT_LE(x, prev + 1e-12);
    EXPECT_LE(x, disc + 1e-12);
    EXPECT_GE(x, std::max(disc - psi * ezf, 0.0) - 1e-12);
    prev = x;
  }
}

TEST(PutPrice, CostPlusPositionMonotoneUnlessAttractive) {
  // x_B(psi) + psi F0 has slope F0 (1 - e^{-rT} m(psi)) with m bounded by E[Z F]/F0 e^{rT};
  // it can only dip when F earns more than its market price.
  for (double muf : {0.05, 0.03 + 0.25 * 0.2}) {
    Scenario s = base_scenario();
    s.illiquid.mu_f = muf;
    double prev = -kInf;
    for (int i = 0; i <= 40; ++i) {
      const double psi = 3.0 * i;
      const double h = put_price_x_B(psi, s) + psi * s.illiquid.f0;
      EXPECT_GE(h, prev - 1e-10) << muf << " " << psi;
      prev = h;
    }
  }
  const Scenario base = base_scenario();
  EXPECT_LT(put_price_dpsi(0.0, base) + base.illiquid.f0, 0.0);
}

TEST(PutValue, InitialAndTerminal) {
  const Scenario s = base_scenario();
  for (double psi : {0.0, 10.0, 47.9}) {
    EXPECT_LE(oracle::rel(put_value_X_B({0.0, 1.0, s.illiquid.f0}, psi, s), put_price_x_B(psi, s)),
              1e-14);
  }
  EXPECT_EQ(put_value_X_B({3.0, 0.9, 2.0}, 40.0, s), 0.0);
  EXPECT_NEAR(put_value_X_B({3.0, 0.9, 1.5}, 40.0, s), 20.0, 1e-12);
}

TEST(PutValue, ConditionalRepricing) {
  const Scenario s = base_scenario();
  const double psi = 45.0;
  for (double t : {0.5, 1.7, 2.8})
    for (double z : {0.7, 1.0, 1.4}) {
      const MarketState st = on_path(t, z, s);
      const double closed = put_value_X_B(st, psi, s);
      EXPECT_LE(std::abs(closed - put_by_quadrature(st, psi, s)), 1e-9 * 80.0);
      const McReport m = mc_terminal(
          st, s, [&](double, double f) { return std::max(80.0 - psi * f, 0.0); }, true, 200000,
          derive_seed(9, static_cast<std::uint64_t>(100 * t + 10 * z)), 1);
      EXPECT_LE(std::abs(closed - m.estimate), 4 * m.std_error + 1e-12);
    }
}

TEST(PutStrategy, DeterministicAndDerivative) {
  Scenario det = base_scenario();
  det.illiquid.sigma_f = 0.0;
  EXPECT_EQ(put_replication_pi_B({1.0, 1.0, 1.1}, 40.0, det), 0.0);

  const Scenario s = base_scenario();
  const double e = illiquid_exponent(s);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double t = 2.9 * u(rng), z = std::exp(u(rng) - 0.5);
    const MarketState st = on_path(t, z, s);
    const double h = 1e-5 * z;
    auto moved = [&](double zz) { return MarketState{t, zz, st.f * std::pow(zz / z, -e)}; };
    const double fd =
        (put_value_X_B(moved(z + h), 45.0, s) - put_value_X_B(moved(z - h), 45.0, s)) / (2 * h);
    EXPECT_LE(oracle::rel(put_value_dz(st, 45.0, s), fd), 1e-5);
    const double x = put_value_X_B(st, 45.0, s);
    EXPECT_LE(std::abs(put_replication_pi_B(st, 45.0, s) +
                       s.gamma() * z * fd / (s.market.sigma * x)),
              1e-5 * std::max(1.0, std::abs(put_replication_pi_B(st, 45.0, s))));
  }
}

TEST(PutStrategy, DeepInTheMoneyIsBondMinusForward) {
  // f -> 0: X_B -> e^{-r tau} V - psi f (a bond less a forward on F); with F tied to z the
  // forward leg carries the fraction -(gamma / sigma) (sigma_f / gamma) psi f / X.
  const Scenario s = base_scenario();
  const double psi = 40.0, t = 1.0;
  const double z = 40.0;  // F(t) tiny on this path
  const MarketState st = on_path(t, z, s);
  const double x = put_value_X_B(st, psi, s);
  const double fwd = psi * st.f * h_factor(t, s.horizon, s.illiquid, s.market) *
                     std::pow(z, illiquid_exponent(s)) * xi({s.horizon, t, z, 1.0 - illiquid_exponent(s), 0.0, kInf, s.gamma(), s.market.r}) / z;
  EXPECT_LE(oracle::rel(x, 80.0 * std::exp(-0.03 * 2.0) - fwd), 1e-10);
  const double pi_limit = -(s.illiquid.sigma_f / s.market.sigma) * fwd / x;
  EXPECT_LE(std::abs(put_replication_pi_B(st, psi, s) - pi_limit), 1e-8);
}

TEST(PutStrategy, UndefinedWhenWorthless) {
  const Scenario s = base_scenario();
  EXPECT_THROW(put_replication_pi_B({3.0, 1.0, 1.0}, 40.0, s), Error);
  Scenario zero = s;
  zero.constraints.v_floor = 0.0;
  EXPECT_THROW(put_replication_pi_B({1.0, 1.0, 1.0}, 40.0, zero), Error);
}

TEST(PutDeterministic, BranchAndContinuity) {
  Scenario det = base_scenario();
  det.illiquid.sigma_f = 0.0;
  const double fwd = std::exp(0.3);
  EXPECT_NEAR(put_price_x_B(50.0, det), std::exp(-0.09) * (80.0 - 50.0 * fwd), 1e-12);
  EXPECT_EQ(put_price_x_B(80.0, det), 0.0);
  Scenario near = det;
  near.illiquid.sigma_f = 1e-7;
  for (double psi : {10.0, 50.0})
    EXPECT_LE(oracle::rel(put_price_x_B(psi, near), put_price_x_B(psi, det)), 1e-4);
}

TEST(PutHedge, ErrorShrinksWithSteps) {
  const Scenario s = base_scenario();
  const double coarse = mc_put_hedge_rms(45.0, s, 300, 16, 4, 1);
  const double fine = mc_put_hedge_rms(45.0, s, 300, 256, 4, 1);
  EXPECT_GT(coarse, 0.0);
  // sqrt(16) = 4 in theory; allow for the kink at the strike
  EXPECT_LT(fine, 0.5 * coarse);
  EXPECT_LT(fine, 0.02 * 80.0);
}
