#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <random>

#include "fixterm/uoc.hpp"
#include "fixterm/xi.hpp"
#include "support.hpp"

using namespace fixterm;

namespace {

double xi_by_quadrature(const XiArgs& a) {
  const double tau = a.s - a.t;
  const double drift = std::log(a.z) - (a.r + 0.5 * a.gamma * a.gamma) * tau;
  const double vol = a.gamma * std::sqrt(tau);
  auto pay = [&](double g) {
    const double l = drift - vol * g;
    const double zs = std::exp(l);
    return (a.a < zs && zs < a.b) ? std::exp(a.k * l) : 0.0;
  };
  std::vector<double> cuts;
  if (a.a > 0.0 && std::isfinite(a.a)) cuts.push_back((drift - std::log(a.a)) / vol);
  if (a.b > 0.0 && std::isfinite(a.b)) cuts.push_back((drift - std::log(a.b)) / vol);
  return oracle::gauss_expect(pay, cuts);
}

XiArgs random_args(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  XiArgs a;
  a.s = 0.1 + 2.9 * u(rng);
  a.t = a.s * 0.9 * u(rng);
  a.z = std::exp(u(rng) - 0.5);
  a.k = -3.0 + 6.0 * u(rng);
  a.a = std::exp(-2.0 + 2.0 * u(rng));
  a.b = a.a * std::exp(0.2 + 2.0 * u(rng));
  return a;
}

}  // namespace

TEST(NormalCdf, KnownValues) {
  EXPECT_EQ(normal_cdf(0.0), 0.5);
  EXPECT_EQ(normal_cdf(kInf), 1.0);
  EXPECT_EQ(normal_cdf(-kInf), 0.0);
  EXPECT_NEAR(normal_cdf(1.96), 0.9750021048517795, 1e-15);
}

TEST(NormalCdf, MatchesBoostAcrossTheLine) {
  boost::math::normal_distribution<double> nd;
  for (double x = -38.0; x <= 9.0; x += 0.37) {
    EXPECT_NEAR(normal_cdf(x), boost::math::cdf(nd, x), 1e-15) << x;
    if (x < -1.0) EXPECT_LE(oracle::rel(normal_cdf(x), boost::math::cdf(nd, x)), 1e-12) << x;
  }
}

TEST(NormalCdf, DifferenceKeepsTailDigits) {
  boost::math::normal_distribution<double> nd;
  const double d = normal_cdf_diff(9.0, 10.0);
  const double ref = boost::math::cdf(boost::math::complement(nd, 9.0)) -
                     boost::math::cdf(boost::math::complement(nd, 10.0));
  EXPECT_LE(oracle::rel(d, ref), 1e-12);
  EXPECT_EQ(normal_cdf_diff(1.0, 1.0), 0.0);
}

TEST(DBar, Limits) {
  EXPECT_EQ(d_bar(0.0, 1.0, 0.0, 1.0, 0.03, 0.2), kInf);
  EXPECT_EQ(d_bar(kInf, 1.0, 0.0, 1.0, 0.03, 0.2), -kInf);
  EXPECT_NEAR(d_bar(1.0, 1.0, 0.0, 1.0, 0.03, 0.2), -0.25, 1e-15);
  EXPECT_THROW(d_bar(1.0, 1.0, 1.0, 1.0, 0.03, 0.2), Error);
}

TEST(Xi, Examples) {
  XiArgs a{3.0, 0.0, 1.0, 0.0, 0.0, kInf, 0.2, 0.03};
  EXPECT_NEAR(xi(a), 1.0, 1e-15);
  a.k = 1.0;
  EXPECT_NEAR(xi(a), std::exp(-0.09), 1e-14);
  a.a = 2.0;
  a.b = 1.0;
  EXPECT_EQ(xi(a), 0.0);
  a.b = 2.0;
  EXPECT_EQ(xi(a), 0.0);
}

TEST(Xi, DegenerateTimeIsIndicator) {
  XiArgs a{1.0, 1.0, 0.7, 2.0, 0.5, 1.0, 0.2, 0.03};
  EXPECT_NEAR(xi(a), 0.49, 1e-15);
  a.z = 1.5;
  EXPECT_EQ(xi(a), 0.0);
}

TEST(Xi, IntervalAdditivity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    XiArgs a = random_args(rng);
    const double lo = a.a, mid = a.a * std::exp(u(rng)), hi = i % 3 == 0 ? kInf : a.b + mid;
    XiArgs x = a, y = a, w = a;
    x.a = lo, x.b = mid;
    y.a = mid, y.b = hi;
    w.a = lo, w.b = hi;
    const double sum = xi(x) + xi(y);
    EXPECT_LE(std::abs(sum - xi(w)), 1e-12 * std::max(1.0, xi(w)));
  }
}

TEST(Xi, MatchesDirectQuadrature) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const XiArgs a = random_args(rng);
    const double q = xi_by_quadrature(a);
    EXPECT_LE(std::abs(xi(a) - q), 1e-10 * std::max(1.0, q)) << i;
  }
}

TEST(Xi, LargeExponentsStayFinite) {
  XiArgs a{30.0, 0.0, 1.0, 6.0, 0.0, kInf, 0.6, 0.05};
  EXPECT_TRUE(std::isfinite(xi(a)));
  a.k = -6.0;
  EXPECT_TRUE(std::isfinite(xi(a)));
  a.z = 1e-30;
  EXPECT_TRUE(std::isfinite(xi(a)));
}

TEST(XiDz, Examples) {
  XiArgs a{2.0, 0.5, 1.3, 0.0, 0.0, kInf, 0.2, 0.03};
  EXPECT_NEAR(xi_dz(a), 0.0, 1e-15);
  a.k = 1.0;
  EXPECT_NEAR(xi_dz(a), std::exp(-0.03 * 1.5), 1e-14);
  a.t = 2.0;
  EXPECT_THROW(xi_dz(a), Error);
}

TEST(XiDz, MatchesCentralDifferences) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    const XiArgs a = random_args(rng);
    const double h = 1e-6 * a.z;
    XiArgs p = a, m = a;
    p.z += h;
    m.z -= h;
    const double fd = (xi(p) - xi(m)) / (2 * h);
    const double an = xi_dz(a);
    EXPECT_LE(std::abs(an - fd), 1e-6 * std::max(std::abs(an), 1e-3 * xi(a) / a.z)) << i;
  }
}

TEST(HFactor, Examples) {
  const Scenario s = base_scenario();
  EXPECT_EQ(h_factor(1.3, 1.3, s.illiquid, s.market), 1.0);
  EXPECT_NEAR(h_factor(0.0, 3.0, s.illiquid, s.market), std::exp(0.01875), 1e-14);
  EXPECT_NEAR(h_factor(0.0, 3.0, s.illiquid, s.market), 1.018927, 1e-6);
  IlliquidSpec flat{1.0, 0.07, 0.0};
  EXPECT_NEAR(h_factor(0.5, 2.5, flat, s.market), std::exp(0.14), 1e-14);
  EXPECT_THROW(h_factor(2.0, 1.0, s.illiquid, s.market), Error);
}

TEST(Quadrature, RuleIsExactForPolynomials) {
  for (int n : {1, 2, 5, 16, 64}) {
    const auto& rule = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    EXPECT_NEAR(wsum, 2.0, 1e-13);
    const int deg = 2 * n - 1;
    const double got = integrate_gl([&](double x) { return std::pow(x, deg); }, 0.0, 1.0, n);
    EXPECT_NEAR(got, 1.0 / (deg + 1), 1e-13) << n;
  }
}

TEST(Quadrature, TimeIntegrals) {
  auto one = [](double) { return XiArgs{0.0, 0.0, 1.0, 0.0, 0.0, kInf, 0.2, 0.03}; };
  EXPECT_NEAR(integrate_xi_over_time(
                  [&](double t) {
                    XiArgs a = one(t);
                    a.s = t;
                    return a;
                  },
                  0.0, 3.0, 64),
              3.0, 1e-13);
  auto disc = [](double t) { return XiArgs{t, 0.0, 1.0, 1.0, 0.0, kInf, 0.2, 0.03}; };
  EXPECT_NEAR(integrate_xi_over_time(disc, 0.0, 3.0, 64), (1 - std::exp(-0.09)) / 0.03, 1e-12);
}

TEST(Quadrature, BudgetIntegrandSelfConverges) {
  Scenario s = base_scenario();
  const double lam = solve_lambda1(20.0, s);
  Scenario fine = s;
  fine.numerics.quad_nodes = 128;
  EXPECT_LE(oracle::rel(uoc_budget(lam, s), uoc_budget(lam, fine)), 1e-10);
}
