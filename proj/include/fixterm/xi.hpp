#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "fixterm/market.hpp"

namespace fixterm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_cdf(double x);
double normal_pdf(double x);

// Phi(hi) - Phi(lo), taken on whichever tail keeps the digits.
double normal_cdf_diff(double lo, double hi);

// (ln(z/x) - (r + gamma^2/2)(s - t)) / (gamma sqrt(s - t)); +inf at x = 0, -inf at x = +inf.
double d_bar(double x, double s, double t, double z, double r, double gamma);

struct XiArgs {
  double s = 0.0;
  double t = 0.0;
  double z = 1.0;
  double k = 0.0;
  double a = 0.0;
  double b = kInf;
  double gamma = 0.2;
  double r = 0.03;
};

// E[Z(s)^k 1{a < Z(s) < b} | Z(t) = z]
double xi(const XiArgs& x);

// d xi / dz. Requires t < s.
double xi_dz(const XiArgs& x);

// exp((mu_f - sigma_f^2/2 - sigma_f r/gamma - sigma_f gamma/2)(t2 - t1))
double h_factor(double t1, double t2, const IlliquidSpec& illiquid, const MarketSpec& market);

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Cached per n; the reference stays valid for the life of the process.
const GaussLegendreRule& gauss_legendre(int n);

// Plain Gauss-Legendre on [lo, hi].
double integrate_gl(const std::function<double(double)>& f, double lo, double hi, int n);

// Integrates f(s) over [lo, hi] after s = lo + u^2, which turns the sqrt(s - lo)
// behaviour of conditional moments near s = lo into something polynomial in u.
double integrate_over_time(const std::function<double(double)>& f, double lo, double hi, int n);

double integrate_xi_over_time(const std::function<XiArgs(double)>& builder, double t_lo,
                              double t_hi, int quad_n);

}  // namespace fixterm
