#include "fixterm/xi.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace fixterm {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_args(const XiArgs& x) {
  if (!(x.z > 0.0) || !(x.t <= x.s) || x.t < 0.0 || !(x.a >= 0.0) || !(x.b >= 0.0) ||
      !(x.gamma > 0.0) || !std::isfinite(x.k))
    throw Error(ErrorKind::InvalidArgument, "xi: arguments outside the domain");
}

double log_prefactor(const XiArgs& x, double tau) {
  const double g2 = x.gamma * x.gamma;
  return x.k * std::log(x.z) - x.k * (x.r + 0.5 * g2) * tau + 0.5 * x.k * x.k * g2 * tau;
}

// Product exp(lp) * m for m >= 0 without forming an overflowing exp(lp).
double scaled(double lp, double m) {
  if (m == 0.0) return 0.0;
  return std::exp(lp + std::log(m));
}

}  // namespace

double normal_cdf(double x) {
  if (x == kInf) return 1.0;
  if (x == -kInf) return 0.0;
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double normal_pdf(double x) {
  if (std::isinf(x)) return 0.0;
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf_diff(double lo, double hi) {
  if (!(lo < hi)) return 0.0;
  if (lo >= 0.0) return normal_cdf(-lo) - normal_cdf(-hi);
  if (hi <= 0.0) return normal_cdf(hi) - normal_cdf(lo);
  return 1.0 - normal_cdf(lo) - normal_cdf(-hi);
}

double d_bar(double x, double s, double t, double z, double r, double gamma) {
  if (!(t < s)) throw Error(ErrorKind::InvalidArgument, "d_bar requires t < s");
  if (!(x >= 0.0)) throw Error(ErrorKind::InvalidArgument, "d_bar requires x >= 0");
  if (x == 0.0) return kInf;
  if (x == kInf) return -kInf;
  const double tau = s - t;
  return (std::log(z / x) - (r + 0.5 * gamma * gamma) * tau) / (gamma * std::sqrt(tau));
}

double xi(const XiArgs& x) {
  check_args(x);
  if (!(x.a < x.b)) return 0.0;
  const double tau = x.s - x.t;
  if (tau == 0.0) return (x.a < x.z && x.z < x.b) ? std::exp(x.k * std::log(x.z)) : 0.0;
  const double shift = x.k * x.gamma * std::sqrt(tau);
  const double hi = d_bar(x.a, x.s, x.t, x.z, x.r, x.gamma) + shift;
  const double lo = d_bar(x.b, x.s, x.t, x.z, x.r, x.gamma) + shift;
  return scaled(log_prefactor(x, tau), normal_cdf_diff(lo, hi));
}

double xi_dz(const XiArgs& x) {
  check_args(x);
  const double tau = x.s - x.t;
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "xi_dz requires t < s");
  if (!(x.a < x.b)) return 0.0;
  const double sq = x.gamma * std::sqrt(tau);
  const double shift = x.k * sq;
  const double hi = d_bar(x.a, x.s, x.t, x.z, x.r, x.gamma) + shift;
  const double lo = d_bar(x.b, x.s, x.t, x.z, x.r, x.gamma) + shift;
  const double lp = log_prefactor(x, tau);
  double out = 0.0;
  if (x.k != 0.0) out += (x.k / x.z) * scaled(lp, normal_cdf_diff(lo, hi));
  // density terms carry sign, so split them
  const double edge = std::exp(lp) / (x.z * sq);
  const double pa = normal_pdf(hi), pb = normal_pdf(lo);
  if (pa != 0.0) out += edge * pa;
  if (pb != 0.0) out -= edge * pb;
  return out;
}

double h_factor(double t1, double t2, const IlliquidSpec& illiquid, const MarketSpec& market) {
  if (t1 > t2) throw Error(ErrorKind::InvalidArgument, "h_factor requires t1 <= t2");
  const double sf = illiquid.sigma_f;
  double rate = illiquid.mu_f;
  if (sf != 0.0) {
    const double g = market.gamma();
    rate += -0.5 * sf * sf - sf * market.r / g - 0.5 * sf * g;
  }
  return std::exp(rate * (t2 - t1));
}

namespace {

GaussLegendreRule build_rule(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute the derivative at the converged root for the weight
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "quadrature needs at least one node");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendreRule>(build_rule(n));
  return *slot;
}

double integrate_gl(const std::function<double(double)>& f, double lo, double hi, int n) {
  if (lo > hi) throw Error(ErrorKind::InvalidArgument, "integration bounds reversed");
  if (lo == hi) return 0.0;
  const auto& rule = gauss_legendre(n);
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

double integrate_over_time(const std::function<double(double)>& f, double lo, double hi, int n) {
  if (lo > hi) throw Error(ErrorKind::InvalidArgument, "integration bounds reversed");
  if (lo == hi) return 0.0;
  const double umax = std::sqrt(hi - lo);
  return integrate_gl(
      [&](double u) {
        const double s = std::min(hi, lo + u * u);
        return 2.0 * u * f(s);
      },
      0.0, umax, n);
}

double integrate_xi_over_time(const std::function<XiArgs(double)>& builder, double t_lo,
                              double t_hi, int quad_n) {
  return integrate_over_time([&](double s) { return xi(builder(s)); }, t_lo, t_hi, quad_n);
}

}  // namespace fixterm
