#pragma once

// Reference integrators for tests. They use Boost's adaptive Gauss-Kronrod and a plain
// Gaussian change of variables, and share nothing with the library's closed forms.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fixterm/market.hpp"

namespace oracle {

inline double rel(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline double phi(double g) { return std::exp(-0.5 * g * g) / std::sqrt(2.0 * M_PI); }

// Integral of f over [lo, hi] split at the given interior points.
inline double integrate(const std::function<double(double)>& f, double lo, double hi,
                        std::vector<double> cuts = {}) {
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = std::max(lo, cuts[i]), b = std::min(hi, cuts[i + 1]);
    if (!(b > a)) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-13);
  }
  return total;
}

// E[f(G)] for a standard normal G, with known kinks of f passed as cuts.
inline double gauss_expect(const std::function<double(double)>& f, std::vector<double> cuts = {}) {
  const double L = 12.0;
  for (auto& c : cuts) c = std::clamp(c, -L, L);
  return integrate([&](double g) { return f(g) * phi(g); }, -L, L, cuts);
}

// Terminal state on the path whose standardised Gaussian over [t, T] is g.
struct Terminal {
  double ratio;  // Z(T) / Z(t)
  double z;
  double f;
};

inline Terminal terminal(const fixterm::Scenario& s, double t, double z, double f, double g) {
  const double tau = s.horizon - t, gam = s.gamma(), r = s.market.r;
  const double sf = s.illiquid.sigma_f, muf = s.illiquid.mu_f;
  const double ratio = std::exp(-(r + 0.5 * gam * gam) * tau - gam * std::sqrt(tau) * g);
  return {ratio, z * ratio, f * std::exp((muf - 0.5 * sf * sf) * tau + sf * std::sqrt(tau) * g)};
}

// Crossing points of h on a fine grid in g, refined by bisection. Used to hand kinks to the
// integrator without knowing where the piecewise envelope switches branches.
inline std::vector<double> crossings(const std::function<double(double)>& h) {
  std::vector<double> out;
  const int n = 4000;
  double prev_g = -12.0, prev = h(prev_g);
  for (int i = 1; i <= n; ++i) {
    const double g = -12.0 + 24.0 * i / n;
    const double cur = h(g);
    if ((prev > 0.0) != (cur > 0.0)) {
      double a = prev_g, b = g, fa = prev;
      for (int k = 0; k < 100; ++k) {
        const double m = 0.5 * (a + b), fm = h(m);
        if ((fm > 0.0) == (fa > 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      out.push_back(0.5 * (a + b));
    }
    prev_g = g;
    prev = cur;
  }
  return out;
}

}  // namespace oracle
