#pragma once

#include <cstdint>
#include <vector>

#include "fixterm/error.hpp"

namespace fixterm {

// Black-Scholes market with one bank account and one liquid risky fund.
struct MarketSpec {
  double r = 0.03;
  double mu = 0.08;
  double sigma = 0.25;

  double gamma() const { return (mu - r) / sigma; }
  void validate() const;
};

// Fixed-term asset, bought at t = 0 only: dF = F (mu_f dt + sigma_f dW).
struct IlliquidSpec {
  double f0 = 1.0;
  double mu_f = 0.10;
  double sigma_f = 0.25;

  void validate() const;
};

// Power-utility exponents: U1(c) = c^p1 / p1, U2(v) = v^p2 / p2.
struct Preferences {
  double p1 = -2.0;
  double p2 = -1.0;

  void validate() const;
};

struct Constraints {
  double c_floor = 3.0;
  double v_floor = 80.0;

  void validate() const;
};

struct NumericsConfig {
  double bisect_tol = 1e-12;
  int quad_nodes = 64;
  int psi_grid = 65;
  double fd_rel_step = 1e-4;
  int mc_paths = 100000;
  int mc_steps = 64;
  std::uint64_t seed = 42;

  void validate() const;
};

struct Scenario {
  MarketSpec market;
  IlliquidSpec illiquid;
  Preferences prefs;
  Constraints constraints;
  double horizon = 3.0;
  double v0 = 100.0;
  NumericsConfig numerics;

  double gamma() const { return market.gamma(); }
  void validate() const;
};

// Table 1 base case: r=3%, mu=8%, sigma=25%, mu_F=10%, sigma_F=25%,
// c_floor=3, V_floor=80, T=3, v0=100, p1=-2, p2=-1.
Scenario base_scenario();

struct MarketState {
  double t = 0.0;
  double z = 1.0;  // pricing-kernel value
  double f = 1.0;  // fixed-term asset price
};

// Volatility below this routes every F-dependent formula to the deterministic branch.
inline constexpr double kDeterministicSigmaF = 1e-8;

inline bool deterministic_f(const IlliquidSpec& illiquid) {
  return illiquid.sigma_f < kDeterministicSigmaF;
}

double market_price_of_risk(double mu, double r, double sigma);

// exp(-(r + gamma^2/2) t - gamma w)
double pricing_kernel_value(double t, double w, const MarketSpec& market);

enum class Attractiveness { StrictlyAttractive, Indifferent, Redundant };

const char* to_string(Attractiveness a);

Attractiveness classify_nonredundancy(const MarketSpec& market, const IlliquidSpec& illiquid);

// F(t) on the path where Z(t) = z, i.e. f0 h(0,t) z^(-sigma_f/gamma).
double illiquid_price_from_kernel(double t, double z, const Scenario& s);

// Deterministic per-stream seed derivation (splitmix64 over seed and stream index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct PathSet {
  std::vector<double> times;  // shared grid, times[0] = 0
  std::size_t n_paths = 0;
  // Row-major [path][step], each of size n_paths * times.size().
  std::vector<double> w;
  std::vector<double> z;
  std::vector<double> f;
  std::uint64_t seed = 0;

  std::size_t n_times() const { return times.size(); }
  double at(const std::vector<double>& v, std::size_t path, std::size_t step) const {
    return v[path * times.size() + step];
  }
};

// Exact Brownian sampling on a uniform grid; Z and F from their closed forms.
PathSet simulate_paths(const Scenario& s, std::size_t n_paths, std::size_t n_steps,
                       std::uint64_t seed);

// Same, on an arbitrary increasing time grid starting at 0.
PathSet simulate_paths_on(const Scenario& s, std::vector<double> times, std::size_t n_paths,
                          std::uint64_t seed);

}  // namespace fixterm
