#include "fixterm/market.hpp"

#include <cmath>
#include <random>
#include <string>

#include "fixterm/xi.hpp"

namespace fixterm {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidSpec, what);
}

}  // namespace

void MarketSpec::validate() const {
  require(std::isfinite(r) && r > 0.0, "market.r must be positive");
  require(std::isfinite(mu), "market.mu must be finite");
  require(std::isfinite(sigma) && sigma > 0.0, "market.sigma must be positive");
}

void IlliquidSpec::validate() const {
  require(std::isfinite(f0) && f0 > 0.0, "illiquid.f0 must be positive");
  require(std::isfinite(mu_f), "illiquid.mu_f must be finite");
  require(std::isfinite(sigma_f) && sigma_f >= 0.0, "illiquid.sigma_f must be non-negative");
}

void Preferences::validate() const {
  require(std::isfinite(p1) && p1 < 1.0 && p1 != 0.0, "prefs.p1 must lie in (-inf, 1) \\ {0}");
  require(std::isfinite(p2) && p2 < 1.0 && p2 != 0.0, "prefs.p2 must lie in (-inf, 1) \\ {0}");
}

void Constraints::validate() const {
  require(std::isfinite(c_floor) && c_floor > 0.0, "constraints.c_floor must be positive");
  require(std::isfinite(v_floor) && v_floor > 0.0, "constraints.v_floor must be positive");
}

void NumericsConfig::validate() const {
  require(bisect_tol > 0.0 && bisect_tol < 1.0, "numerics.bisect_tol must lie in (0, 1)");
  require(fd_rel_step > 0.0 && fd_rel_step < 1.0, "numerics.fd_rel_step must lie in (0, 1)");
  require(quad_nodes >= 1, "numerics.quad_nodes must be >= 1");
  require(psi_grid >= 3, "numerics.psi_grid must be >= 3");
  require(mc_paths >= 1, "numerics.mc_paths must be >= 1");
  require(mc_steps >= 1, "numerics.mc_steps must be >= 1");
}

void Scenario::validate() const {
  market.validate();
  illiquid.validate();
  prefs.validate();
  constraints.validate();
  numerics.validate();
  require(std::isfinite(horizon) && horizon > 0.0, "run.T must be positive");
  require(std::isfinite(v0) && v0 > 0.0, "run.v0 must be positive");
  // Every closed form divides by gamma; the case analysis assumes gamma > 0.
  require(market.gamma() > 0.0, "market price of risk (mu - r) / sigma must be positive");
}

Scenario base_scenario() { return Scenario{}; }

double market_price_of_risk(double mu, double r, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidSpec, "sigma must be positive");
  return (mu - r) / sigma;
}

double pricing_kernel_value(double t, double w, const MarketSpec& market) {
  const double g = market.gamma();
  return std::exp(-(market.r + 0.5 * g * g) * t - g * w);
}

const char* to_string(Attractiveness a) {
  switch (a) {
    case Attractiveness::StrictlyAttractive:
      return "strictly_attractive";
    case Attractiveness::Indifferent:
      return "indifferent";
    case Attractiveness::Redundant:
      return "redundant";
  }
  return "?";
}

Attractiveness classify_nonredundancy(const MarketSpec& market, const IlliquidSpec& illiquid) {
  // Compare mu_f - r against sigma_f * gamma, which also covers sigma_f = 0.
  const double excess = illiquid.mu_f - market.r;
  const double required = illiquid.sigma_f * market.gamma();
  const double scale = std::max({std::abs(excess), std::abs(required), 1e-300});
  if (std::abs(excess - required) <= 1e-12 * scale) return Attractiveness::Indifferent;
  return excess > required ? Attractiveness::StrictlyAttractive : Attractiveness::Redundant;
}

double illiquid_price_from_kernel(double t, double z, const Scenario& s) {
  const double h = h_factor(0.0, t, s.illiquid, s.market);
  if (deterministic_f(s.illiquid)) return s.illiquid.f0 * h;
  return s.illiquid.f0 * h * std::exp(-(s.illiquid.sigma_f / s.gamma()) * std::log(z));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

PathSet simulate_paths_on(const Scenario& s, std::vector<double> times, std::size_t n_paths,
                          std::uint64_t seed) {
  if (n_paths == 0 || times.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "simulate_paths needs at least one path and one step");
  if (times.front() != 0.0) throw Error(ErrorKind::InvalidArgument, "time grid must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "time grid must be strictly increasing");

  PathSet out;
  out.n_paths = n_paths;
  out.seed = seed;
  const std::size_t m = times.size();
  out.w.resize(n_paths * m);
  out.z.resize(n_paths * m);
  out.f.resize(n_paths * m);

  const double g = s.gamma();
  const double mu_f = s.illiquid.mu_f;
  const double sf = s.illiquid.sigma_f;
  for (std::size_t p = 0; p < n_paths; ++p) {
    std::mt19937_64 rng(derive_seed(seed, p));
    std::normal_distribution<double> normal;
    double w = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (k > 0) w += std::sqrt(times[k] - times[k - 1]) * normal(rng);
      const double t = times[k];
      out.w[p * m + k] = w;
      out.z[p * m + k] = pricing_kernel_value(t, w, s.market);
      out.f[p * m + k] = s.illiquid.f0 * std::exp((mu_f - 0.5 * sf * sf) * t + sf * w);
    }
  }
  (void)g;
  out.times = std::move(times);
  return out;
}

PathSet simulate_paths(const Scenario& s, std::size_t n_paths, std::size_t n_steps,
                       std::uint64_t seed) {
  if (n_paths == 0 || n_steps == 0)
    throw Error(ErrorKind::InvalidArgument, "simulate_paths needs at least one path and one step");
  std::vector<double> times(n_steps + 1);
  for (std::size_t k = 0; k <= n_steps; ++k)
    times[k] = s.horizon * static_cast<double>(k) / static_cast<double>(n_steps);
  times.back() = s.horizon;
  return simulate_paths_on(s, std::move(times), n_paths, seed);
}

}  // namespace fixterm
