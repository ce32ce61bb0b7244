#include "fixterm/mc_oracle.hpp"

#include <array>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "fixterm/bound.hpp"

namespace fixterm {

namespace {

constexpr std::size_t kChunkPairs = 4096;

// Running co-moments of (x, y), mergeable in a fixed order.
struct Moments {
  double n = 0.0, mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;

  void add(double x, double y) {
    n += 1.0;
    const double dx = x - mx;
    mx += dx / n;
    const double dy = y - my;
    my += dy / n;
    sxx += dx * (x - mx);
    syy += dy * (y - my);
    sxy += dx * (y - my);
  }

  void merge(const Moments& b) {
    if (b.n == 0.0) return;
    if (n == 0.0) {
      *this = b;
      return;
    }
    const double tot = n + b.n;
    const double dx = b.mx - mx, dy = b.my - my;
    const double w = n * b.n / tot;
    mx += dx * b.n / tot;
    my += dy * b.n / tot;
    sxx += b.sxx + dx * dx * w;
    syy += b.syy + dy * dy * w;
    sxy += b.sxy + dx * dy * w;
    n = tot;
  }

  double var_y() const { return n > 1.0 ? syy / (n - 1.0) : 0.0; }
  double var_x() const { return n > 1.0 ? sxx / (n - 1.0) : 0.0; }
};

struct ChunkOut {
  Moments m;
  std::size_t violations = 0;
  double sq_err = 0.0;
  std::vector<std::array<double, 3>> rows;  // response and two controls
};

// Regression estimate of E[y] with two controls of known mean. Returns {estimate, se}.
std::pair<double, double> controlled_mean(const std::vector<ChunkOut>& outs, double mu1,
                                          double mu2) {
  double n = 0.0, my = 0.0, m1 = 0.0, m2 = 0.0;
  for (const auto& o : outs)
    for (const auto& r : o.rows) {
      n += 1.0;
      my += (r[0] - my) / n;
      m1 += (r[1] - m1) / n;
      m2 += (r[2] - m2) / n;
    }
  double s11 = 0.0, s22 = 0.0, s12 = 0.0, s1y = 0.0, s2y = 0.0;
  for (const auto& o : outs)
    for (const auto& r : o.rows) {
      const double y = r[0] - my, a = r[1] - m1, b = r[2] - m2;
      s11 += a * a;
      s22 += b * b;
      s12 += a * b;
      s1y += a * y;
      s2y += b * y;
    }
  const double det = s11 * s22 - s12 * s12;
  double b1 = 0.0, b2 = 0.0;
  if (det > 1e-14 * s11 * s22) {
    b1 = (s22 * s1y - s12 * s2y) / det;
    b2 = (s11 * s2y - s12 * s1y) / det;
  } else if (s11 > 0.0) {
    b1 = s1y / s11;
  }
  double rss = 0.0;
  for (const auto& o : outs)
    for (const auto& r : o.rows) {
      const double e = (r[0] - my) - b1 * (r[1] - m1) - b2 * (r[2] - m2);
      rss += e * e;
    }
  const double est = my - b1 * (m1 - mu1) - b2 * (m2 - mu2);
  const double se = n > 3.0 ? std::sqrt(rss / (n - 3.0) / n) : 0.0;
  return {est, se};
}

// Splits n_units across fixed-size chunks, each with its own RNG stream, so results do not
// depend on the worker count. body(rng, units, out) fills one chunk.
template <class Body>
std::vector<ChunkOut> run_chunks(std::size_t n_units, std::size_t chunk, std::uint64_t seed,
                                 int workers, Body&& body) {
  const std::size_t n_chunks = (n_units + chunk - 1) / chunk;
  std::vector<ChunkOut> outs(n_chunks);
  parallel_for(n_chunks, workers, [&](std::size_t c) {
    std::mt19937_64 rng(derive_seed(seed, c));
    const std::size_t units = std::min(chunk, n_units - c * chunk);
    body(rng, units, outs[c]);
  });
  return outs;
}

Moments merged(const std::vector<ChunkOut>& outs) {
  Moments m;
  for (const auto& o : outs) m.merge(o.m);
  return m;
}

std::size_t pairs_for(std::size_t n) { return std::max<std::size_t>(1, (n + 1) / 2); }

}  // namespace

McReport mc_xi(const XiArgs& a, std::size_t n, std::uint64_t seed, int workers) {
  if (!(a.t < a.s)) throw Error(ErrorKind::InvalidArgument, "mc_xi requires t < s");
  const double tau = a.s - a.t;
  const double drift = -(a.r + 0.5 * a.gamma * a.gamma) * tau;
  const double vol = a.gamma * std::sqrt(tau);
  const double lz = std::log(a.z);
  auto payoff = [&](double g) {
    const double lzs = lz + drift - vol * g;
    const double zs = std::exp(lzs);
    if (!(a.a < zs && zs < a.b)) return 0.0;
    return std::exp(a.k * lzs);
  };
  const std::size_t np = pairs_for(n);
  auto outs = run_chunks(np, kChunkPairs, seed, workers,
                         [&](std::mt19937_64& rng, std::size_t units, ChunkOut& o) {
                           std::normal_distribution<double> nd;
                           for (std::size_t i = 0; i < units; ++i) {
                             const double g = nd(rng);
                             o.m.add(0.0, 0.5 * (payoff(g) + payoff(-g)));
                           }
                         });
  const Moments m = merged(outs);
  McReport r;
  r.estimate = m.my;
  r.std_error = std::sqrt(m.var_y() / m.n);
  r.n_samples = 2 * np;
  r.seed = seed;
  return r;
}

McReport mc_put_price(double psi2, const Scenario& s, std::size_t n, std::uint64_t seed,
                      int workers) {
  if (!(psi2 >= 0.0)) throw Error(ErrorKind::InvalidArgument, "psi2 must be non-negative");
  const double T = s.horizon, g = s.gamma(), r = s.market.r;
  const double sf = s.illiquid.sigma_f, muf = s.illiquid.mu_f, f0 = s.illiquid.f0;
  const double v = s.constraints.v_floor;
  const double sq = std::sqrt(T);
  auto sample = [&](double w, double& zt) {
    zt = std::exp(-(r + 0.5 * g * g) * T - g * sq * w);
    const double ft = f0 * std::exp((muf - 0.5 * sf * sf) * T + sf * sq * w);
    return zt * std::max(v - psi2 * ft, 0.0);
  };
  const std::size_t np = pairs_for(n);
  auto outs = run_chunks(np, kChunkPairs, seed, workers,
                         [&](std::mt19937_64& rng, std::size_t units, ChunkOut& o) {
                           std::normal_distribution<double> nd;
                           for (std::size_t i = 0; i < units; ++i) {
                             const double w = nd(rng);
                             double z1, z2;
                             const double y1 = sample(w, z1), y2 = sample(-w, z2);
                             o.m.add(0.5 * (z1 + z2), 0.5 * (y1 + y2));
                           }
                         });
  const Moments m = merged(outs);
  McReport rep;
  rep.n_samples = 2 * np;
  rep.seed = seed;
  const double mean_z = std::exp(-r * T);
  if (m.sxx > 0.0 && m.n > 2.0) {
    const double b = m.sxy / m.sxx;
    rep.estimate = m.my - b * (m.mx - mean_z);
    double ss = m.syy - m.sxy * m.sxy / m.sxx;
    // payoff exactly linear in Z(T) (deterministic F): what is left is cancellation noise
    if (ss <= 1e-12 * m.syy) ss = 0.0;
    rep.std_error = std::sqrt(ss / (m.n - 2.0) / m.n);
  } else {
    rep.estimate = m.my;
    rep.std_error = std::sqrt(m.var_y() / m.n);
  }
  return rep;
}

McReport mc_terminal(const MarketState& st, const Scenario& s, const TerminalFn& w, bool deflate,
                     std::size_t n, std::uint64_t seed, int workers) {
  const double tau = s.horizon - st.t;
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "mc_terminal needs t < T");
  const double g = s.gamma(), r = s.market.r;
  const double sf = s.illiquid.sigma_f, muf = s.illiquid.mu_f;
  const double sq = std::sqrt(tau);
  auto one = [&](double x) {
    const double ratio = std::exp(-(r + 0.5 * g * g) * tau - g * sq * x);
    const double zt = st.z * ratio;
    const double ft = st.f * std::exp((muf - 0.5 * sf * sf) * tau + sf * sq * x);
    const double val = w(zt, ft);
    return deflate ? ratio * val : val;
  };
  const std::size_t np = pairs_for(n);
  auto outs = run_chunks(np, kChunkPairs, seed, workers,
                         [&](std::mt19937_64& rng, std::size_t units, ChunkOut& o) {
                           std::normal_distribution<double> nd;
                           for (std::size_t i = 0; i < units; ++i) {
                             const double x = nd(rng);
                             o.m.add(0.0, 0.5 * (one(x) + one(-x)));
                           }
                         });
  const Moments m = merged(outs);
  McReport rep;
  rep.estimate = m.my;
  rep.std_error = std::sqrt(m.var_y() / m.n);
  rep.n_samples = 2 * np;
  rep.seed = seed;
  return rep;
}

namespace {

// Shared driver for the discrete hedges: walks (z, f, stock return) along a uniform grid.
struct HedgeStep {
  MarketState st;
  double dt;
  double stock_growth;  // S(t+dt)/S(t)
};

template <class Start, class Step, class Finish>
double hedge_rms(const Scenario& s, std::size_t n_paths, std::size_t n_steps, std::uint64_t seed,
                 int workers, Start&& start, Step&& step, Finish&& finish) {
  if (n_paths == 0 || n_steps == 0)
    throw Error(ErrorKind::InvalidArgument, "hedge simulation needs paths and steps");
  const double T = s.horizon, dt = T / static_cast<double>(n_steps);
  const double g = s.gamma(), r = s.market.r, mu = s.market.mu, sig = s.market.sigma;
  const double sf = s.illiquid.sigma_f, muf = s.illiquid.mu_f, f0 = s.illiquid.f0;
  auto outs = run_chunks(n_paths, 64, seed, workers,
                         [&](std::mt19937_64& rng, std::size_t units, ChunkOut& o) {
                           std::normal_distribution<double> nd;
                           for (std::size_t p = 0; p < units; ++p) {
                             double w = 0.0;
                             double x = start();
                             for (std::size_t k = 0; k < n_steps; ++k) {
                               const double t = dt * static_cast<double>(k);
                               const MarketState st{
                                   t, std::exp(-(r + 0.5 * g * g) * t - g * w),
                                   f0 * std::exp((muf - 0.5 * sf * sf) * t + sf * w)};
                               const double dw = std::sqrt(dt) * nd(rng);
                               const double growth =
                                   std::exp((mu - 0.5 * sig * sig) * dt + sig * dw);
                               x = step(x, HedgeStep{st, dt, growth});
                               w += dw;
                             }
                             const double zt = std::exp(-(r + 0.5 * g * g) * T - g * w);
                             const double ft = f0 * std::exp((muf - 0.5 * sf * sf) * T + sf * w);
                             const double e = x - finish(zt, ft);
                             o.sq_err += e * e;
                           }
                         });
  double sq = 0.0;
  for (const auto& o : outs) sq += o.sq_err;
  return std::sqrt(sq / static_cast<double>(n_paths));
}

}  // namespace

double mc_put_hedge_rms(double psi2, const Scenario& s, std::size_t n_paths, std::size_t n_steps,
                        std::uint64_t seed, int workers) {
  const double r = s.market.r, v = s.constraints.v_floor;
  return hedge_rms(
      s, n_paths, n_steps, seed, workers, [&] { return put_price_x_B(psi2, s); },
      [&](double x, const HedgeStep& h) {
        const double xb = put_value_X_B(h.st, psi2, s);
        const double risky = xb > 1e-14 ? put_replication_pi_B(h.st, psi2, s) * xb : 0.0;
        return risky * h.stock_growth + (x - risky) * std::exp(r * h.dt);
      },
      [&](double, double ft) { return std::max(v - psi2 * ft, 0.0); });
}

double mc_policy_hedge_rms(const PolicySolution& sol, const Scenario& s, std::size_t n_paths,
                           std::size_t n_steps, std::uint64_t seed, int workers) {
  const double r = s.market.r;
  const double psi = sol.psi_star();
  return hedge_rms(
      s, n_paths, n_steps, seed, workers, [&] { return sol.v0 - psi * s.illiquid.f0; },
      [&](double x, const HedgeStep& h) {
        const PolicyEvaluation ev = evaluate_policy(h.st, sol, s);
        const double risky = ev.pi_fraction * ev.liquid_wealth;
        return risky * h.stock_growth + (x - risky) * std::exp(r * h.dt) - ev.c_rate * h.dt;
      },
      [&](double zt, double ft) { return terminal_wealth_V2(zt, ft, sol.uow, s) - psi * ft; });
}

McReport mc_policy_check(const PolicySolution& sol, const Scenario& s, std::size_t n_paths,
                         std::size_t n_steps, std::uint64_t seed, std::size_t hedge_paths,
                         int workers) {
  if (n_paths == 0) throw Error(ErrorKind::InvalidArgument, "mc_policy_check needs paths");
  const double T = s.horizon, g = s.gamma(), r = s.market.r;
  const double sf = s.illiquid.sigma_f, muf = s.illiquid.mu_f, f0 = s.illiquid.f0;
  const double p1 = s.prefs.p1, p2 = s.prefs.p2, cf = s.constraints.c_floor;
  const double vf = s.constraints.v_floor, psi = sol.psi_star();

  // Consumption is sampled at the same nodes the closed forms integrate over.
  const auto& rule = gauss_legendre(s.numerics.quad_nodes);
  const int q = s.numerics.quad_nodes;
  const double umax = std::sqrt(T);
  std::vector<double> times, weights;
  for (int i = 0; i < q; ++i) {
    const double u = 0.5 * umax * (rule.nodes[i] + 1.0);
    times.push_back(u * u);
    weights.push_back(0.5 * umax * rule.weights[i] * 2.0 * u);
  }

  struct PathOut {
    double eu, spend, zt, ztft;
    bool violated;
  };
  auto path = [&](const std::vector<double>& gauss, double sign) {
    PathOut o{0.0, 0.0, 0.0, 0.0, false};
    double w = 0.0, prev = 0.0;
    for (int i = 0; i < q; ++i) {
      w += sign * std::sqrt(times[i] - prev) * gauss[i];
      prev = times[i];
      const double z = std::exp(-(r + 0.5 * g * g) * times[i] - g * w);
      const double c = optimal_consumption(times[i], z, sol.uoc.lambda1, s.prefs, cf);
      if (c < cf * (1.0 - 1e-12)) o.violated = true;
      o.eu += weights[i] * std::pow(c, p1) / p1;
      o.spend += weights[i] * z * c;
    }
    w += sign * std::sqrt(T - prev) * gauss[q];
    const double zt = std::exp(-(r + 0.5 * g * g) * T - g * w);
    const double ft = f0 * std::exp((muf - 0.5 * sf * sf) * T + sf * w);
    const double vt = terminal_wealth_V2(zt, ft, sol.uow, s);
    if (vt < vf * (1.0 - 1e-12)) o.violated = true;
    o.eu += std::pow(vt, p2) / p2;
    o.spend += zt * (vt - psi * ft) + psi * f0;
    o.zt = zt;
    o.ztft = zt * ft;
    return o;
  };

  const std::size_t np = pairs_for(n_paths);
  auto outs = run_chunks(np, 1024, seed, workers,
                         [&](std::mt19937_64& rng, std::size_t units, ChunkOut& o) {
                           std::normal_distribution<double> nd;
                           std::vector<double> gauss(q + 1);
                           for (std::size_t i = 0; i < units; ++i) {
                             for (auto& x : gauss) x = nd(rng);
                             const PathOut a = path(gauss, 1.0), b = path(gauss, -1.0);
                             o.violations += a.violated + b.violated;
                             o.m.add(0.5 * (a.spend + b.spend), 0.5 * (a.eu + b.eu));
                             o.rows.push_back({0.5 * (a.spend + b.spend), 0.5 * (a.zt + b.zt),
                                               0.5 * (a.ztft + b.ztft)});
                           }
                         });
  const Moments m = merged(outs);
  McReport rep;
  rep.estimate = m.my;
  rep.std_error = std::sqrt(m.var_y() / m.n);
  // Controls Z(T) and Z(T)F(T); F is not priced by Z, so the second mean carries its excess drift.
  const auto [b, b_se] =
      controlled_mean(outs, std::exp(-r * T), f0 * std::exp((muf - r - g * sf) * T));
  rep.budget_estimate = b;
  rep.budget_std_error = b_se;
  rep.n_samples = 2 * np;
  rep.seed = seed;
  for (const auto& o : outs) rep.violations += o.violations;
  if (hedge_paths > 0)
    rep.rms_hedge_error =
        mc_policy_hedge_rms(sol, s, hedge_paths, n_steps, derive_seed(seed, 0x4ed9e), workers);
  return rep;
}

}  // namespace fixterm
