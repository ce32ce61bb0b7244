#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "fixterm/parallel.hpp"
#include "fixterm/policy.hpp"
#include "fixterm/xi.hpp"

namespace fixterm {

struct McReport {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  std::size_t violations = 0;
  double rms_hedge_error = 0.0;
  // policy check only: deflated total spend, compared with v0
  double budget_estimate = 0.0;
  double budget_std_error = 0.0;
};

// Antithetic estimate of E[Z(s)^k 1{a < Z(s) < b} | Z(t) = z].
McReport mc_xi(const XiArgs& args, std::size_t n, std::uint64_t seed,
               int workers = default_workers());

// Antithetic estimate of E[Z(T) (V_floor - psi2 F(T))^+] with Z(T) as control variate.
McReport mc_put_price(double psi2, const Scenario& s, std::size_t n, std::uint64_t seed,
                      int workers = default_workers());

// E[w(Z(T), F(T)) | state], times Z(T)/z when deflate is set (i.e. the time-t price).
using TerminalFn = std::function<double(double z_T, double f_T)>;
McReport mc_terminal(const MarketState& st, const Scenario& s, const TerminalFn& w, bool deflate,
                     std::size_t n, std::uint64_t seed, int workers = default_workers());

// Discrete delta hedge of the floor put: RMS of hedge P&L minus payoff at T.
double mc_put_hedge_rms(double psi2, const Scenario& s, std::size_t n_paths, std::size_t n_steps,
                        std::uint64_t seed, int workers = default_workers());

// Discrete delta hedge of the whole liquid portfolio including consumption withdrawals.
double mc_policy_hedge_rms(const PolicySolution& sol, const Scenario& s, std::size_t n_paths,
                           std::size_t n_steps, std::uint64_t seed,
                           int workers = default_workers());

// End-to-end check of a solved policy: expected utility (estimate), deflated budget,
// constraint violations, and hedge RMS (skipped when hedge_paths == 0).
McReport mc_policy_check(const PolicySolution& sol, const Scenario& s, std::size_t n_paths,
                         std::size_t n_steps, std::uint64_t seed, std::size_t hedge_paths = 256,
                         int workers = default_workers());

}  // namespace fixterm
