#include "fixterm/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "fixterm/bound.hpp"
#include "fixterm/mc_oracle.hpp"
#include "fixterm/parallel.hpp"
#include "fixterm/uoc.hpp"
#include "fixterm/uow.hpp"
#include "fixterm/xi.hpp"

namespace fixterm {

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InfeasibleCapital:
      return kExitInfeasible;
    case ErrorKind::NumericalFailure:
    case ErrorKind::UndefinedStrategy:
      return kExitNumerical;
    default:
      return kExitUsage;
  }
}

std::string format_csv(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string status_of(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InfeasibleCapital:
      return "infeasible";
    case ErrorKind::NumericalFailure:
    case ErrorKind::UndefinedStrategy:
      return "numerical_failure";
    default:
      return "invalid";
  }
}

}  // namespace

Residuals budget_residuals(const PolicySolution& sol, const Scenario& s) {
  Residuals r;
  const double v1 = sol.uoc.v1;
  if (!std::isinf(sol.uoc.lambda1) && v1 > 0.0)
    r.uoc = std::abs(uoc_budget(sol.uoc.lambda1, s) - v1) / v1;
  const double x = sol.uow.x_tilde2;
  if (x > 0.0 && !std::isinf(sol.uow.lambda2)) {
    const MarketState origin{0.0, 1.0, s.illiquid.f0};
    r.uow = std::abs(auxiliary_wealth(origin, sol.uow.psi2_star, sol.uow.lambda2, s) - x) / x;
  }
  return r;
}

std::string solve_csv_header() {
  return "v0_min,v1_star,v2_star,psi_star,osiw,x_b,lambda1,lambda2,value,case_tag,"
         "uoc_residual,uow_residual";
}

std::string solve_csv_row(const PolicySolution& sol, const Scenario& s) {
  const Residuals r = budget_residuals(sol, s);
  std::string row;
  for (double x : {sol.v0_min, sol.split.v1_star, sol.split.v2_star, sol.psi_star(),
                   osiw(sol, s), sol.uow.x_b, sol.uoc.lambda1, sol.uow.lambda2, sol.total_value})
    row += format_csv(x) + ",";
  row += std::string(to_string(sol.uow.case_tag)) + "," + format_csv(r.uoc) + "," +
         format_csv(r.uow);
  return row;
}

std::string run_solve(const Scenario& s) {
  const PolicySolution sol = solve_policy(s);
  return solve_csv_header() + "\n" + solve_csv_row(sol, s) + "\n";
}

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> p{"T",  "r",  "mu",      "sigma",   "mu_f", "sigma_f",
                                          "p1", "p2", "c_floor", "v_floor", "v0"};
  return p;
}

const std::vector<std::string>& sweep_outputs() {
  static const std::vector<std::string> o{"osiw",     "svf",     "geug",   "value",
                                          "psi_star", "v1_star", "v2_star"};
  return o;
}

Scenario with_parameter(const Scenario& s, const std::string& name, double value) {
  Scenario c = s;
  if (name == "T") c.horizon = value;
  else if (name == "r") c.market.r = value;
  else if (name == "mu") c.market.mu = value;
  else if (name == "sigma") c.market.sigma = value;
  else if (name == "mu_f") c.illiquid.mu_f = value;
  else if (name == "sigma_f") c.illiquid.sigma_f = value;
  else if (name == "p1") c.prefs.p1 = value;
  else if (name == "p2") c.prefs.p2 = value;
  else if (name == "c_floor") c.constraints.c_floor = value;
  else if (name == "v_floor") c.constraints.v_floor = value;
  else if (name == "v0") c.v0 = value;
  else throw Error(ErrorKind::InvalidArgument, "unknown sweep parameter '" + name + "'");
  return c;
}

std::string run_sweep(const Scenario& s, const SweepSpec& spec, int workers) {
  // validate names up front so a typo does not look like a per-row failure
  with_parameter(s, spec.parameter, 0.0);
  for (const auto& o : spec.outputs)
    if (std::find(sweep_outputs().begin(), sweep_outputs().end(), o) == sweep_outputs().end())
      throw Error(ErrorKind::InvalidArgument, "unknown sweep output '" + o + "'");

  std::vector<std::string> blocks(spec.grid.size());
  parallel_for(spec.grid.size(), workers, [&](std::size_t i) {
    const double v = spec.grid[i];
    const std::string prefix = spec.parameter + "," + format_csv(v) + ",";
    std::string block;
    if (spec.outputs.empty()) return;
    Scenario c;
    try {
      c = with_parameter(s, spec.parameter, v);
      c.validate();
    } catch (const Error& e) {
      for (const auto& o : spec.outputs)
        block += prefix + o + ",," + status_of(e) + "," + csv_field(e.what()) + "\n";
      blocks[i] = block;
      return;
    }
    bool solved = false;
    PolicySolution sol;
    std::string solve_err, solve_status;
    for (const auto& o : spec.outputs) {
      std::string result, status = "ok", diag;
      try {
        if (o == "svf") {
          result = format_csv(svf(c));
        } else if (o == "geug") {
          result = format_csv(geug(c));
        } else {
          if (!solved && solve_status.empty()) {
            try {
              sol = solve_policy(c);
              solved = true;
            } catch (const Error& e) {
              solve_status = status_of(e);
              solve_err = e.what();
            }
          }
          if (!solved) {
            status = solve_status;
            diag = solve_err;
          } else {
            double x = 0.0;
            if (o == "osiw") x = osiw(sol, c);
            else if (o == "value") x = sol.total_value;
            else if (o == "psi_star") x = sol.psi_star();
            else if (o == "v1_star") x = sol.split.v1_star;
            else x = sol.split.v2_star;
            result = format_csv(x);
            diag = std::string("case=") + to_string(sol.uow.case_tag) +
                   (sol.split.projected ? ";split=corner" : ";split=interior");
          }
        }
      } catch (const Error& e) {
        status = status_of(e);
        diag = e.what();
      }
      block += prefix + o + "," + result + "," + status + "," + csv_field(diag) + "\n";
    }
    blocks[i] = block;
  });
  std::string out = "parameter,value,metric,result,status,diagnostics\n";
  for (const auto& b : blocks) out += b;
  return out;
}

std::string run_svf(const Scenario& s) {
  return "metric,result\nsvf," + format_csv(svf(s)) + "\n";
}

std::string run_geug(const Scenario& s) {
  return "metric,result\ngeug," + format_csv(geug(s)) + "\n";
}

bool ValidateReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::string ValidateReport::csv() const {
  std::string out = "check,status,seed,detail\n";
  for (const auto& c : checks)
    out += c.name + "," + (c.pass ? "PASS" : "FAIL") + "," + std::to_string(c.seed) + "," +
           csv_field(c.detail) + "\n";
  return out;
}

namespace {

// |a - b| <= 4 se, with a relative floor so zero-variance estimators compare exactly.
bool within_4se(double closed, double est, double se) {
  return std::abs(closed - est) <= 4.0 * se + 1e-12 * std::max(1.0, std::abs(closed));
}

std::string gate_detail(double closed, double est, double se) {
  return "closed=" + format_csv(closed) + " mc=" + format_csv(est) + " se=" + format_csv(se);
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

ValidateReport run_validate(const Scenario& s, const ValidateOptions& opt) {
  s.validate();
  ValidateReport rep;
  const std::uint64_t seed = s.numerics.seed;
  const std::size_t n = static_cast<std::size_t>(s.numerics.mc_paths);
  const double g = s.gamma(), r = s.market.r;
  std::uint64_t stream = 0;

  // kernel spot checks at seeded random arguments
  {
    std::mt19937_64 rng(derive_seed(seed, 1000));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 3; ++i) {
      XiArgs a;
      a.gamma = g;
      a.r = r;
      a.s = 0.2 + 2.8 * u(rng);
      a.t = a.s * 0.8 * u(rng);
      a.z = std::exp(u(rng) - 0.5);
      a.k = -3.0 + 6.0 * u(rng);
      a.a = std::exp(-1.5 + u(rng));
      a.b = a.a * std::exp(0.5 + 1.5 * u(rng));
      const std::uint64_t sd = derive_seed(seed, ++stream);
      const McReport m = mc_xi(a, n, sd, opt.workers);
      const double c = xi(a);
      rep.checks.push_back({"mc_xi_" + std::to_string(i), within_4se(c, m.estimate, m.std_error),
                            gate_detail(c, m.estimate, m.std_error), sd});
    }
  }

  PolicySolution sol;
  try {
    sol = solve_policy(s);
  } catch (const Error& e) {
    rep.checks.push_back({"solve", false, e.what(), seed});
    return rep;
  }
  {
    const Residuals res = budget_residuals(sol, s);
    rep.checks.push_back({"budget_residuals", res.uoc <= 1e-8 && res.uow <= 1e-8,
                          "uoc=" + format_csv(res.uoc) + " uow=" + format_csv(res.uow), seed});
  }

  // floor put at two positions
  for (double psi : {0.2 * s.v0 / s.illiquid.f0, sol.psi_star()}) {
    const std::uint64_t sd = derive_seed(seed, ++stream);
    const McReport m = mc_put_price(psi, s, n, sd, opt.workers);
    const double c = put_price_x_B(psi, s);
    rep.checks.push_back({"mc_put_price_psi=" + format_csv(psi),
                          within_4se(c, m.estimate, m.std_error),
                          gate_detail(c, m.estimate, m.std_error), sd});
  }

  // end-to-end policy oracle, optionally on a corrupted solution
  {
    PolicySolution probe = sol;
    if (opt.lambda_scale != 1.0) {
      if (!std::isinf(probe.uoc.lambda1)) probe.uoc.lambda1 *= opt.lambda_scale;
      if (!std::isinf(probe.uow.lambda2)) probe.uow.lambda2 *= opt.lambda_scale;
    }
    const std::uint64_t sd = derive_seed(seed, ++stream);
    const McReport m = mc_policy_check(probe, s, n, static_cast<std::size_t>(s.numerics.mc_steps),
                                       sd, 256, opt.workers);
    rep.checks.push_back({"policy_constraints", m.violations == 0,
                          "violations=" + std::to_string(m.violations) + " of " +
                              std::to_string(m.n_samples),
                          sd});
    rep.checks.push_back({"policy_expected_utility",
                          within_4se(sol.total_value, m.estimate, m.std_error),
                          gate_detail(sol.total_value, m.estimate, m.std_error), sd});
    rep.checks.push_back({"policy_budget", within_4se(s.v0, m.budget_estimate, m.budget_std_error),
                          gate_detail(s.v0, m.budget_estimate, m.budget_std_error), sd});
    // discretisation error of a 64-step hedge: reported, gated loosely at 5% of v0
    rep.checks.push_back({"policy_hedge_rms", m.rms_hedge_error <= 0.05 * s.v0,
                          "rms=" + format_csv(m.rms_hedge_error), sd});
  }

  // analytic z-derivatives against central differences along consistent (z, F) moves
  {
    std::mt19937_64 rng(derive_seed(seed, 2000));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double e = illiquid_exponent(s);
    double worst_xi = 0.0, worst_uoc = 0.0, worst_uow = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double t = s.horizon * (0.05 + 0.85 * u(rng));
      const double z = std::exp(1.2 * (u(rng) - 0.5));
      const double h = 1e-5 * z;
      XiArgs a;
      a.gamma = g;
      a.r = r;
      a.s = s.horizon;
      a.t = t;
      a.z = z;
      a.k = -2.0 + 4.0 * u(rng);
      auto xa = a, xb = a;
      xa.z = z + h;
      xb.z = z - h;
      worst_xi = std::max(worst_xi, rel_err(xi_dz(a), (xi(xa) - xi(xb)) / (2 * h)));
      if (!std::isinf(sol.uoc.lambda1)) {
        const double fd = (uoc_wealth(t, z + h, sol.uoc.lambda1, s) -
                           uoc_wealth(t, z - h, sol.uoc.lambda1, s)) /
                          (2 * h);
        worst_uoc = std::max(worst_uoc, rel_err(uoc_wealth_dz(t, z, sol.uoc.lambda1, s), fd));
      }
      const double f = illiquid_price_from_kernel(t, z, s);
      auto at = [&](double zz) {
        return MarketState{t, zz, f * std::pow(zz / z, -e)};
      };
      const double fd2 = (uow_wealth(at(z + h), sol.uow, s) - uow_wealth(at(z - h), sol.uow, s)) /
                         (2 * h);
      worst_uow = std::max(worst_uow, rel_err(uow_wealth_dz(at(z), sol.uow, s), fd2));
    }
    rep.checks.push_back({"xi_dz_fd", worst_xi <= 1e-5, "max_rel=" + format_csv(worst_xi), 0});
    rep.checks.push_back({"uoc_wealth_dz_fd", worst_uoc <= 1e-5,
                          "max_rel=" + format_csv(worst_uoc), 0});
    rep.checks.push_back({"uow_wealth_dz_fd", worst_uow <= 1e-5,
                          "max_rel=" + format_csv(worst_uow), 0});
  }

  // value continuity across the D = 0 boundary
  {
    const double sc = g / (1.0 - s.prefs.p2);
    Scenario at = s;
    at.illiquid.sigma_f = sc;
    const double v2 = 1.1 * v2_min(s.constraints, s.market, s.horizon);
    const double psi = 0.5 * feasible_psi_max(v2, at);
    double worst = 0.0;
    std::string detail;
    try {
      const double mid = conditional_value(psi, v2, at);
      for (double eps : {-1e-7, 1e-7}) {
        Scenario c = at;
        c.illiquid.sigma_f = sc * (1.0 + eps);
        worst = std::max(worst, rel_err(conditional_value(psi, v2, c), mid));
      }
      detail = "sigma_f=" + format_csv(sc) + " max_rel=" + format_csv(worst);
    } catch (const Error& e) {
      worst = kInf;
      detail = e.what();
    }
    rep.checks.push_back({"case_boundary_continuity", worst <= 1e-4, detail, 0});
  }
  return rep;
}

}  // namespace fixterm
