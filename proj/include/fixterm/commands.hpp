#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fixterm/market.hpp"
#include "fixterm/policy.hpp"

namespace fixterm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitValidation = 4;

int exit_code_for(const Error& e);

// 12 significant digits, '.' separator regardless of locale; "inf"/"-inf"/"nan" spelled out.
std::string format_csv(double x);

// t = 0 residuals of the two budget equations, relative.
struct Residuals {
  double uoc = 0.0;
  double uow = 0.0;
};
Residuals budget_residuals(const PolicySolution& sol, const Scenario& s);

std::string solve_csv_header();
std::string solve_csv_row(const PolicySolution& sol, const Scenario& s);
std::string run_solve(const Scenario& s);

struct SweepSpec {
  std::string parameter;
  std::vector<double> grid;
  std::vector<std::string> outputs;
};

const std::vector<std::string>& sweep_parameters();
const std::vector<std::string>& sweep_outputs();

// Copy of s with one named parameter replaced.
Scenario with_parameter(const Scenario& s, const std::string& name, double value);

// Rows ordered by grid, then by output. Failed grid points still produce rows.
std::string run_sweep(const Scenario& s, const SweepSpec& spec, int workers);

std::string run_svf(const Scenario& s);
std::string run_geug(const Scenario& s);

struct ValidateOptions {
  int workers = 1;
  // Debug hook: scale both multipliers before the oracle runs; the budget gate must trip.
  double lambda_scale = 1.0;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  std::uint64_t seed = 0;
};

struct ValidateReport {
  std::vector<CheckResult> checks;
  bool ok() const;
  std::string csv() const;
};

ValidateReport run_validate(const Scenario& s, const ValidateOptions& opt);

}  // namespace fixterm
