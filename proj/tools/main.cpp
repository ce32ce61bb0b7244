#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fixterm/commands.hpp"
#include "fixterm/config.hpp"
#include "fixterm/parallel.hpp"

using namespace fixterm;

namespace {

struct Common {
  std::string config;
  std::string out;
  long long seed = -1;
  int workers = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "scenario file (INI); omitted means the base case");
  cmd->add_option("--out", c.out, "also write the CSV here");
  cmd->add_option("--seed", c.seed, "override [numerics].seed")->check(CLI::NonNegativeNumber);
  cmd->add_option("--workers", c.workers, "worker threads (default: FIXTERM_WORKERS or cores)")
      ->check(CLI::PositiveNumber);
}

Scenario scenario_from(const Common& c) {
  Scenario s = c.config.empty() ? base_scenario() : load_config(c.config);
  if (c.seed >= 0) s.numerics.seed = static_cast<std::uint64_t>(c.seed);
  return s;
}

int workers_from(const Common& c) { return c.workers > 0 ? c.workers : default_workers(); }

void emit(const Common& c, const std::string& text) {
  std::cout << text << std::flush;
  if (!c.out.empty()) {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + c.out);
    f << text;
  }
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "bad grid value '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, "--grid is empty");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixterm: consumption / investment with a fixed-term asset and floors"};
  app.require_subcommand(1);

  Common solve_o, sweep_o, svf_o, geug_o, val_o;
  auto* solve = app.add_subcommand("solve", "solve one scenario, print a CSV row");
  add_common(solve, solve_o);

  auto* sweep = app.add_subcommand("sweep", "sensitivity sweep over one parameter");
  add_common(sweep, sweep_o);
  std::string param, grid_text;
  std::vector<std::string> outputs{"osiw"};
  sweep->add_option("--param", param, "parameter name")
      ->required()
      ->check(CLI::IsMember(sweep_parameters()));
  sweep->add_option("--grid", grid_text, "comma separated values")->required();
  sweep->add_option("--outputs", outputs, "metrics to report (comma separated)")
      ->delimiter(',')
      ->check(CLI::IsMember(sweep_outputs()));
  bool no_outputs = false;
  sweep->add_flag("--no-outputs", no_outputs, "header only");

  auto* svf_cmd = app.add_subcommand("svf", "subjective value of the fixed-term asset");
  add_common(svf_cmd, svf_o);
  auto* geug_cmd = app.add_subcommand("geug", "guarantee-equivalent utility gain");
  add_common(geug_cmd, geug_o);

  auto* validate = app.add_subcommand("validate", "run the Monte-Carlo oracle suite");
  add_common(validate, val_o);
  double lambda_scale = 1.0;
  validate->add_option("--debug-lambda-scale", lambda_scale,
                       "multiply the solved multipliers before checking (debug)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*solve) {
      emit(solve_o, run_solve(scenario_from(solve_o)));
    } else if (*sweep) {
      SweepSpec spec{param, parse_grid(grid_text), no_outputs ? std::vector<std::string>{} : outputs};
      emit(sweep_o, run_sweep(scenario_from(sweep_o), spec, workers_from(sweep_o)));
    } else if (*svf_cmd) {
      emit(svf_o, run_svf(scenario_from(svf_o)));
    } else if (*geug_cmd) {
      emit(geug_o, run_geug(scenario_from(geug_o)));
    } else if (*validate) {
      ValidateOptions opt;
      opt.workers = workers_from(val_o);
      opt.lambda_scale = lambda_scale;
      const ValidateReport rep = run_validate(scenario_from(val_o), opt);
      emit(val_o, rep.csv());
      if (!rep.ok()) {
        for (const auto& c : rep.checks)
          if (!c.pass) std::cerr << "validation failed: " << c.name << " (" << c.detail << ")\n";
        return kExitValidation;
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
