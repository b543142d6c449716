// Command-line front end: solve <config>, verify, mobility-table, profile.
// Exit codes: 0 success, 1 solver non-convergence (or failed verification),
// 2 config error, 3 internal numerical failure.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "thinfilm/config.hpp"
#include "thinfilm/io.hpp"
#include "thinfilm/runner.hpp"
#include "thinfilm/verify.hpp"

namespace {

struct SolveFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::string dump_config_path;
  double tol = -1.0;
  int max_iters = -1;

  thinfilm::CaseConfig load() const {
    thinfilm::CaseConfig cfg = thinfilm::load_config(config_path);
    if (tol > 0.0) cfg.solver.picard_tol = tol;
    if (max_iters > 0) cfg.solver.max_iters = max_iters;
    thinfilm::check_solver_config(cfg.solver);
    if (!dump_config_path.empty()) thinfilm::dump_config(cfg, dump_config_path);
    return cfg;
  }
};

void add_solve_flags(CLI::App* cmd, SolveFlags& flags) {
  cmd->add_option("config", flags.config_path, "case file (JSON)")->required();
  cmd->add_option("--tol", flags.tol, "override solver.picard_tol");
  cmd->add_option("--max-iters", flags.max_iters, "override solver.max_iters");
  cmd->add_option("--out-dir", flags.out_dir, "directory for output artifacts");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"thin-film flow solver for Carreau fluids (melt form)"};
  app.require_subcommand(1);

  SolveFlags solve_flags;
  CLI::App* solve = app.add_subcommand("solve", "solve a case and write field outputs");
  add_solve_flags(solve, solve_flags);
  solve->add_option("--dump-config", solve_flags.dump_config_path,
                    "write the fully-populated configuration before solving");

  CLI::App* verify = app.add_subcommand("verify", "run the oracle and invariant suite");

  CLI::App* table =
      app.add_subcommand("mobility-table", "dump the mobility integral M(h, s) as CSV");
  thinfilm::FluidParams table_params;
  thinfilm::TableRange h_range{0.5, 2.0, 4, false};
  thinfilm::TableRange s_range{0.0, 10.0, 5, false};
  std::string table_out;
  table->add_option("--eta0", table_params.eta0, "zero-shear viscosity")->capture_default_str();
  table->add_option("--lambda", table_params.lambda, "squared-shear-rate constant")
      ->capture_default_str();
  table->add_option("--r", table_params.r, "flow index")->capture_default_str();
  table->add_option("--eta-inf", table_params.eta_inf, "infinite-shear viscosity")
      ->capture_default_str();
  table->add_option("--h-min", h_range.lo)->capture_default_str();
  table->add_option("--h-max", h_range.hi)->capture_default_str();
  table->add_option("--h-count", h_range.count)->capture_default_str();
  table->add_option("--s-min", s_range.lo)->capture_default_str();
  table->add_option("--s-max", s_range.hi)->capture_default_str();
  table->add_option("--s-count", s_range.count)->capture_default_str();
  table->add_flag("--log-s", s_range.log_spaced, "log-space the s samples");
  table->add_option("--out", table_out, "output file (default: stdout)");

  SolveFlags profile_flags;
  CLI::App* profile =
      app.add_subcommand("profile", "velocity profile at a point of a solved case");
  add_solve_flags(profile, profile_flags);
  std::pair<double, double> at{0.5, 0.5};
  profile->add_option("--at", at, "sample point x,y")->required()->delimiter(',');
  std::string profile_out;
  profile->add_option("--out", profile_out, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      const thinfilm::CaseConfig cfg = solve_flags.load();
      return thinfilm::run_solve(cfg, solve_flags.out_dir, std::cerr);
    }
    if (*verify) {
      const auto results = thinfilm::run_verify();
      return thinfilm::report_verify(results, std::cout) == 0 ? 0 : 1;
    }
    if (*table) {
      if (table_out.empty()) {
        thinfilm::dump_mobility_table(std::cout, table_params, h_range, s_range);
      } else {
        std::ofstream out(table_out);
        if (!out) throw thinfilm::config_error("cannot open '" + table_out + "'");
        thinfilm::dump_mobility_table(out, table_params, h_range, s_range);
      }
      return 0;
    }
    if (*profile) {
      const thinfilm::CaseConfig cfg = profile_flags.load();
      if (profile_out.empty())
        return thinfilm::run_profile(cfg, at.first, at.second, std::cout, std::cerr);
      std::ofstream out(profile_out);
      if (!out) throw thinfilm::config_error("cannot open '" + profile_out + "'");
      return thinfilm::run_profile(cfg, at.first, at.second, out, std::cerr);
    }
  } catch (const thinfilm::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return thinfilm::exit_config_error;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return thinfilm::exit_config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return thinfilm::exit_numerical_error;
  }
  return 0;
}
