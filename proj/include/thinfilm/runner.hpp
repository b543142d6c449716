#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "thinfilm/config.hpp"
#include "thinfilm/io.hpp"
#include "thinfilm/reconstruction.hpp"

namespace thinfilm {

inline constexpr int exit_ok = 0;
inline constexpr int exit_not_converged = 1;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_numerical_error = 3;

/// Solve the case and write its artifacts into out_dir (created if needed).
/// Returns the process exit code: 0 on success, 1 when the solver ran out of
/// iterations (artifacts and report are still written), 3 on numerical
/// failure.
inline int run_solve(const CaseConfig& cfg, const std::string& out_dir, std::ostream& log) {
  namespace fs = std::filesystem;
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  fs::create_directories(dir);
  auto at = [&](const std::string& name) { return (dir / name).string(); };

  try {
    auto [p, report] = solve_pressure(cfg.gap, cfg.forcing, cfg.fluid, cfg.grid, cfg.solver,
                                      cfg.quadrature);
    const double final_residual =
        report.residual_history.empty() ? 0.0 : report.residual_history.back();
    const FluxField flux =
        filtration_velocity(p, cfg.gap, cfg.forcing, cfg.fluid, cfg.grid, cfg.quadrature);

    write_pressure_csv(at(cfg.outputs.pressure_csv), cfg.grid, cfg.gap, p);
    write_flux_csv(at(cfg.outputs.flux_csv), cfg.grid, flux);
    if (!cfg.outputs.vtk.empty()) {
      const VelocityField3D u = reconstruct_velocity(p, cfg.gap, cfg.forcing, cfg.fluid,
                                                     cfg.grid, cfg.n3, cfg.quadrature);
      write_vtk(at(cfg.outputs.vtk), cfg.grid, cfg.gap, p, flux, u, cfg.outputs.slices);
    }
    write_report(at(cfg.outputs.report), report, final_residual, p.mean(), p.max_abs());

    log << (report.converged ? "converged" : "NOT converged") << " after " << report.iterations
        << " iterations, residual " << final_residual << ", " << report.wall_time << " s\n";
    return report.converged ? exit_ok : exit_not_converged;
  } catch (const numerical_error& e) {
    log << "numerical failure: " << e.what() << "\n";
    std::ofstream out(at(cfg.outputs.report));
    if (out) out << "converged: false\nerror: " << e.what() << "\n";
    return exit_numerical_error;
  }
}

/// Solve the case and print the reconstructed velocity profile of the cell
/// containing (x, y) as CSV rows y3,ux,uy.
inline int run_profile(const CaseConfig& cfg, double x, double y, std::ostream& out,
                       std::ostream& log) {
  if (!(x >= 0.0 && x <= cfg.grid.lx && y >= 0.0 && y <= cfg.grid.ly))
    throw config_error("profile: point (" + std::to_string(x) + ", " + std::to_string(y) +
                       ") lies outside the domain");
  const int i = std::min(static_cast<int>(x / cfg.grid.dx()), cfg.grid.nx - 1);
  const int j = std::min(static_cast<int>(y / cfg.grid.dy()), cfg.grid.ny - 1);

  try {
    auto [p, report] = solve_pressure(cfg.gap, cfg.forcing, cfg.fluid, cfg.grid, cfg.solver,
                                      cfg.quadrature);
    if (!report.converged) {
      log << "solver did not converge\n";
      return exit_not_converged;
    }
    const FaceField g = driving_field(p, cfg.forcing, cfg.grid);
    const int c = cfg.grid.cell(i, j);
    const Vec2 gc = detail::cell_driving(g, cfg.grid, i, j);
    const double h = cfg.gap.cell[c];
    const double s = norm(gc);
    out << "y3,ux,uy\n";
    for (int k = 0; k < cfg.n3; ++k) {
      const double y3 = h * static_cast<double>(k) / (cfg.n3 - 1);
      const Vec2 u = profile_integral(h, y3, s, cfg.fluid, cfg.quadrature) * gc;
      out << detail_io::num(y3) << ',' << detail_io::num(u.x) << ',' << detail_io::num(u.y)
          << "\n";
    }
    log << "profile at cell (" << i << ", " << j << "), h = " << h << ", |g| = " << s << "\n";
    return exit_ok;
  } catch (const numerical_error& e) {
    log << "numerical failure: " << e.what() << "\n";
    return exit_numerical_error;
  }
}

} // namespace thinfilm
