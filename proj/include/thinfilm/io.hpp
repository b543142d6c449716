#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "thinfilm/grid.hpp"
#include "thinfilm/mobility.hpp"
#include "thinfilm/reconstruction.hpp"
#include "thinfilm/reynolds.hpp"

namespace thinfilm {

namespace detail_io {

// 17 significant digits: every double round-trips bit-exactly.
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw numerical_error("cannot open output file '" + path + "'");
  return out;
}

} // namespace detail_io

inline void write_pressure_csv(const std::string& path, const Grid2D& grid, const GapField& gap,
                               const PressureField& p) {
  std::ofstream out = detail_io::open_out(path);
  out << "x,y,h,p\n";
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const int c = grid.cell(i, j);
      out << detail_io::num(grid.xc(i)) << ',' << detail_io::num(grid.yc(j)) << ','
          << detail_io::num(gap.cell[c]) << ',' << detail_io::num(p.value[c]) << "\n";
    }
}

inline void write_flux_csv(const std::string& path, const Grid2D& grid, const FluxField& flux) {
  std::ofstream out = detail_io::open_out(path);
  out << "x,y,Vx,Vy\n";
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const int c = grid.cell(i, j);
      out << detail_io::num(grid.xc(i)) << ',' << detail_io::num(grid.yc(j)) << ','
          << detail_io::num(flux.cell[c].x) << ',' << detail_io::num(flux.cell[c].y) << "\n";
    }
}

/// Legacy ASCII VTK (v3.0) STRUCTURED_POINTS file with cell data: gap,
/// pressure, filtration velocity, and one horizontal-velocity field per
/// requested fractional height (sampled at the nearest depth-ladder index).
inline void write_vtk(const std::string& path, const Grid2D& grid, const GapField& gap,
                      const PressureField& p, const FluxField& flux, const VelocityField3D& u,
                      const std::vector<double>& slices) {
  std::ofstream out = detail_io::open_out(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "thin-film Carreau solve\n";
  out << "ASCII\n";
  out << "DATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << grid.nx + 1 << ' ' << grid.ny + 1 << " 1\n";
  out << "ORIGIN 0 0 0\n";
  out << "SPACING " << detail_io::num(grid.dx()) << ' ' << detail_io::num(grid.dy()) << " 1\n";
  out << "CELL_DATA " << grid.cells() << "\n";

  out << "SCALARS gap double 1\nLOOKUP_TABLE default\n";
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) out << detail_io::num(gap.cell[grid.cell(i, j)]) << "\n";
  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) out << detail_io::num(p.value[grid.cell(i, j)]) << "\n";
  out << "VECTORS filtration double\n";
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 v = flux.cell[grid.cell(i, j)];
      out << detail_io::num(v.x) << ' ' << detail_io::num(v.y) << " 0\n";
    }
  for (double frac : slices) {
    const int k = static_cast<int>(frac * (u.n3 - 1) + 0.5);
    std::string name = "velocity_" + std::to_string(frac);
    for (char& c : name)
      if (c == '.') c = '_';
    out << "VECTORS " << name << " double\n";
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const Vec2 v = u.at(grid.cell(i, j), k);
        out << detail_io::num(v.x) << ' ' << detail_io::num(v.y) << " 0\n";
      }
  }
}

inline void write_report(const std::string& path, const SolverReport& report,
                         double final_residual, double pressure_mean, double pressure_max) {
  std::ofstream out = detail_io::open_out(path);
  out << "converged: " << (report.converged ? "true" : "false") << "\n";
  out << "iterations: " << report.iterations << "\n";
  out << "final_residual: " << detail_io::num(final_residual) << "\n";
  out << "pressure_mean: " << detail_io::num(pressure_mean) << "\n";
  out << "pressure_max_abs: " << detail_io::num(pressure_max) << "\n";
  out << "cg_iterations: " << report.cg_iterations << "\n";
  out << "wall_time_seconds: " << detail_io::num(report.wall_time) << "\n";
  out << "residual_history:\n";
  for (std::size_t k = 0; k < report.residual_history.size(); ++k)
    out << "  " << k + 1 << ": " << detail_io::num(report.residual_history[k]) << "\n";
}

struct TableRange {
  double lo = 0.0;
  double hi = 1.0;
  int count = 1;
  bool log_spaced = false;

  double at(int k) const {
    if (count == 1) return lo;
    if (log_spaced)
      return lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1));
    return lo + (hi - lo) * static_cast<double>(k) / (count - 1);
  }
};

/// Long-format table of the mobility integral: one row per (h, s) pair,
/// preceded by a comment line naming the rheology parameters.
inline void dump_mobility_table(std::ostream& out, const FluidParams& params,
                                const TableRange& h_range, const TableRange& s_range,
                                const QuadratureSpec& quad = {}) {
  check_params(params);
  if (h_range.count < 1 || s_range.count < 1)
    throw std::invalid_argument("dump_mobility_table: ranges need at least one sample");
  if (!(h_range.lo > 0.0)) throw std::invalid_argument("dump_mobility_table: h must be > 0");
  if (!(s_range.lo >= 0.0)) throw std::invalid_argument("dump_mobility_table: s must be >= 0");
  if (s_range.log_spaced && !(s_range.lo > 0.0))
    throw std::invalid_argument("dump_mobility_table: log-spaced s needs s_lo > 0");
  out << "# eta0=" << detail_io::num(params.eta0) << " lambda=" << detail_io::num(params.lambda)
      << " r=" << detail_io::num(params.r) << " eta_inf=" << detail_io::num(params.eta_inf)
      << "\n";
  out << "h,s,M\n";
  for (int i = 0; i < h_range.count; ++i) {
    const double h = h_range.at(i);
    for (int k = 0; k < s_range.count; ++k) {
      const double s = s_range.at(k);
      out << detail_io::num(h) << ',' << detail_io::num(s) << ','
          << detail_io::num(mobility(h, s, params, quad)) << "\n";
    }
  }
}

} // namespace thinfilm
