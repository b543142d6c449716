#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>
#include <vector>

#include "thinfilm/grid.hpp"
#include "thinfilm/mobility.hpp"

namespace thinfilm {

struct SolverConfig {
  double picard_tol = 1e-8;  ///< on the flux-divergence residual and the relative update
  int max_iters = 200;       ///< Picard budget
  double relaxation = 0.7;   ///< damping factor in (0, 1]
  double linear_tol = 1e-10; ///< inner CG tolerance, relative to the right-hand side
};

inline void check_solver_config(const SolverConfig& c) {
  if (!(c.picard_tol > 0.0)) throw std::invalid_argument("SolverConfig: picard_tol must be > 0");
  if (c.max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  if (!(c.relaxation > 0.0 && c.relaxation <= 1.0))
    throw std::invalid_argument("SolverConfig: relaxation must lie in (0, 1]");
  if (!(c.linear_tol > 0.0)) throw std::invalid_argument("SolverConfig: linear_tol must be > 0");
}

struct SolverReport {
  int iterations = 0;
  std::vector<double> residual_history; ///< flux-divergence residual per iteration
  bool converged = false;
  double wall_time = 0.0; ///< seconds
  int cg_iterations = 0;  ///< summed over all Picard steps
};

/// Face-normal components of the driving field g = 2 (f' - grad p~), built
/// from two-point pressure differences and the face value of the forcing.
/// Boundary faces carry 2 f' (no exterior cell; the flux stencil never uses
/// a pressure gradient there).
inline FaceField driving_field(const PressureField& p, const ForcingField& f, const Grid2D& grid) {
  check_grid(grid);
  detail::require(p.conforms(grid), "driving_field: pressure does not conform to the grid");
  detail::require(f.conforms(grid), "driving_field: forcing does not conform to the grid");
  FaceField g(grid);
  const double dx = grid.dx(), dy = grid.dy();
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i <= grid.nx; ++i) {
      const int idx = grid.x_face(i, j);
      const double dpdx = (i == 0 || i == grid.nx)
                              ? 0.0
                              : (p.value[grid.cell(i, j)] - p.value[grid.cell(i - 1, j)]) / dx;
      g.x[idx] = 2.0 * (f.x_face[idx] - dpdx);
    }
  for (int j = 0; j <= grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const int idx = grid.y_face(i, j);
      const double dpdy = (j == 0 || j == grid.ny)
                              ? 0.0
                              : (p.value[grid.cell(i, j)] - p.value[grid.cell(i, j - 1)]) / dy;
      g.y[idx] = 2.0 * (f.y_face[idx] - dpdy);
    }
  return g;
}

namespace detail {

// Driving magnitude |g| at an interior face: normal component plus the
// average of the four neighbouring tangential face values. Boundary
// tangential faces enter at their no-flux value of zero, which keeps the
// average second-order consistent at walls.
inline double x_face_driving_magnitude(const FaceField& g, const Grid2D& grid, int i, int j) {
  auto gy = [&](int ii, int jj) {
    return (jj == 0 || jj == grid.ny) ? 0.0 : g.y[grid.y_face(ii, jj)];
  };
  const double gt = 0.25 * (gy(i - 1, j) + gy(i - 1, j + 1) + gy(i, j) + gy(i, j + 1));
  return std::hypot(g.x[grid.x_face(i, j)], gt);
}

inline double y_face_driving_magnitude(const FaceField& g, const Grid2D& grid, int i, int j) {
  auto gx = [&](int ii, int jj) {
    return (ii == 0 || ii == grid.nx) ? 0.0 : g.x[grid.x_face(ii, jj)];
  };
  const double gt = 0.25 * (gx(i, j - 1) + gx(i + 1, j - 1) + gx(i, j) + gx(i + 1, j));
  return std::hypot(g.y[grid.y_face(i, j)], gt);
}

// Mobility M(h_face, |g_face|) on interior faces; boundary entries stay zero.
inline FaceField face_mobilities(const FaceField& g, const GapField& gap, const Grid2D& grid,
                                 const FluidParams& params, const QuadratureSpec& quad) {
  FaceField m(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 1; i < grid.nx; ++i) {
      const int idx = grid.x_face(i, j);
      m.x[idx] = mobility(gap.x_face[idx], x_face_driving_magnitude(g, grid, i, j), params, quad);
    }
  for (int j = 1; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const int idx = grid.y_face(i, j);
      m.y[idx] = mobility(gap.y_face[idx], y_face_driving_magnitude(g, grid, i, j), params, quad);
    }
  return m;
}

inline std::vector<double> divergence(const FaceField& flux, const Grid2D& grid) {
  std::vector<double> div(grid.cells());
  const double dx = grid.dx(), dy = grid.dy();
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const double fe = flux.x[grid.x_face(i + 1, j)];
      const double fw = flux.x[grid.x_face(i, j)];
      const double fn = flux.y[grid.y_face(i, j + 1)];
      const double fs = flux.y[grid.y_face(i, j)];
      div[grid.cell(i, j)] = (fe - fw) / dx + (fn - fs) / dy;
    }
  return div;
}

inline double max_abs_face(const FaceField& f) {
  double m = 0.0;
  for (double v : f.x) m = std::max(m, std::abs(v));
  for (double v : f.y) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}

// Variable-coefficient diffusion operator (A p)_c = sum_f T_f (p_c - p_nb),
// T_f a per-face transmissibility (coefficient / spacing^2) on interior
// faces. Symmetric positive semidefinite; nullspace is the constant field.
struct DiffusionOperator {
  const Grid2D& grid;
  const FaceField& coeff; // per-face flux coefficients (e.g. 2 M)

  double tx(int i, int j) const {
    const double dx = grid.dx();
    return coeff.x[grid.x_face(i, j)] / (dx * dx);
  }
  double ty(int i, int j) const {
    const double dy = grid.dy();
    return coeff.y[grid.y_face(i, j)] / (dy * dy);
  }

  void apply(const std::vector<double>& p, std::vector<double>& out) const {
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const int c = grid.cell(i, j);
        double acc = 0.0;
        if (i > 0) acc += tx(i, j) * (p[c] - p[grid.cell(i - 1, j)]);
        if (i < grid.nx - 1) acc += tx(i + 1, j) * (p[c] - p[grid.cell(i + 1, j)]);
        if (j > 0) acc += ty(i, j) * (p[c] - p[grid.cell(i, j - 1)]);
        if (j < grid.ny - 1) acc += ty(i, j + 1) * (p[c] - p[grid.cell(i, j + 1)]);
        out[c] = acc;
      }
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(grid.cells(), 0.0);
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const int c = grid.cell(i, j);
        if (i > 0) d[c] += tx(i, j);
        if (i < grid.nx - 1) d[c] += tx(i + 1, j);
        if (j > 0) d[c] += ty(i, j);
        if (j < grid.ny - 1) d[c] += ty(i, j + 1);
        if (!(d[c] > 0.0) || !std::isfinite(d[c]))
          throw numerical_error("inner linear system is singular (mobility underflow?)");
      }
    return d;
  }
};

// Jacobi-preconditioned conjugate gradients on the zero-mean subspace.
// Stops when the max-norm residual falls below tol_abs.
inline int conjugate_gradient(const DiffusionOperator& op, const std::vector<double>& b,
                              std::vector<double>& x, double tol_abs, int max_iters) {
  const std::size_t n = b.size();
  const std::vector<double> diag = op.diagonal();
  std::vector<double> r(n), z(n), d(n), q(n);
  op.apply(x, r);
  for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - r[k];
  if (max_abs(r) <= tol_abs) return 0;
  double rz = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    z[k] = r[k] / diag[k];
    rz += r[k] * z[k];
  }
  d = z;
  for (int it = 1; it <= max_iters; ++it) {
    op.apply(d, q);
    double dq = 0.0;
    for (std::size_t k = 0; k < n; ++k) dq += d[k] * q[k];
    if (!(dq > 0.0) || !std::isfinite(dq))
      throw numerical_error("inner linear system lost positive definiteness");
    const double alpha = rz / dq;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * d[k];
      r[k] -= alpha * q[k];
    }
    if (max_abs(r) <= tol_abs) return it;
    double rz_next = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      z[k] = r[k] / diag[k];
      rz_next += r[k] * z[k];
    }
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t k = 0; k < n; ++k) d[k] = z[k] + beta * d[k];
  }
  throw numerical_error("inner conjugate-gradient solve did not converge");
}

inline void project_zero_mean(std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a;
  s /= static_cast<double>(v.size());
  for (double& a : v) a -= s;
}

// Right-hand side of the frozen-mobility system: divergence of the forcing
// part of the flux, 2 M f_n on interior faces.
inline std::vector<double> forcing_divergence(const FaceField& m, const ForcingField& f,
                                              const Grid2D& grid) {
  FaceField forced(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 1; i < grid.nx; ++i) {
      const int idx = grid.x_face(i, j);
      forced.x[idx] = 2.0 * m.x[idx] * f.x_face[idx];
    }
  for (int j = 1; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const int idx = grid.y_face(i, j);
      forced.y[idx] = 2.0 * m.y[idx] * f.y_face[idx];
    }
  return divergence(forced, grid);
}

} // namespace detail

/// Per-face normal flux V_n = g_n M(h_face, |g_face|). Boundary faces carry
/// exactly zero (the no-flux condition of the limit problem).
inline FaceField face_flux(const FaceField& g, const GapField& gap, const FluidParams& params,
                           const QuadratureSpec& quad = {}) {
  detail::require(g.nx == gap.nx && g.ny == gap.ny,
                  "face_flux: driving field and gap shapes differ");
  const Grid2D grid{1.0, 1.0, g.nx, g.ny}; // indexing only; spacing cancels here
  FaceField flux(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 1; i < grid.nx; ++i) {
      const int idx = grid.x_face(i, j);
      const double s = detail::x_face_driving_magnitude(g, grid, i, j);
      flux.x[idx] = g.x[idx] * mobility(gap.x_face[idx], s, params, quad);
    }
  for (int j = 1; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const int idx = grid.y_face(i, j);
      const double s = detail::y_face_driving_magnitude(g, grid, i, j);
      flux.y[idx] = g.y[idx] * mobility(gap.y_face[idx], s, params, quad);
    }
  return flux;
}

/// Max-norm flux-divergence residual of the discrete Reynolds problem,
/// normalized by the largest face flux; when the flux is near zero the
/// p = 0 ("naive") flux scale takes over so the measure stays meaningful on
/// exactly-absorbed forcing.
inline double residual_norm(const PressureField& p, const GapField& gap, const ForcingField& f,
                            const FluidParams& params, const Grid2D& grid,
                            const QuadratureSpec& quad = {}) {
  check_grid(grid);
  detail::require(p.conforms(grid) && gap.conforms(grid) && f.conforms(grid),
                  "residual_norm: fields do not conform to the grid");
  const FaceField flux = face_flux(driving_field(p, f, grid), gap, params, quad);
  PressureField zero(grid);
  const FaceField naive = face_flux(driving_field(zero, f, grid), gap, params, quad);
  const double flux_scale = detail::max_abs_face(flux);
  const double naive_scale = detail::max_abs_face(naive);
  const double scale = (flux_scale >= 1e-6 * naive_scale) ? flux_scale : naive_scale;
  if (scale == 0.0) return 0.0;
  return detail::max_abs(detail::divergence(flux, grid)) / scale;
}

/// Damped Picard iteration for the nonlinear Reynolds problem: freeze the
/// face mobilities at the current iterate, solve the resulting symmetric
/// semidefinite diffusion system by preconditioned conjugate gradients with
/// the constant nullspace projected out, and relax the update. Convergence
/// requires both the flux-divergence residual and the relative pressure
/// update to fall below picard_tol.
///
/// On budget exhaustion the best iterate is returned with converged = false.
inline std::pair<PressureField, SolverReport> solve_pressure(
    const GapField& gap, const ForcingField& forcing, const FluidParams& params,
    const Grid2D& grid, const SolverConfig& config = {}, const QuadratureSpec& quad = {},
    const PressureField* initial = nullptr) {
  check_grid(grid);
  check_params(params);
  check_solver_config(config);
  check_quadrature(quad);
  detail::require(gap.conforms(grid), "solve_pressure: gap does not conform to the grid");
  detail::require(forcing.conforms(grid), "solve_pressure: forcing does not conform to the grid");
  gap.validate();
  forcing.validate();

  const auto start = std::chrono::steady_clock::now();
  PressureField p(grid);
  if (initial) {
    detail::require(initial->conforms(grid), "solve_pressure: initial guess shape mismatch");
    p = *initial;
    p.project_zero_mean();
  }

  SolverReport report;

  // Flux scale of the undisturbed forcing, used to normalize residuals when
  // the converged flux itself vanishes.
  double naive_scale;
  {
    PressureField zero(grid);
    const FaceField g0 = driving_field(zero, forcing, grid);
    const FaceField m0 = detail::face_mobilities(g0, gap, grid, params, quad);
    FaceField f0(grid);
    for (std::size_t k = 0; k < f0.x.size(); ++k) f0.x[k] = g0.x[k] * m0.x[k];
    for (std::size_t k = 0; k < f0.y.size(); ++k) f0.y[k] = g0.y[k] * m0.y[k];
    naive_scale = detail::max_abs_face(f0);
  }

  const int cg_budget = std::max(2000, 50 * std::max(grid.nx, grid.ny));
  double update_rel = 0.0; // no step taken yet; residual alone decides at entry
  for (int it = 1; it <= config.max_iters; ++it) {
    report.iterations = it;
    const FaceField g = driving_field(p, forcing, grid);
    const FaceField m = detail::face_mobilities(g, gap, grid, params, quad);
    FaceField flux(grid);
    for (std::size_t k = 0; k < flux.x.size(); ++k) flux.x[k] = g.x[k] * m.x[k];
    for (std::size_t k = 0; k < flux.y.size(); ++k) flux.y[k] = g.y[k] * m.y[k];

    const double flux_scale = detail::max_abs_face(flux);
    const double scale = (flux_scale >= 1e-6 * naive_scale) ? flux_scale : naive_scale;
    const double residual =
        scale == 0.0 ? 0.0 : detail::max_abs(detail::divergence(flux, grid)) / scale;
    report.residual_history.push_back(residual);

    if (residual <= config.picard_tol && update_rel <= config.picard_tol) {
      report.converged = true;
      break;
    }
    if (it == config.max_iters) break; // budget ends: report this residual

    // A p = -div(2 M f): the stencil operator is the negative divergence of
    // the pressure part of the flux.
    std::vector<double> b = detail::forcing_divergence(m, forcing, grid);
    for (double& v : b) v = -v;
    detail::project_zero_mean(b); // compatibility is exact up to roundoff
    const double b_scale = detail::max_abs(b);

    std::vector<double> solved = p.value;
    if (b_scale == 0.0) {
      std::fill(solved.begin(), solved.end(), 0.0);
    } else {
      FaceField coeff(grid);
      for (std::size_t k = 0; k < coeff.x.size(); ++k) coeff.x[k] = 2.0 * m.x[k];
      for (std::size_t k = 0; k < coeff.y.size(); ++k) coeff.y[k] = 2.0 * m.y[k];
      detail::DiffusionOperator op{grid, coeff};
      report.cg_iterations +=
          detail::conjugate_gradient(op, b, solved, config.linear_tol * b_scale, cg_budget);
      detail::project_zero_mean(solved);
    }

    double delta = 0.0;
    for (std::size_t k = 0; k < solved.size(); ++k) {
      const double next = (1.0 - config.relaxation) * p.value[k] + config.relaxation * solved[k];
      delta = std::max(delta, std::abs(next - p.value[k]));
      p.value[k] = next;
    }
    p.project_zero_mean();
    const double p_scale = p.max_abs();
    update_rel = (delta == 0.0) ? 0.0 : (p_scale > 0.0 ? delta / p_scale : 1.0);
  }

  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(p), std::move(report)};
}

} // namespace thinfilm
