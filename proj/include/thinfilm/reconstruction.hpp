#pragma once

#include <cmath>
#include <vector>

#include "thinfilm/grid.hpp"
#include "thinfilm/mobility.hpp"
#include "thinfilm/reynolds.hpp"

namespace thinfilm {

/// Horizontal velocity u'(y', y3) sampled on a per-cell uniform depth ladder
/// of n3 points in [0, h(y')]. The vertical component of the limit model is
/// identically zero and is not stored.
struct VelocityField3D {
  int nx = 0;
  int ny = 0;
  int n3 = 0;
  std::vector<Vec2> u; // cell-major, depth fastest: u[cell * n3 + k]

  const Vec2& at(int cell, int k) const { return u[static_cast<std::size_t>(cell) * n3 + k]; }
  Vec2& at(int cell, int k) { return u[static_cast<std::size_t>(cell) * n3 + k]; }
  double height(double h, int k) const { return h * static_cast<double>(k) / (n3 - 1); }

  /// Composite-Simpson depth integral of the sampled profile over [0, h];
  /// an odd interval count ends with one 3/8 block.
  Vec2 depth_integral(int cell, double h) const {
    const double dy = h / (n3 - 1);
    const int intervals = n3 - 1;
    const int simpson_end = (intervals % 2 == 0) ? intervals : intervals - 3;
    Vec2 acc{0.0, 0.0};
    for (int k = 0; k + 2 <= simpson_end; k += 2)
      acc = acc + (dy / 3.0) * (at(cell, k) + 4.0 * at(cell, k + 1) + at(cell, k + 2));
    if (simpson_end != intervals) {
      const int k = simpson_end;
      acc = acc + (3.0 * dy / 8.0) *
                      (at(cell, k) + 3.0 * at(cell, k + 1) + 3.0 * at(cell, k + 2) +
                       at(cell, k + 3));
    }
    return acc;
  }
};

/// Filtration velocity V'(y') per cell (vertical component is zero), plus the
/// solver-consistent face-normal fluxes used for conservation checks.
struct FluxField {
  int nx = 0;
  int ny = 0;
  std::vector<Vec2> cell;
  FaceField face;
};

namespace detail {

// Cell-centered driving vector, averaged from the four surrounding
// face-normal samples.
inline Vec2 cell_driving(const FaceField& g, const Grid2D& grid, int i, int j) {
  return {0.5 * (g.x[grid.x_face(i, j)] + g.x[grid.x_face(i + 1, j)]),
          0.5 * (g.y[grid.y_face(i, j)] + g.y[grid.y_face(i, j + 1)])};
}

} // namespace detail

/// Velocity reconstruction u'(y', y3) = g(y') P(h, y3, |g|) from a converged
/// pressure, g = 2(f' - grad p~) averaged to cell centers. The profile kernel
/// is accumulated incrementally over the depth ladder, one Gauss panel per
/// slab; the ladder is symmetric about the midplane, so the top-wall value
/// cancels to roundoff exactly as condition u'(h) = 0 demands.
inline VelocityField3D reconstruct_velocity(const PressureField& p, const GapField& gap,
                                            const ForcingField& forcing,
                                            const FluidParams& params, const Grid2D& grid,
                                            int n3, const QuadratureSpec& quad = {}) {
  check_grid(grid);
  check_params(params);
  check_quadrature(quad);
  if (n3 < 3) throw std::invalid_argument("reconstruct_velocity: n3 must be >= 3");
  detail::require(p.conforms(grid) && gap.conforms(grid) && forcing.conforms(grid),
                  "reconstruct_velocity: fields do not conform to the grid");

  const FaceField g = driving_field(p, forcing, grid);
  const detail::GaussRule& rule = detail::gauss_rule(quad.nodes_per_panel);
  const double psi_tol = detail::psi_tol_for(quad);

  VelocityField3D out;
  out.nx = grid.nx;
  out.ny = grid.ny;
  out.n3 = n3;
  out.u.resize(static_cast<std::size_t>(grid.cells()) * n3);

  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const int c = grid.cell(i, j);
      const Vec2 gc = detail::cell_driving(g, grid, i, j);
      const double h = gap.cell[c];
      const double s = norm(gc);
      const double slab = h / (n3 - 1);
      double kernel = 0.0;
      out.at(c, 0) = {0.0, 0.0};
      for (int k = 1; k < n3; ++k) {
        // integrate xi / psi(s |xi|) over [h/2 - y3_k, h/2 - y3_{k-1}]
        const double hi = 0.5 * h - (k - 1) * slab;
        if (s == 0.0) {
          const double lo = hi - slab;
          kernel += (hi * hi - lo * lo) / (2.0 * params.eta0);
        } else {
          const double mid = hi - 0.5 * slab;
          const double half = 0.5 * slab;
          double acc = 0.0;
          for (std::size_t q = 0; q < rule.node.size(); ++q) {
            const double xi = mid + half * rule.node[q];
            acc += half * rule.weight[q] * xi / psi(s * std::abs(xi), params, psi_tol);
          }
          kernel += acc;
        }
        out.at(c, k) = kernel * gc;
      }
    }
  return out;
}

/// Filtration velocity V' = g M(h, |g|) per cell, with the matching face
/// fluxes for divergence checks.
inline FluxField filtration_velocity(const PressureField& p, const GapField& gap,
                                     const ForcingField& forcing, const FluidParams& params,
                                     const Grid2D& grid, const QuadratureSpec& quad = {}) {
  check_grid(grid);
  check_params(params);
  detail::require(p.conforms(grid) && gap.conforms(grid) && forcing.conforms(grid),
                  "filtration_velocity: fields do not conform to the grid");
  const FaceField g = driving_field(p, forcing, grid);
  FluxField out;
  out.nx = grid.nx;
  out.ny = grid.ny;
  out.face = face_flux(g, gap, params, quad);
  out.cell.resize(grid.cells());
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const int c = grid.cell(i, j);
      const Vec2 gc = detail::cell_driving(g, grid, i, j);
      out.cell[c] = mobility(gap.cell[c], norm(gc), params, quad) * gc;
    }
  return out;
}

/// Max-norm discrete divergence of the reconstructed face fluxes, normalized
/// by the largest face flux. Zero flux gives zero.
inline double divergence_check(const FluxField& flux, const Grid2D& grid) {
  check_grid(grid);
  detail::require(flux.face.conforms(grid), "divergence_check: flux does not conform to the grid");
  const double scale = detail::max_abs_face(flux.face);
  if (scale == 0.0) return 0.0;
  return detail::max_abs(detail::divergence(flux.face, grid)) / scale;
}

} // namespace thinfilm
