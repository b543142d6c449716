#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "thinfilm/constitutive.hpp"
#include "thinfilm/grid.hpp"
#include "thinfilm/reynolds.hpp"

// Reference computations kept deliberately independent of the solver's
// psi / mobility path: the Newtonian Reynolds solve uses the closed-form
// coefficient h^3/(12 mu), and the cross-section BVP inverts the scalar
// stress relation by bisection on the shear rate, never through psi.

namespace thinfilm {
namespace oracles {

/// Classical (linear) Reynolds solve div( h^3/(12 mu) (f' - grad p) ) = 0
/// with no-flux boundaries and zero-mean pressure. One CG solve, no Picard.
inline PressureField newtonian_pressure(const GapField& gap, const ForcingField& forcing,
                                        const Grid2D& grid, double mu) {
  check_grid(grid);
  if (!(mu > 0.0)) throw std::invalid_argument("newtonian_pressure: viscosity must be > 0");
  detail::require(gap.conforms(grid) && forcing.conforms(grid),
                  "newtonian_pressure: fields do not conform to the grid");
  gap.validate();
  forcing.validate();

  FaceField coeff(grid);
  FaceField forced(grid);
  auto cube = [](double h) { return h * h * h; };
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 1; i < grid.nx; ++i) {
      const int idx = grid.x_face(i, j);
      coeff.x[idx] = cube(gap.x_face[idx]) / (12.0 * mu);
      forced.x[idx] = coeff.x[idx] * forcing.x_face[idx];
    }
  for (int j = 1; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const int idx = grid.y_face(i, j);
      coeff.y[idx] = cube(gap.y_face[idx]) / (12.0 * mu);
      forced.y[idx] = coeff.y[idx] * forcing.y_face[idx];
    }

  std::vector<double> b = detail::divergence(forced, grid);
  for (double& v : b) v = -v; // A p = -div(coeff f)
  detail::project_zero_mean(b);
  PressureField p(grid);
  const double b_scale = detail::max_abs(b);
  if (b_scale > 0.0) {
    detail::DiffusionOperator op{grid, coeff};
    detail::conjugate_gradient(op, b, p.value, 1e-12 * b_scale,
                               std::max(2000, 50 * std::max(grid.nx, grid.ny)));
    p.project_zero_mean();
  }
  return p;
}

struct ShootingConfig {
  int ode_steps = 10000;    ///< fixed RK4 step count over [0, h]
  double newton_tol = 1e-10; ///< relative tolerance on the terminal no-slip mismatch
  int max_newton = 50;
};

inline void check_shooting_config(const ShootingConfig& c) {
  if (c.ode_steps < 100) throw std::invalid_argument("ShootingConfig: ode_steps must be >= 100");
  if (!(c.newton_tol > 0.0))
    throw std::invalid_argument("ShootingConfig: newton_tol must be > 0");
  if (c.max_newton < 1) throw std::invalid_argument("ShootingConfig: max_newton must be >= 1");
}

struct CrossSectionProfile {
  std::vector<double> y3;
  std::vector<Vec2> u;
  Vec2 constant{};           ///< recovered integration constant C
  double terminal_mismatch = 0.0; ///< |u(h)| relative to the profile scale
  int newton_iterations = 0;
};

namespace detail_bvp {

// Invert eta_r(z) z = mag for z >= 0 by bracketed bisection; the product is
// strictly increasing in z for r > 1.
inline double shear_from_stress(double mag, const FluidParams& p) {
  if (mag == 0.0) return 0.0;
  auto stress = [&](double z) { return carreau_viscosity(z, p) * z; };
  double hi = mag / p.eta0; // exact for Newtonian, a starting scale otherwise
  if (!(hi > 0.0)) hi = 1.0;
  int guard = 0;
  while (stress(hi) < mag) {
    hi *= 2.0;
    if (++guard > 4000) throw numerical_error("shear_from_stress: bracket expansion failed");
  }
  double lo = 0.0;
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (stress(mid) < mag)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

inline Vec2 shear_vector(Vec2 stress_vec, const FluidParams& p) {
  const double mag = norm(stress_vec);
  if (mag == 0.0) return {0.0, 0.0};
  return (shear_from_stress(mag, p) / mag) * stress_vec;
}

// RK4 trajectory of u' = shear(C - y3 g); the right-hand side depends on y3
// only, so k2 = k3 and the scheme is Simpson's rule in disguise.
inline std::vector<Vec2> integrate_profile(Vec2 c, Vec2 g, double h, const FluidParams& p,
                                           int steps) {
  std::vector<Vec2> u(steps + 1);
  u[0] = {0.0, 0.0};
  const double dy = h / steps;
  Vec2 f_lo = shear_vector(c, p);
  for (int k = 0; k < steps; ++k) {
    const double y = k * dy;
    const Vec2 f_mid = shear_vector(c - (y + 0.5 * dy) * g, p);
    const Vec2 f_hi = shear_vector(c - (y + dy) * g, p);
    u[k + 1] = u[k] + (dy / 6.0) * (f_lo + 4.0 * f_mid + f_hi);
    f_lo = f_hi;
  }
  return u;
}

inline double profile_scale(const std::vector<Vec2>& u) {
  double m = 0.0;
  for (const Vec2& v : u) m = std::max(m, std::max(std::abs(v.x), std::abs(v.y)));
  return m;
}

} // namespace detail_bvp

/// Cross-section two-point BVP for constant driving g over a film of
/// thickness h: find the profile u(y3) with u(0) = u(h) = 0 solving
///   eta_r(|u'|) u' = C - y3 g,
/// shooting on the unknown constant C with a damped finite-difference
/// Newton iteration on the terminal no-slip condition.
inline CrossSectionProfile cross_section_bvp(Vec2 g, double h, const FluidParams& params,
                                             const ShootingConfig& config = {}) {
  check_params(params);
  check_shooting_config(config);
  if (!(h > 0.0)) throw std::invalid_argument("cross_section_bvp: thickness must be > 0");

  const int n = config.ode_steps;
  auto terminal = [&](Vec2 c) { return detail_bvp::integrate_profile(c, g, h, params, n).back(); };

  Vec2 c{0.0, 0.0};
  Vec2 res = terminal(c);
  const double g_scale = norm(g);
  int iterations = 0;
  double scale = 1.0;
  for (; iterations < config.max_newton; ++iterations) {
    const std::vector<Vec2> traj = detail_bvp::integrate_profile(c, g, h, params, n);
    scale = std::max(detail_bvp::profile_scale(traj), 1e-300);
    res = traj.back();
    if (norm(res) <= config.newton_tol * scale) break;

    const double delta = 1e-6 * std::max({std::abs(c.x), std::abs(c.y), g_scale * h, 1e-30});
    const Vec2 rx = terminal({c.x + delta, c.y});
    const Vec2 ry = terminal({c.x, c.y + delta});
    const double j11 = (rx.x - res.x) / delta, j21 = (rx.y - res.y) / delta;
    const double j12 = (ry.x - res.x) / delta, j22 = (ry.y - res.y) / delta;
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0 || !std::isfinite(det))
      throw numerical_error("cross_section_bvp: singular shooting Jacobian");
    Vec2 step{-(j22 * res.x - j12 * res.y) / det, -(-j21 * res.x + j11 * res.y) / det};

    double damping = 1.0;
    Vec2 next = c + step;
    Vec2 next_res = terminal(next);
    int backtracks = 0;
    while (norm(next_res) > (1.0 - 1e-3 * damping) * norm(res) && backtracks < 12) {
      damping *= 0.5;
      next = c + damping * step;
      next_res = terminal(next);
      ++backtracks;
    }
    c = next;
    res = next_res;
  }
  if (norm(res) > config.newton_tol * scale)
    throw numerical_error("cross_section_bvp: shooting did not reach the no-slip tolerance");

  CrossSectionProfile out;
  out.constant = c;
  out.newton_iterations = iterations;
  out.u = detail_bvp::integrate_profile(c, g, h, params, n);
  out.y3.resize(n + 1);
  for (int k = 0; k <= n; ++k) out.y3[k] = h * static_cast<double>(k) / n;
  out.terminal_mismatch = norm(out.u.back()) / std::max(detail_bvp::profile_scale(out.u), 1e-300);
  return out;
}

/// Closed-form power-law exponents: d log psi / d log tau tends to
/// (r-2)/(r-1) and d log M / d log s to (2-r)/(r-1).
inline std::pair<double, double> asymptotic_exponents(const FluidParams& p) {
  check_params(p);
  return {(p.r - 2.0) / (p.r - 1.0), (2.0 - p.r) / (p.r - 1.0)};
}

} // namespace oracles
} // namespace thinfilm
