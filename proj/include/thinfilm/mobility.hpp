#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "thinfilm/constitutive.hpp"
#include "thinfilm/quadrature.hpp"

namespace thinfilm {

namespace detail {

// psi accuracy used inside quadrature kernels: comfortably below the panel
// agreement tolerance, floored near machine precision.
inline double psi_tol_for(const QuadratureSpec& quad) {
  return std::max(1e-14, 0.01 * quad.refinement_tol);
}

} // namespace detail

/// Thickness-mobility integral
///   M(h, s) = int_{-h/2}^{h/2} (h/2 + xi) xi / psi(s |xi|) dxi,
/// the flux produced per unit driving magnitude s = |g|. The odd part of the
/// kernel vanishes, so the implementation evaluates the even reduction
/// 2 int_0^{h/2} xi^2 / psi(s xi) dxi. s = 0 short-circuits to the Newtonian
/// closed form h^3 / (12 eta0).
inline double mobility(double h, double s, const FluidParams& p, const QuadratureSpec& quad = {}) {
  check_params(p);
  check_quadrature(quad);
  if (!(h > 0.0)) throw std::invalid_argument("mobility: thickness must be > 0");
  if (!(s >= 0.0)) throw std::invalid_argument("mobility: driving magnitude must be >= 0");
  if (s == 0.0) return h * h * h / (12.0 * p.eta0);
  const double psi_tol = detail::psi_tol_for(quad);
  return 2.0 * integrate([&](double xi) { return xi * xi / psi(s * xi, p, psi_tol); }, 0.0,
                         0.5 * h, quad);
}

/// Partial-depth kernel of the velocity profile,
///   P(h, y3, s) = int_{h/2 - y3}^{h/2} xi / psi(s |xi|) dxi,
/// so that u'(y3) = g * P(h, y3, |g|). Vanishes at both walls.
inline double profile_integral(double h, double y3, double s, const FluidParams& p,
                               const QuadratureSpec& quad = {}) {
  check_params(p);
  check_quadrature(quad);
  if (!(h > 0.0)) throw std::invalid_argument("profile_integral: thickness must be > 0");
  if (!(s >= 0.0)) throw std::invalid_argument("profile_integral: driving magnitude must be >= 0");
  if (!(y3 >= 0.0 && y3 <= h))
    throw std::invalid_argument("profile_integral: height must lie in [0, h]");
  if (y3 == 0.0) return 0.0;
  if (s == 0.0) return y3 * (h - y3) / (2.0 * p.eta0);
  const double psi_tol = detail::psi_tol_for(quad);
  return integrate([&](double xi) { return xi / psi(s * std::abs(xi), p, psi_tol); },
                   0.5 * h - y3, 0.5 * h, quad);
}

/// Depth integral of the profile kernel, int_0^h P(h, y3, s) dy3. Equals
/// mobility(h, s) after swapping the order of integration; kept as a second
/// quadrature route for cross-checks.
inline double depth_integrated_profile(double h, double s, const FluidParams& p,
                                       const QuadratureSpec& quad = {}) {
  check_params(p);
  check_quadrature(quad);
  if (!(h > 0.0)) throw std::invalid_argument("depth_integrated_profile: thickness must be > 0");
  if (!(s >= 0.0))
    throw std::invalid_argument("depth_integrated_profile: driving magnitude must be >= 0");
  QuadratureSpec inner = quad;
  inner.refinement_tol = 0.1 * quad.refinement_tol;
  return integrate([&](double y3) { return profile_integral(h, y3, s, p, inner); }, 0.0, h, quad);
}

} // namespace thinfilm
