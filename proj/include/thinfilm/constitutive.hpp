#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "thinfilm/errors.hpp"
#include "thinfilm/extended.hpp"
#include "thinfilm/vec2.hpp"

namespace thinfilm {

/// Rheology constants of the Carreau law
///   eta(z) = (eta0 - eta_inf) * (1 + lambda * z^2)^(r/2 - 1) + eta_inf.
/// The melt form used throughout the solver has eta_inf = 0; a positive
/// eta_inf is accepted by the algebraic maps for comparison runs.
///
/// The scalar type is a template parameter so the tau <-> zeta inversion can
/// also run in extended precision; double is the working instantiation.
template <class Real>
struct BasicFluidParams {
  Real eta0 = Real(1);    ///< zero-shear viscosity (Pa s)
  Real lambda = Real(1);  ///< constant multiplying the squared shear rate (time^2)
  Real r = Real(1.5);     ///< flow index, r > 1 and r != 2
  Real eta_inf = Real(0); ///< infinite-shear viscosity (Pa s), melt form uses 0

  /// Conjugate exponent r' = r/(r-1).
  Real r_conjugate() const { return r / (r - Real(1)); }
};

using FluidParams = BasicFluidParams<double>;

/// 1 < r < 2 thins under shear, r > 2 thickens.
enum class ViscosityBranch { Thinning, Thickening };

template <class Real>
void check_params(const BasicFluidParams<Real>& p) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("FluidParams: " + msg); };
  if (!num::isfinite(p.eta0) || !num::isfinite(p.lambda) || !num::isfinite(p.r) ||
      !num::isfinite(p.eta_inf))
    fail("all fields must be finite");
  if (!(p.eta_inf >= Real(0))) fail("eta_inf must satisfy eta_inf >= 0");
  if (!(p.eta0 > p.eta_inf)) fail("eta0 must satisfy eta0 > eta_inf");
  if (!(p.lambda >= Real(0))) fail("lambda must satisfy lambda >= 0");
  if (!(p.r > Real(1))) fail("flow index must satisfy r > 1");
  if (p.r == Real(2)) fail("flow index r = 2 is excluded (Newtonian degeneracy)");
}

inline ViscosityBranch branch_of(const FluidParams& p) {
  check_params(p);
  return p.r > 2.0 ? ViscosityBranch::Thickening : ViscosityBranch::Thinning;
}

/// Viscosity at vector shear magnitude z for the limit cross-section law,
///   eta0 * (1 + (lambda/2) z^2)^(r/2 - 1).
/// Evaluated in log space so large z cannot overflow the power.
inline double carreau_viscosity(double z, const FluidParams& p) {
  check_params(p);
  if (!(z >= 0.0)) throw std::invalid_argument("carreau_viscosity: shear magnitude must be >= 0");
  return p.eta0 * std::exp((0.5 * p.r - 1.0) * std::log1p(0.5 * p.lambda * z * z));
}

/// Monotone stress map g_r(z') = eta0 (1 + lambda/2 |z'|^2)^(r/2-1) z'.
inline Vec2 stress_map(Vec2 z, const FluidParams& p) {
  return carreau_viscosity(norm(z), p) * z;
}

namespace detail {

// Admissible branch: zeta >= eta0 for r > 2, eta_inf < zeta <= eta0 for r < 2.
template <class Real>
void check_zeta_branch(Real zeta, const BasicFluidParams<Real>& p, const char* who) {
  if (!num::isfinite(zeta)) throw std::invalid_argument(std::string(who) + ": zeta must be finite");
  if (p.r > Real(2)) {
    if (!(zeta >= p.eta0))
      throw std::invalid_argument(std::string(who) + ": zeta below eta0 on the thickening branch");
  } else {
    if (!(zeta > p.eta_inf && zeta <= p.eta0))
      throw std::invalid_argument(std::string(who) +
                                  ": zeta outside (eta_inf, eta0] on the thinning branch");
  }
}

// log of the viscosity ratio q = (zeta - eta_inf) / (eta0 - eta_inf). The
// log1p form keeps full relative accuracy near zeta = eta0; away from it the
// plain log avoids encoding zeta as an offset from eta0, which would amplify
// rounding by eta0/zeta.
template <class Real>
Real log_viscosity_ratio(Real zeta, const BasicFluidParams<Real>& p) {
  const Real scale = p.eta0 - p.eta_inf;
  const Real q_m1 = (zeta - p.eta0) / scale;
  if (num::fabs(q_m1) < Real(0.5)) return num::log1p(q_m1);
  return num::log((zeta - p.eta_inf) / scale);
}

} // namespace detail

/// Forward algebraic map: shear-stress magnitude carried by effective
/// viscosity zeta,
///   tau = zeta * sqrt( (2/lambda) * ( ((zeta-eta_inf)/(eta0-eta_inf))^(2/(r-2)) - 1 ) ).
/// The power is taken as expm1 of a log so the bracket keeps full relative
/// accuracy near zeta = eta0 and cannot overflow for r near 2.
template <class Real>
Real tau_of_zeta(Real zeta, const BasicFluidParams<Real>& p) {
  check_params(p);
  if (!(p.lambda > Real(0))) throw std::invalid_argument("tau_of_zeta: requires lambda > 0");
  detail::check_zeta_branch(zeta, p, "tau_of_zeta");
  const Real bracket = num::expm1((Real(2) / (p.r - Real(2))) * detail::log_viscosity_ratio(zeta, p));
  const Real inner = std::max(Real(0), (Real(2) / p.lambda) * bracket);
  return zeta * num::sqrt(inner);
}

namespace detail {

inline constexpr double psi_tau_floor = 1e-30;

} // namespace detail

/// Inverse viscosity map zeta = psi(tau): the unique solution of
/// tau_of_zeta(zeta) = tau on the admissible branch. Globally convergent
/// bracketing (endpoint doubling/halving from eta0) followed by a
/// safeguarded secant/bisection hybrid.
///
/// Stops once |tau_of_zeta(zeta) - tau| <= tol * max(tau, 1e-30), or once the
/// bracket has collapsed to adjacent machine numbers; monotonicity makes the
/// latter the best answer the scalar type can represent. Near tau = 0 the
/// root sits within a few ULPs of eta0 (the map has a square-root knee
/// there), so tolerances below the representability floor are only reachable
/// by the extended_real instantiation.
template <class Real>
Real psi(Real tau, const BasicFluidParams<Real>& p, Real tol = Real(1e-12)) {
  check_params(p);
  if (!(p.lambda > Real(0))) throw std::invalid_argument("psi: requires lambda > 0");
  if (!(tau >= Real(0)) || !num::isfinite(tau))
    throw std::invalid_argument("psi: tau must be finite and >= 0");
  if (!(tol > Real(0))) throw std::invalid_argument("psi: tol must be > 0");
  if (tau == Real(0)) return p.eta0;

  const bool thickening = p.r > Real(2);
  auto f = [&](Real zeta) { return tau_of_zeta(zeta, p) - tau; };

  // Bracket [a, b] with f(a) <= 0 <= f(b): start at eta0 where tau_of_zeta
  // vanishes and expand away until tau is enclosed.
  Real a = p.eta0, fa = -tau;
  Real b, fb;
  if (thickening) {
    b = Real(2) * p.eta0;
    fb = f(b);
    int guard = 0;
    while (fb < Real(0)) {
      a = b;
      fa = fb;
      b *= Real(2);
      fb = f(b);
      if (++guard > 20000) throw numerical_error("psi: thickening bracket expansion failed");
    }
  } else {
    b = a;
    fb = fa;
    Real gap = p.eta0 - p.eta_inf;
    int guard = 0;
    for (;;) {
      gap *= Real(0.5);
      a = p.eta_inf + gap;
      fa = f(a);
      if (fa >= Real(0)) break;
      b = a;
      fb = fa;
      if (++guard > 20000) throw numerical_error("psi: thinning bracket contraction failed");
    }
    // Thinning branch: tau_of_zeta decreases with zeta, so the low endpoint
    // carries the positive residual. Swap to the sign convention above.
    std::swap(a, b);
    std::swap(fa, fb);
  }
  if (fa == Real(0)) return a;
  if (fb == Real(0)) return b;

  const Real ftol = tol * std::max(tau, Real(detail::psi_tau_floor));
  const Real eps = num::real_epsilon<Real>();
  Real best = num::fabs(fa) < num::fabs(fb) ? a : b;
  Real fbest = std::min(num::fabs(fa), num::fabs(fb));
  int side = 0;
  for (int it = 0; it < 400; ++it) {
    Real x = (fb != fa) ? (a * fb - b * fa) / (fb - fa) : (a + b) / Real(2);
    const Real lo = std::min(a, b), hi = std::max(a, b);
    if (!(x > lo && x < hi)) x = lo + (hi - lo) / Real(2);
    const Real fx = f(x);
    if (num::fabs(fx) < fbest) {
      best = x;
      fbest = num::fabs(fx);
    }
    if (num::fabs(fx) <= ftol) return x;
    if ((fx < Real(0)) == (fa < Real(0))) {
      a = x;
      fa = fx;
      if (side == -1) fb *= Real(0.5); // Illinois weighting against endpoint stalls
      side = -1;
    } else {
      b = x;
      fb = fx;
      if (side == +1) fa *= Real(0.5);
      side = +1;
    }
    // Adjacent machine numbers: converged to representability.
    if (num::fabs(b - a) <= Real(2) * eps * std::max(num::fabs(a), num::fabs(b))) return best;
  }
  std::ostringstream msg;
  msg << "psi: no convergence for tau=" << static_cast<double>(tau) << " (bracket ["
      << static_cast<double>(std::min(a, b)) << ", " << static_cast<double>(std::max(a, b))
      << "], residual " << static_cast<double>(fbest) << ", ftol " << static_cast<double>(ftol)
      << ")";
  throw numerical_error(msg.str());
}

/// Finite-difference slope of log(psi) against log(tau), a diagnostic for the
/// power-law region; tends to (r-2)/(r-1) as tau grows. Requires the melt
/// form and a stress deep enough in the power-law regime that the
/// dimensionless ratio (lambda/2)(tau/eta0)^2 exceeds 1e6.
inline double psi_loglog_slope(double tau, const FluidParams& p) {
  check_params(p);
  if (p.eta_inf != 0.0)
    throw std::invalid_argument("psi_loglog_slope: defined for the melt form (eta_inf = 0)");
  if (!(tau > 0.0)) throw std::invalid_argument("psi_loglog_slope: tau must be > 0");
  const double dominance = 0.5 * p.lambda * (tau / p.eta0) * (tau / p.eta0);
  if (!(dominance > 1e6)) {
    std::ostringstream msg;
    msg << "psi_loglog_slope: tau=" << tau << " not in the power-law region (dominance ratio "
        << dominance << " <= 1e6)";
    throw std::invalid_argument(msg.str());
  }
  const double step = 1e-3; // log-space half step
  const double hi = psi(tau * std::exp(step), p);
  const double lo = psi(tau * std::exp(-step), p);
  return (std::log(hi) - std::log(lo)) / (2.0 * step);
}

} // namespace thinfilm
