#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "thinfilm/errors.hpp"

namespace thinfilm {

/// Composite Gauss-Legendre quadrature: fixed order per panel, uniform panel
/// count doubled until two successive estimates agree.
struct QuadratureSpec {
  int panel_count = 1;           ///< starting number of uniform panels
  int nodes_per_panel = 16;      ///< Gauss-Legendre order per panel
  double refinement_tol = 1e-10; ///< relative agreement required between doublings
};

inline void check_quadrature(const QuadratureSpec& q) {
  if (q.panel_count < 1) throw std::invalid_argument("QuadratureSpec: panel_count must be >= 1");
  if (q.nodes_per_panel < 2)
    throw std::invalid_argument("QuadratureSpec: nodes_per_panel must be >= 2");
  if (!(q.refinement_tol > 0.0))
    throw std::invalid_argument("QuadratureSpec: refinement_tol must be > 0");
}

namespace detail {

struct GaussRule {
  std::vector<double> node;   // on (-1, 1)
  std::vector<double> weight; // sums to 2
};

// Nodes via Newton iteration on the Legendre polynomial recurrence.
inline GaussRule make_gauss_rule(int n) {
  GaussRule rule;
  rule.node.resize(n);
  rule.weight.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) <= 1e-15) break;
    }
    rule.node[i] = -z;
    rule.node[n - 1 - i] = z;
    rule.weight[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weight[n - 1 - i] = rule.weight[i];
  }
  return rule;
}

inline const GaussRule& gauss_rule(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_rule(n)).first;
  return it->second;
}

template <class F>
void gauss_panels(F&& f, double a, double b, int panels, const GaussRule& rule, double& integral,
                  double& l1) {
  integral = 0.0;
  l1 = 0.0;
  const double panel_width = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    const double mid = a + (k + 0.5) * panel_width;
    const double half = 0.5 * panel_width;
    for (std::size_t q = 0; q < rule.node.size(); ++q) {
      const double term = half * rule.weight[q] * f(mid + half * rule.node[q]);
      integral += term;
      l1 += std::abs(term);
    }
  }
}

} // namespace detail

/// Integrate f over [a, b]. Panel doubling stops once successive estimates
/// differ by less than refinement_tol relative to the integral; the L1 mass of
/// the rule guards the comparison when cancellation drives the value to zero.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureSpec& quad = {}) {
  check_quadrature(quad);
  if (a == b) return 0.0;
  const detail::GaussRule& rule = detail::gauss_rule(quad.nodes_per_panel);
  int panels = quad.panel_count;
  double value, l1;
  detail::gauss_panels(f, a, b, panels, rule, value, l1);
  const int panel_limit = 1 << 16;
  while (panels < panel_limit) {
    panels *= 2;
    double refined, refined_l1;
    detail::gauss_panels(f, a, b, panels, rule, refined, refined_l1);
    const double delta = std::abs(refined - value);
    value = refined;
    l1 = refined_l1;
    if (delta <= quad.refinement_tol * std::max(std::abs(refined), 1e-3 * refined_l1)) return value;
  }
  std::ostringstream msg;
  msg << "integrate: no convergence over [" << a << ", " << b << "] after " << panels
      << " panels (refinement_tol " << quad.refinement_tol << ")";
  throw numerical_error(msg.str());
}

} // namespace thinfilm
