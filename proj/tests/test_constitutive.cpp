#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "thinfilm/constitutive.hpp"

using namespace thinfilm;
using Catch::Approx;

namespace {

const std::vector<double> kFlowIndices = {1.2, 1.5, 1.8, 2.5, 3.0, 4.0};
const std::vector<double> kLambdas = {0.1, 1.0, 10.0};
const std::vector<double> kEta0s = {0.5, 1.0, 5.0};

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return g;
}

} // namespace

TEST_CASE("carreau_viscosity spot values") {
  // zero-shear identity
  CHECK(carreau_viscosity(0.0, {3.0, 1.0, 1.5}) == 3.0);
  // 2 * (1 + 1)^1 = 4
  CHECK(carreau_viscosity(1.0, {2.0, 2.0, 4.0}) == Approx(4.0).epsilon(1e-14));
  // large-shear thinning asymptote: (z^2)^(r/2-1) = 1e-3 at z = 1e6, r = 1.5
  const FluidParams thin{1.0, 2.0, 1.5};
  CHECK(carreau_viscosity(1e6, thin) == Approx(1e-3).epsilon(1e-6));
  const double slope = (std::log(carreau_viscosity(1e6 * 1.01, thin)) -
                        std::log(carreau_viscosity(1e6 / 1.01, thin))) /
                       (2.0 * std::log(1.01));
  CHECK(slope == Approx(-0.5).margin(1e-4)); // exponent r - 2
}

TEST_CASE("carreau_viscosity rejects bad input") {
  CHECK_THROWS_AS(carreau_viscosity(-1.0, {1.0, 1.0, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(carreau_viscosity(1.0, {1.0, 1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(carreau_viscosity(1.0, {1.0, -1.0, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(carreau_viscosity(1.0, {1.0, 1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(carreau_viscosity(1.0, {1.0, 1.0, 1.5, 2.0}), std::invalid_argument);
}

TEST_CASE("Newtonian degeneracy at lambda = 0") {
  const FluidParams p{2.5, 0.0, 1.5};
  for (double z : {0.0, 1e-3, 1.0, 1e4, 1e8}) CHECK(carreau_viscosity(z, p) == 2.5);
}

TEST_CASE("stress_map direction and spot value") {
  const FluidParams p{2.0, 2.0, 4.0};
  const Vec2 zero = stress_map({0.0, 0.0}, p);
  CHECK(zero.x == 0.0);
  CHECK(zero.y == 0.0);
  const Vec2 v = stress_map({1.0, 0.0}, p);
  CHECK(v.x == Approx(4.0).epsilon(1e-14));
  CHECK(v.y == 0.0);
  // parallel to the argument
  const Vec2 w = stress_map({3.0, -4.0}, p);
  CHECK(cross(w, Vec2{3.0, -4.0}) == Approx(0.0).margin(1e-14));
}

TEST_CASE("stress_map is monotone") {
  std::mt19937 rng(7131);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  for (double r : kFlowIndices) {
    for (double lam : kLambdas) {
      const FluidParams p{1.0, lam, r};
      for (int k = 0; k < 1000; ++k) {
        const Vec2 z{coord(rng), coord(rng)};
        const Vec2 t{coord(rng), coord(rng)};
        const double d = dot(stress_map(z, p) - stress_map(t, p), z - t);
        REQUIRE(d >= -1e-14);
      }
    }
  }
}

TEST_CASE("tau_of_zeta spot values") {
  CHECK(tau_of_zeta(1.0, {1.0, 2.0, 4.0}) == 0.0);
  CHECK(tau_of_zeta(5.0, {5.0, 0.3, 1.5}) == 0.0);
  CHECK(tau_of_zeta(2.0, {1.0, 2.0, 4.0}) == Approx(2.0).epsilon(1e-14));
  // thinning branch: 2/(r-2) = -4, tau = zeta sqrt(zeta^-4 - 1) = sqrt(3/2)
  CHECK(tau_of_zeta(std::pow(2.0, -0.5), {1.0, 2.0, 1.5}) ==
        Approx(1.224744871391589).epsilon(1e-14));
}

TEST_CASE("tau_of_zeta rejects the wrong branch") {
  CHECK_THROWS_AS(tau_of_zeta(0.5, FluidParams{1.0, 2.0, 4.0}), std::invalid_argument);
  CHECK_THROWS_AS(tau_of_zeta(1.5, FluidParams{1.0, 2.0, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(tau_of_zeta(0.0, FluidParams{1.0, 2.0, 1.5}), std::invalid_argument);
  // lambda = 0 divides the bracket away
  CHECK_THROWS_AS(tau_of_zeta(1.0, FluidParams{1.0, 0.0, 4.0}), std::invalid_argument);
  // generalized law: zeta must stay above eta_inf
  CHECK_THROWS_AS(tau_of_zeta(0.05, FluidParams{1.0, 2.0, 1.5, 0.1}), std::invalid_argument);
}

TEST_CASE("psi spot values") {
  const FluidParams p{1.0, 2.0, 4.0};
  CHECK(psi(0.0, p) == 1.0);
  CHECK(psi(0.0, {3.0, 0.5, 1.2}) == 3.0);
  CHECK(psi(2.0, p) == Approx(2.0).epsilon(1e-12));
  CHECK(psi(10.0, p) == Approx(5.0).epsilon(1e-12));
  // independently computed anchor (40-digit bisection on the algebraic map)
  CHECK(psi(3.0, {1.0, 1.0, 2.5}) == Approx(1.3608748604534400381).epsilon(1e-12));
}

TEST_CASE("psi preconditions") {
  CHECK_THROWS_AS(psi(1.0, FluidParams{1.0, 0.0, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(psi(-1.0, FluidParams{1.0, 1.0, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(psi(1.0, FluidParams{1.0, 1.0, 1.5}, 0.0), std::invalid_argument);
}

namespace {

// Width of one forward-map quantization step at zeta, staying on the branch.
double forward_quantum(double zeta, const FluidParams& p) {
  double up = std::nextafter(zeta, std::numeric_limits<double>::infinity());
  double down = std::nextafter(zeta, 0.0);
  if (p.r > 2.0)
    down = std::max(down, p.eta0);
  else
    up = std::min(up, p.eta0);
  return std::abs(tau_of_zeta(up, p) - tau_of_zeta(down, p));
}

} // namespace

TEST_CASE("psi roundtrip at double precision, limited only by representability") {
  const std::vector<double> taus = log_grid(1e-6, 1e8, 50);
  for (double r : kFlowIndices) {
    for (double lam : kLambdas) {
      for (double eta0 : kEta0s) {
        const FluidParams p{eta0, lam, r};
        double prev = eta0;
        for (std::size_t i = 0; i < taus.size(); ++i) {
          const double tau = taus[i];
          const double zeta = psi(tau, p);
          const double back = tau_of_zeta(zeta, p);
          // near tau = 0 the root is pinned a few ULPs from eta0, so the
          // residual cannot beat the local quantum of the forward map
          const double bound =
              std::max(1e-10 * tau, forward_quantum(zeta, p) + 1e-13 * tau);
          REQUIRE(std::abs(back - tau) <= bound);
          if (r > 2.0) {
            REQUIRE(zeta >= eta0);
            REQUIRE(zeta >= prev);
          } else {
            REQUIRE(zeta > 0.0);
            REQUIRE(zeta <= eta0);
            REQUIRE(zeta <= prev);
          }
          prev = zeta;
        }
      }
    }
  }
}

TEST_CASE("psi roundtrip in extended precision meets 1e-10 on the full grid") {
  using R = extended_real;
  const std::vector<double> taus = log_grid(1e-6, 1e8, 50);
  for (double r : kFlowIndices) {
    for (double lam : kLambdas) {
      for (double eta0 : kEta0s) {
        const BasicFluidParams<R> p{R(eta0), R(lam), R(r)};
        R prev = p.eta0;
        for (std::size_t i = 0; i < taus.size(); ++i) {
          const R tau = R(taus[i]);
          const R zeta = psi(tau, p, R(1e-12));
          const R back = tau_of_zeta(zeta, p);
          const double rel = static_cast<double>(num::fabs(back - tau) / tau);
          REQUIRE(rel <= 1e-10);
          if (r > 2.0) {
            REQUIRE(static_cast<double>(zeta - p.eta0) >= 0.0);
            if (i > 0) REQUIRE(static_cast<double>(zeta - prev) > 0.0); // strictly increasing
          } else {
            REQUIRE(static_cast<double>(zeta) > 0.0);
            REQUIRE(static_cast<double>(p.eta0 - zeta) >= 0.0);
            if (i > 0) REQUIRE(static_cast<double>(prev - zeta) > 0.0); // strictly decreasing
          }
          prev = zeta;
        }
      }
    }
  }
}

TEST_CASE("psi with eta_inf > 0 converges to the melt form") {
  // pointwise continuity as eta_inf drops to zero, at roughly linear rate
  for (double r : {1.5, 4.0}) {
    for (double tau : {0.5, 3.0, 40.0}) {
      const FluidParams melt{1.0, 2.0, r};
      const double base = psi(tau, melt);
      const std::vector<double> eta_infs = {1e-2, 1e-4, 1e-6};
      std::vector<double> diff;
      for (double ei : eta_infs) diff.push_back(std::abs(psi(tau, {1.0, 2.0, r, ei}) - base));
      CHECK(diff[0] >= diff[1]);
      CHECK(diff[1] >= diff[2]);
      const double rate = diff[2] / 1e-6; // smallest sample sets the linear slope
      for (std::size_t i = 0; i < diff.size(); ++i)
        CHECK(diff[i] <= 10.0 * rate * eta_infs[i] + 1e-13);
    }
  }
}

TEST_CASE("psi_loglog_slope approaches (r-2)/(r-1)") {
  CHECK(psi_loglog_slope(1e8, {1.0, 2.0, 4.0}) == Approx(2.0 / 3.0).margin(1e-3));
  CHECK(psi_loglog_slope(1e8, {1.0, 2.0, 1.5}) == Approx(-1.0).margin(1e-3));
  CHECK(psi_loglog_slope(1e8, {1.0, 1.0, 3.0}) == Approx(0.5).margin(1e-3));
}

TEST_CASE("psi_loglog_slope preconditions") {
  CHECK_THROWS_AS(psi_loglog_slope(1.0, FluidParams{1.0, 2.0, 4.0}), std::invalid_argument);
  CHECK_THROWS_AS(psi_loglog_slope(1e8, FluidParams{1.0, 2.0, 4.0, 0.1}), std::invalid_argument);
}

TEST_CASE("branch_of maps the flow index") {
  CHECK(branch_of({1.0, 1.0, 1.5}) == ViscosityBranch::Thinning);
  CHECK(branch_of({1.0, 1.0, 2.5}) == ViscosityBranch::Thickening);
}
