#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "thinfilm/mobility.hpp"

using namespace thinfilm;
using Catch::Approx;

TEST_CASE("gauss panels integrate polynomials and smooth functions") {
  QuadratureSpec q3{1, 3, 1e-12};
  CHECK(integrate([](double x) { return x * x * x * x * x; }, 0.0, 1.0, q3) ==
        Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) ==
        Approx(2.0).epsilon(1e-13));
  CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
}

TEST_CASE("quadrature reports non-convergence on a hard singularity") {
  QuadratureSpec q{1, 8, 1e-10};
  CHECK_THROWS_AS(integrate([](double x) { return std::pow(x, -0.9); }, 0.0, 1.0, q),
                  numerical_error);
}

TEST_CASE("quadrature spec validation") {
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, 1.0, QuadratureSpec{0, 8, 1e-10}),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, 1.0, QuadratureSpec{1, 1, 1e-10}),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, 1.0, QuadratureSpec{1, 8, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("Newtonian mobility closed form") {
  CHECK(mobility(1.0, 0.0, {1.0, 1.0, 1.5}) == Approx(1.0 / 12.0).epsilon(1e-15));
  CHECK(mobility(2.0, 0.0, {4.0, 1.0, 3.0}) == Approx(1.0 / 6.0).epsilon(1e-15));
  // quadrature path against the same closed form in the near-Newtonian
  // regime; the residual lambda correction is 0.6*lambda*|r-2|*(s h/2)^2/(4 eta0^2)
  for (double r : {1.5, 2.5})
    for (double s : {0.5, 2.0, 10.0})
      CHECK(mobility(1.0, s, {1.0, 1e-6, r}) == Approx(1.0 / 12.0).epsilon(1e-5));
}

TEST_CASE("mobility anchors from an independent high-precision evaluation") {
  CHECK(mobility(1.0, 5.0, {1.0, 2.0, 4.0}) == Approx(0.0440901632402734947).epsilon(1e-12));
  CHECK(mobility(1.0, 5.0, {1.0, 2.0, 1.5}) == Approx(0.16441526538847609).epsilon(1e-12));
}

TEST_CASE("mobility equals its full-interval form") {
  // odd part of the kernel integrates to zero; compare both quadrature routes
  const QuadratureSpec tight{2, 16, 1e-13};
  for (double r : {1.2, 1.5, 2.5, 4.0}) {
    const FluidParams p{1.0, 2.0, r};
    for (double h : {0.5, 1.0, 2.0}) {
      for (double s : {0.3, 5.0, 80.0}) {
        const double even = mobility(h, s, p, tight);
        const double full = integrate(
            [&](double xi) { return (0.5 * h + xi) * xi / psi(s * std::abs(xi), p, 1e-14); },
            -0.5 * h, 0.5 * h, tight);
        REQUIRE(full == Approx(even).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("mobility is monotone in h and in s") {
  const FluidParams thickening{1.0, 2.0, 4.0};
  double prev = mobility(1.0, 0.0, thickening);
  for (double s : {1.0, 10.0, 100.0}) {
    const double m = mobility(1.0, s, thickening);
    REQUIRE(m < prev); // thickening: larger driving, larger viscosity, less flux
    prev = m;
  }
  for (double s : {0.0, 5.0}) {
    double prev_h = 0.0;
    for (double h : {0.25, 0.5, 1.0, 2.0}) {
      const double m = mobility(h, s, thickening);
      REQUIRE(m > prev_h);
      prev_h = m;
    }
  }
}

TEST_CASE("mobility collapses to Newtonian as lambda -> 0") {
  for (double r : {1.5, 4.0}) {
    const double closed = 1.0 / 12.0;
    std::vector<double> lambdas = {1e-2, 1e-4, 1e-6};
    std::vector<double> diff;
    for (double lam : lambdas)
      diff.push_back(std::abs(mobility(1.0, 1.0, {1.0, lam, r}) - closed) / closed);
    CHECK(diff[0] >= diff[1]);
    CHECK(diff[1] >= diff[2]);
    const double rate = diff[2] / 1e-6;
    for (std::size_t i = 0; i < diff.size(); ++i) CHECK(diff[i] <= 10.0 * rate * lambdas[i]);
  }
}

TEST_CASE("mobility power-law slope in s") {
  for (double r : {1.5, 3.0, 4.0}) {
    const FluidParams p{1.0, 2.0, r};
    QuadratureSpec q{1, 16, 1e-9};
    const double step = 1e-3;
    const double hi = mobility(1.0, 1e8 * std::exp(step), p, q);
    const double lo = mobility(1.0, 1e8 * std::exp(-step), p, q);
    const double slope = (std::log(hi) - std::log(lo)) / (2.0 * step);
    CHECK(slope == Approx((2.0 - r) / (r - 1.0)).margin(1e-3));
  }
}

TEST_CASE("mobility scales as h^3 for small h") {
  const FluidParams p{1.0, 2.0, 4.0};
  const double m3 = mobility(1e-3, 5.0, p);
  const double m4 = mobility(1e-4, 5.0, p);
  CHECK(m3 / m4 == Approx(1000.0).epsilon(2e-2));
  CHECK(m4 == Approx(std::pow(1e-4, 3) / 12.0).epsilon(1e-3));
}

TEST_CASE("profile integral walls and Newtonian midpoint") {
  const FluidParams p{1.0, 2.0, 4.0};
  CHECK(profile_integral(1.0, 0.0, 3.0, p) == 0.0);
  CHECK(std::abs(profile_integral(1.0, 1.0, 3.0, p)) <= 1e-14);
  CHECK(profile_integral(1.0, 0.5, 0.0, {1.0, 1.0, 1.5}) == Approx(0.125).epsilon(1e-15));
  // independent anchor: P(1, 0.3, 5) for r = 4
  CHECK(profile_integral(1.0, 0.3, 5.0, p) == Approx(0.0553653002458201208).epsilon(1e-11));
  CHECK_THROWS_AS(profile_integral(1.0, 1.5, 3.0, p), std::invalid_argument);
  CHECK_THROWS_AS(profile_integral(1.0, -0.1, 3.0, p), std::invalid_argument);
}

TEST_CASE("depth-integrated profile matches mobility (Fubini)") {
  CHECK(depth_integrated_profile(1.0, 0.0, {1.0, 1.0, 1.5}) == Approx(1.0 / 12.0).epsilon(1e-12));
  for (double r : {1.5, 4.0}) {
    const FluidParams p{1.0, 2.0, r};
    for (double s : {0.5, 5.0}) {
      const double lhs = depth_integrated_profile(1.0, s, p);
      const double rhs = mobility(1.0, s, p);
      REQUIRE(lhs == Approx(rhs).epsilon(1e-9));
    }
  }
}

TEST_CASE("mobility input validation") {
  const FluidParams p{1.0, 1.0, 1.5};
  CHECK_THROWS_AS(mobility(0.0, 1.0, p), std::invalid_argument);
  CHECK_THROWS_AS(mobility(1.0, -1.0, p), std::invalid_argument);
}
