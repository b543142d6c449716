#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "test_cases.hpp"
#include "thinfilm/oracles.hpp"
#include "thinfilm/reynolds.hpp"

using namespace thinfilm;
using namespace thinfilm::testcases;
using Catch::Approx;

TEST_CASE("driving_field trivial identities") {
  const Grid2D grid = unit_grid(8);
  const ForcingField zero = zero_forcing(grid);
  PressureField p(grid);

  FaceField g = driving_field(p, zero, grid);
  for (double v : g.x) CHECK(v == 0.0);
  for (double v : g.y) CHECK(v == 0.0);

  // pressure gradient cancels matching forcing on interior faces
  const ForcingField unit_x = ForcingField::from_functions(
      grid, [](double, double) { return 1.0; }, [](double, double) { return 0.0; });
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) p.value[grid.cell(i, j)] = grid.xc(i);
  g = driving_field(p, unit_x, grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 1; i < grid.nx; ++i) CHECK(g.x[grid.x_face(i, j)] == Approx(0.0).margin(1e-14));

  // constant forcing doubles into g everywhere
  const ForcingField ab = ForcingField::from_functions(
      grid, [](double, double) { return 1.5; }, [](double, double) { return -2.0; });
  PressureField zero_p(grid);
  g = driving_field(zero_p, ab, grid);
  for (double v : g.x) CHECK(v == Approx(3.0));
  for (double v : g.y) CHECK(v == Approx(-4.0));
}

TEST_CASE("face_flux boundary and Newtonian closed form") {
  const Grid2D grid = unit_grid(8);
  const GapField gap = wavy_gap(grid);
  const FluidParams newtonianish{2.0, 1e-12, 1.5};
  const ForcingField ab = ForcingField::from_functions(
      grid, [](double, double) { return 0.7; }, [](double, double) { return -0.3; });
  PressureField p(grid);
  const FaceField g = driving_field(p, ab, grid);
  const FaceField flux = face_flux(g, gap, newtonianish);

  for (int j = 0; j < grid.ny; ++j) {
    CHECK(flux.x[grid.x_face(0, j)] == 0.0);
    CHECK(flux.x[grid.x_face(grid.nx, j)] == 0.0);
  }
  for (int i = 0; i < grid.nx; ++i) {
    CHECK(flux.y[grid.y_face(i, 0)] == 0.0);
    CHECK(flux.y[grid.y_face(i, grid.ny)] == 0.0);
  }
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 1; i < grid.nx; ++i) {
      const double h = gap.x_face[grid.x_face(i, j)];
      CHECK(flux.x[grid.x_face(i, j)] ==
            Approx(1.4 * h * h * h / (12.0 * 2.0)).epsilon(1e-8));
    }

  FaceField zero_g(grid);
  const FaceField no_flux = face_flux(zero_g, gap, newtonianish);
  for (double v : no_flux.x) CHECK(v == 0.0);
  for (double v : no_flux.y) CHECK(v == 0.0);
}

TEST_CASE("zero forcing converges to zero pressure in one iteration") {
  const Grid2D grid = unit_grid(8);
  auto [p, report] = solve_pressure(flat_gap(grid), zero_forcing(grid), {1.0, 2.0, 1.5}, grid);
  CHECK(report.converged);
  CHECK(report.iterations == 1);
  for (double v : p.value) CHECK(v == 0.0);
}

TEST_CASE("gradient forcing is absorbed exactly") {
  const FluidParams params{1.0, 1.0, 2.5};
  for (int n : {16, 32}) {
    const Grid2D grid = unit_grid(n);
    const GapField gap = wavy_gap(grid);
    const ForcingField f = gradient_forcing(grid);
    auto [p, report] = solve_pressure(gap, f, params, grid);
    REQUIRE(report.converged);

    // discrete potential reached exactly, up to solver tolerance
    const PressureField expected = absorbed_pressure(grid);
    double err = 0.0;
    for (int c = 0; c < grid.cells(); ++c)
      err = std::max(err, std::abs(p.value[c] - expected.value[c]));
    CHECK(err <= 1e-7 * expected.max_abs());

    // converged flux is tiny against the naive (p = 0) flux scale
    const FaceField flux = face_flux(driving_field(p, f, grid), gap, params);
    PressureField zero(grid);
    const FaceField naive = face_flux(driving_field(zero, f, grid), gap, params);
    CHECK(detail::max_abs_face(flux) <=
          10.0 * 1e-8 * detail::max_abs_face(naive)); // 10 x picard_tol
    CHECK(residual_norm(p, gap, f, params, grid) <= 1e-8);
  }
}

TEST_CASE("pressure mean is pinned to zero") {
  const Grid2D grid = unit_grid(24);
  auto [p, report] =
      solve_pressure(flat_gap(grid), rotational_forcing(grid), {1.0, 2.0, 1.5}, grid);
  REQUIRE(report.converged);
  CHECK(std::abs(p.mean()) <= 1e-12 * p.max_abs());
}

TEST_CASE("rotational case: conservation and residual history") {
  const Grid2D grid = unit_grid(64);
  const GapField gap = flat_gap(grid);
  const ForcingField f = rotational_forcing(grid);
  const FluidParams params{1.0, 2.0, 1.5};
  auto [p, report] = solve_pressure(gap, f, params, grid);
  REQUIRE(report.converged);
  CHECK(report.residual_history.back() <= 1e-8);

  // residual history settles monotonically after the opening transient
  for (std::size_t k = 3; k + 1 < report.residual_history.size(); ++k)
    CHECK(report.residual_history[k + 1] <= report.residual_history[k] * (1.0 + 1e-9));

  // telescoping conservation: the global divergence sum vanishes
  const FaceField flux = face_flux(driving_field(p, f, grid), gap, params);
  const std::vector<double> div = detail::divergence(flux, grid);
  double sum = 0.0, comp = 0.0; // Neumaier compensation
  for (double v : div) {
    const double t = sum + v;
    comp += (std::abs(sum) >= std::abs(v)) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  const double div_scale = detail::max_abs_face(flux) / grid.dx();
  CHECK(std::abs(sum + comp) <= 1e-12 * div_scale);

  // residual_norm of p = 0 is a strictly positive negative control
  PressureField zero(grid);
  CHECK(residual_norm(zero, gap, f, params, grid) > 1e-2);
}

TEST_CASE("residual_norm on the exact gradient solution tracks the inner tolerance") {
  const Grid2D grid = unit_grid(24);
  const GapField gap = wavy_gap(grid);
  const ForcingField f = gradient_forcing(grid);
  const FluidParams params{1.0, 1.0, 1.5};
  const PressureField p = absorbed_pressure(grid);
  CHECK(residual_norm(p, gap, f, params, grid) <= 10.0 * 1e-10);
}

TEST_CASE("default damping converges across the flow-index sweep") {
  const Grid2D grid = unit_grid(32);
  const GapField gap = flat_gap(grid);
  const ForcingField rot = rotational_forcing(grid);
  const ForcingField grad = gradient_forcing(grid);
  for (double r : {1.2, 1.5, 2.5, 4.0}) {
    const FluidParams params{1.0, 2.0, r};
    auto [p1, rep1] = solve_pressure(gap, rot, params, grid);
    CHECK(rep1.converged);
    CHECK(rep1.iterations <= 200);
    auto [p2, rep2] = solve_pressure(gap, grad, params, grid);
    CHECK(rep2.converged);
    CHECK(rep2.iterations <= 200);
  }
}

TEST_CASE("non-convergence is reported, not thrown") {
  const Grid2D grid = unit_grid(24);
  SolverConfig cfg;
  cfg.max_iters = 1;
  auto [p, report] =
      solve_pressure(flat_gap(grid), rotational_forcing(grid), {1.0, 2.0, 1.5}, grid, cfg);
  CHECK_FALSE(report.converged);
  CHECK(report.iterations == 1);
  CHECK(report.residual_history.size() == 1);
}

TEST_CASE("newtonian limit matches the classical Reynolds oracle") {
  const Grid2D grid = unit_grid(48);
  const GapField gap = flat_gap(grid);
  const ForcingField f = rotational_forcing(grid);
  const FluidParams params{1.0, 1e-8, 1.5};
  auto [p, report] = solve_pressure(gap, f, params, grid);
  REQUIRE(report.converged);
  // the limit stress form makes the effective Newtonian viscosity eta0/2
  const PressureField ref = oracles::newtonian_pressure(gap, f, grid, 0.5);
  double num = 0.0, den = 0.0;
  for (int c = 0; c < grid.cells(); ++c) {
    num += (p.value[c] - ref.value[c]) * (p.value[c] - ref.value[c]);
    den += ref.value[c] * ref.value[c];
  }
  CHECK(std::sqrt(num / den) <= 1e-4);
}

TEST_CASE("solver input validation") {
  const Grid2D grid = unit_grid(8);
  const GapField gap = flat_gap(grid);
  const ForcingField f = zero_forcing(grid);
  SolverConfig bad;
  bad.relaxation = 0.0;
  CHECK_THROWS_AS(solve_pressure(gap, f, {1.0, 1.0, 1.5}, grid, bad), std::invalid_argument);
  const Grid2D other = unit_grid(9);
  CHECK_THROWS_AS(solve_pressure(gap, zero_forcing(other), {1.0, 1.0, 1.5}, other),
                  std::invalid_argument);
  CHECK_THROWS_AS((Grid2D{0.0, 1.0, 4, 4}, check_grid(Grid2D{0.0, 1.0, 4, 4})),
                  std::invalid_argument);
}
