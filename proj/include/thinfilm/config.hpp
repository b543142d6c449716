#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "thinfilm/expression.hpp"
#include "thinfilm/grid.hpp"
#include "thinfilm/quadrature.hpp"
#include "thinfilm/reynolds.hpp"

namespace thinfilm {

/// Where to write the solve artifacts; paths are taken relative to the output
/// directory chosen at run time. An empty vtk path skips the VTK file.
struct OutputSpec {
  std::string pressure_csv = "pressure.csv";
  std::string flux_csv = "flux.csv";
  std::string vtk;
  std::string report = "report.txt";
  std::vector<double> slices = {0.25, 0.5, 0.75}; // fractional heights of velocity slices
};

/// Gap and forcing are given either as expressions over (x, y) or as
/// cell-centered CSV tables (ny rows of nx values, bottom row first).
struct GapSpec {
  std::string expression;
  std::string table;
};

struct ForcingSpec {
  std::string fx;
  std::string fy;
  std::string table_fx;
  std::string table_fy;
};

struct CaseConfig {
  FluidParams fluid;
  Grid2D grid;
  GapSpec gap_spec;
  ForcingSpec forcing_spec;
  SolverConfig solver;
  QuadratureSpec quadrature;
  int n3 = 32;
  OutputSpec outputs;

  // materialized at load time
  GapField gap;
  ForcingField forcing;
};

namespace detail_config {

using nlohmann::json;

inline const json& member(const json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw config_error(path + "." + key + ": missing required field");
  return *it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw config_error(path + ": expected a number");
  return j.get<double>();
}

inline double number_or(const json& parent, const std::string& key, const std::string& path,
                        double fallback) {
  auto it = parent.find(key);
  return it == parent.end() ? fallback : number(*it, path + "." + key);
}

inline int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw config_error(path + ": expected an integer");
  return j.get<int>();
}

inline int integer_or(const json& parent, const std::string& key, const std::string& path,
                      int fallback) {
  auto it = parent.find(key);
  return it == parent.end() ? fallback : integer(*it, path + "." + key);
}

inline std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) throw config_error(path + ": expected a string");
  return j.get<std::string>();
}

inline std::vector<double> csv_table(const std::filesystem::path& file, int nx, int ny,
                                     const std::string& field) {
  std::ifstream in(file);
  if (!in) throw config_error(field + ": cannot open table '" + file.string() + "'");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(nx) * ny);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n,") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cellstr;
    int cols = 0;
    while (std::getline(ss, cellstr, ',')) {
      try {
        values.push_back(std::stod(cellstr));
      } catch (const std::exception&) {
        throw config_error(field + ": malformed value '" + cellstr + "' in '" + file.string() +
                           "'");
      }
      ++cols;
    }
    if (cols != nx)
      throw config_error(field + ": row " + std::to_string(rows) + " of '" + file.string() +
                         "' has " + std::to_string(cols) + " values, expected " +
                         std::to_string(nx));
    ++rows;
  }
  if (rows != ny)
    throw config_error(field + ": table '" + file.string() + "' has " + std::to_string(rows) +
                       " rows, expected " + std::to_string(ny));
  return values;
}

template <class F>
auto rethrow_as_config(const std::string& field, F&& body) {
  try {
    return body();
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    throw config_error(field + ": " + e.what());
  }
}

} // namespace detail_config

/// Load, validate, and materialize a case file. Any violation is reported as
/// a config_error naming the offending field.
inline CaseConfig load_config(const std::string& path) {
  using detail_config::json;
  std::ifstream in(path);
  if (!in) throw config_error(path + ": cannot open case file");
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error(path + ": " + e.what());
  }
  if (!root.is_object()) throw config_error(path + ": case file must be a JSON object");

  CaseConfig cfg;
  const std::filesystem::path base = std::filesystem::path(path).parent_path();

  {
    const json& fluid = detail_config::member(root, "fluid", "case");
    cfg.fluid.eta0 = detail_config::number(detail_config::member(fluid, "eta0", "fluid"),
                                           "fluid.eta0");
    cfg.fluid.lambda = detail_config::number(detail_config::member(fluid, "lambda", "fluid"),
                                             "fluid.lambda");
    cfg.fluid.r = detail_config::number(detail_config::member(fluid, "r", "fluid"), "fluid.r");
    cfg.fluid.eta_inf = detail_config::number_or(fluid, "eta_inf", "fluid", 0.0);
    detail_config::rethrow_as_config("fluid", [&] {
      check_params(cfg.fluid);
      return 0;
    });
  }

  {
    const json& grid = detail_config::member(root, "grid", "case");
    cfg.grid.lx = detail_config::number(detail_config::member(grid, "lx", "grid"), "grid.lx");
    cfg.grid.ly = detail_config::number(detail_config::member(grid, "ly", "grid"), "grid.ly");
    cfg.grid.nx = detail_config::integer(detail_config::member(grid, "nx", "grid"), "grid.nx");
    cfg.grid.ny = detail_config::integer(detail_config::member(grid, "ny", "grid"), "grid.ny");
    detail_config::rethrow_as_config("grid", [&] {
      check_grid(cfg.grid);
      return 0;
    });
  }

  {
    const json& gap = detail_config::member(root, "gap", "case");
    const bool has_expr = gap.contains("expression");
    const bool has_table = gap.contains("table");
    if (has_expr == has_table)
      throw config_error("gap: give exactly one of 'expression' or 'table'");
    if (has_expr) {
      cfg.gap_spec.expression = detail_config::text(gap["expression"], "gap.expression");
      const Expression h = Expression::parse(cfg.gap_spec.expression);
      cfg.gap = detail_config::rethrow_as_config("gap.expression", [&] {
        return GapField::from_function(cfg.grid, [&](double x, double y) { return h(x, y); });
      });
    } else {
      cfg.gap_spec.table = detail_config::text(gap["table"], "gap.table");
      auto values = detail_config::csv_table(base / cfg.gap_spec.table, cfg.grid.nx, cfg.grid.ny,
                                             "gap.table");
      cfg.gap = detail_config::rethrow_as_config("gap.table", [&] {
        return GapField::from_cells(cfg.grid, std::move(values));
      });
    }
  }

  {
    const json& forcing = detail_config::member(root, "forcing", "case");
    const bool has_expr = forcing.contains("fx") || forcing.contains("fy");
    const bool has_table = forcing.contains("table");
    if (has_expr == has_table)
      throw config_error("forcing: give either 'fx'/'fy' expressions or a 'table'");
    if (has_expr) {
      cfg.forcing_spec.fx =
          detail_config::text(detail_config::member(forcing, "fx", "forcing"), "forcing.fx");
      cfg.forcing_spec.fy =
          detail_config::text(detail_config::member(forcing, "fy", "forcing"), "forcing.fy");
      const Expression fx = Expression::parse(cfg.forcing_spec.fx);
      const Expression fy = Expression::parse(cfg.forcing_spec.fy);
      cfg.forcing = detail_config::rethrow_as_config("forcing", [&] {
        return ForcingField::from_functions(
            cfg.grid, [&](double x, double y) { return fx(x, y); },
            [&](double x, double y) { return fy(x, y); });
      });
    } else {
      const json& table = forcing["table"];
      cfg.forcing_spec.table_fx =
          detail_config::text(detail_config::member(table, "fx", "forcing.table"),
                              "forcing.table.fx");
      cfg.forcing_spec.table_fy =
          detail_config::text(detail_config::member(table, "fy", "forcing.table"),
                              "forcing.table.fy");
      auto fx = detail_config::csv_table(base / cfg.forcing_spec.table_fx, cfg.grid.nx,
                                         cfg.grid.ny, "forcing.table.fx");
      auto fy = detail_config::csv_table(base / cfg.forcing_spec.table_fy, cfg.grid.nx,
                                         cfg.grid.ny, "forcing.table.fy");
      cfg.forcing = detail_config::rethrow_as_config("forcing.table", [&] {
        return ForcingField::from_cells(cfg.grid, std::move(fx), std::move(fy));
      });
    }
  }

  if (root.contains("solver")) {
    const json& s = root["solver"];
    cfg.solver.picard_tol = detail_config::number_or(s, "picard_tol", "solver", cfg.solver.picard_tol);
    cfg.solver.max_iters = detail_config::integer_or(s, "max_iters", "solver", cfg.solver.max_iters);
    cfg.solver.relaxation = detail_config::number_or(s, "relaxation", "solver", cfg.solver.relaxation);
    cfg.solver.linear_tol = detail_config::number_or(s, "linear_tol", "solver", cfg.solver.linear_tol);
    detail_config::rethrow_as_config("solver", [&] {
      check_solver_config(cfg.solver);
      return 0;
    });
  }

  if (root.contains("quadrature")) {
    const json& q = root["quadrature"];
    cfg.quadrature.panel_count =
        detail_config::integer_or(q, "panel_count", "quadrature", cfg.quadrature.panel_count);
    cfg.quadrature.nodes_per_panel = detail_config::integer_or(q, "nodes_per_panel", "quadrature",
                                                               cfg.quadrature.nodes_per_panel);
    cfg.quadrature.refinement_tol =
        detail_config::number_or(q, "refinement_tol", "quadrature", cfg.quadrature.refinement_tol);
    detail_config::rethrow_as_config("quadrature", [&] {
      check_quadrature(cfg.quadrature);
      return 0;
    });
  }

  cfg.n3 = detail_config::integer_or(root, "n3", "case", cfg.n3);
  if (cfg.n3 < 3) throw config_error("n3: reconstruction depth samples must be >= 3");

  if (root.contains("outputs")) {
    const json& o = root["outputs"];
    auto text_or = [&](const char* key, const std::string& fallback) {
      return o.contains(key) ? detail_config::text(o[key], std::string("outputs.") + key)
                             : fallback;
    };
    cfg.outputs.pressure_csv = text_or("pressure_csv", cfg.outputs.pressure_csv);
    cfg.outputs.flux_csv = text_or("flux_csv", cfg.outputs.flux_csv);
    cfg.outputs.vtk = text_or("vtk", cfg.outputs.vtk);
    cfg.outputs.report = text_or("report", cfg.outputs.report);
    if (o.contains("slices")) {
      if (!o["slices"].is_array()) throw config_error("outputs.slices: expected an array");
      cfg.outputs.slices.clear();
      for (const auto& v : o["slices"]) {
        const double s = detail_config::number(v, "outputs.slices");
        if (!(s >= 0.0 && s <= 1.0))
          throw config_error("outputs.slices: fractional heights must lie in [0, 1]");
        cfg.outputs.slices.push_back(s);
      }
    }
  }

  return cfg;
}

/// Serialization with every field explicit; loading the dump reproduces the
/// configuration exactly.
inline nlohmann::json to_json(const CaseConfig& cfg) {
  nlohmann::json root;
  root["fluid"] = {{"eta0", cfg.fluid.eta0},
                   {"lambda", cfg.fluid.lambda},
                   {"r", cfg.fluid.r},
                   {"eta_inf", cfg.fluid.eta_inf}};
  root["grid"] = {{"lx", cfg.grid.lx}, {"ly", cfg.grid.ly}, {"nx", cfg.grid.nx}, {"ny", cfg.grid.ny}};
  if (!cfg.gap_spec.expression.empty())
    root["gap"] = {{"expression", cfg.gap_spec.expression}};
  else
    root["gap"] = {{"table", cfg.gap_spec.table}};
  if (!cfg.forcing_spec.fx.empty() || !cfg.forcing_spec.fy.empty())
    root["forcing"] = {{"fx", cfg.forcing_spec.fx}, {"fy", cfg.forcing_spec.fy}};
  else
    root["forcing"] = {
        {"table", {{"fx", cfg.forcing_spec.table_fx}, {"fy", cfg.forcing_spec.table_fy}}}};
  root["solver"] = {{"picard_tol", cfg.solver.picard_tol},
                    {"max_iters", cfg.solver.max_iters},
                    {"relaxation", cfg.solver.relaxation},
                    {"linear_tol", cfg.solver.linear_tol}};
  root["quadrature"] = {{"panel_count", cfg.quadrature.panel_count},
                        {"nodes_per_panel", cfg.quadrature.nodes_per_panel},
                        {"refinement_tol", cfg.quadrature.refinement_tol}};
  root["n3"] = cfg.n3;
  root["outputs"] = {{"pressure_csv", cfg.outputs.pressure_csv},
                     {"flux_csv", cfg.outputs.flux_csv},
                     {"vtk", cfg.outputs.vtk},
                     {"report", cfg.outputs.report},
                     {"slices", cfg.outputs.slices}};
  return root;
}

inline void dump_config(const CaseConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error(path + ": cannot write config dump");
  out << to_json(cfg).dump(2) << "\n";
}

} // namespace thinfilm
