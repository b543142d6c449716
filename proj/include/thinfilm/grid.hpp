#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "thinfilm/errors.hpp"
#include "thinfilm/vec2.hpp"

namespace thinfilm {

/// Uniform cell-centered finite-volume grid over a rectangle [0,lx] x [0,ly].
/// Cells are indexed row-major with i fastest. x-faces sit at x = i dx
/// (i = 0..nx per row), y-faces at y = j dy (j = 0..ny per column).
struct Grid2D {
  double lx = 1.0;
  double ly = 1.0;
  int nx = 2;
  int ny = 2;

  double dx() const { return lx / nx; }
  double dy() const { return ly / ny; }
  double xc(int i) const { return (i + 0.5) * dx(); }
  double yc(int j) const { return (j + 0.5) * dy(); }

  int cells() const { return nx * ny; }
  int cell(int i, int j) const { return j * nx + i; }
  int x_faces() const { return (nx + 1) * ny; }
  int y_faces() const { return nx * (ny + 1); }
  int x_face(int i, int j) const { return j * (nx + 1) + i; } // i in [0,nx], j in [0,ny)
  int y_face(int i, int j) const { return j * nx + i; }       // i in [0,nx), j in [0,ny]
};

inline void check_grid(const Grid2D& g) {
  if (!(g.lx > 0.0) || !(g.ly > 0.0) || !std::isfinite(g.lx) || !std::isfinite(g.ly))
    throw std::invalid_argument("Grid2D: edge lengths must be finite and > 0");
  if (g.nx < 2 || g.ny < 2) throw std::invalid_argument("Grid2D: cell counts must be >= 2");
}

namespace detail {

inline void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

} // namespace detail

/// Scalar samples attached to faces: `x` on x-faces, `y` on y-faces. Used for
/// the driving field, face fluxes, and face mobilities.
struct FaceField {
  int nx = 0;
  int ny = 0;
  std::vector<double> x; // (nx+1)*ny
  std::vector<double> y; // nx*(ny+1)

  FaceField() = default;
  explicit FaceField(const Grid2D& g)
      : nx(g.nx), ny(g.ny), x(g.x_faces(), 0.0), y(g.y_faces(), 0.0) {}

  bool conforms(const Grid2D& g) const { return nx == g.nx && ny == g.ny; }
};

/// Film thickness h(y') sampled at cell centers and at faces. Face samples
/// come from the analytic profile when one is given, otherwise from averaging
/// the adjacent cells.
struct GapField {
  enum class Provenance { Analytic, Sampled };

  int nx = 0;
  int ny = 0;
  Provenance provenance = Provenance::Sampled;
  std::vector<double> cell;   // nx*ny
  std::vector<double> x_face; // (nx+1)*ny
  std::vector<double> y_face; // nx*(ny+1)

  bool conforms(const Grid2D& g) const { return nx == g.nx && ny == g.ny; }

  double min_thickness() const {
    double m = cell.empty() ? 0.0 : cell[0];
    for (double v : cell) m = std::min(m, v);
    for (double v : x_face) m = std::min(m, v);
    for (double v : y_face) m = std::min(m, v);
    return m;
  }
  double max_thickness() const {
    double m = 0.0;
    for (double v : cell) m = std::max(m, v);
    for (double v : x_face) m = std::max(m, v);
    for (double v : y_face) m = std::max(m, v);
    return m;
  }

  void validate() const {
    for (double v : cell)
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument("GapField: thickness must satisfy 0 < h_min <= h(y')");
    for (double v : x_face)
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument("GapField: thickness must satisfy 0 < h_min <= h(y')");
    for (double v : y_face)
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument("GapField: thickness must satisfy 0 < h_min <= h(y')");
  }

  template <class F>
  static GapField from_function(const Grid2D& g, F&& h) {
    check_grid(g);
    GapField gap;
    gap.nx = g.nx;
    gap.ny = g.ny;
    gap.provenance = Provenance::Analytic;
    gap.cell.resize(g.cells());
    gap.x_face.resize(g.x_faces());
    gap.y_face.resize(g.y_faces());
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) gap.cell[g.cell(i, j)] = h(g.xc(i), g.yc(j));
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i <= g.nx; ++i) gap.x_face[g.x_face(i, j)] = h(i * g.dx(), g.yc(j));
    for (int j = 0; j <= g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) gap.y_face[g.y_face(i, j)] = h(g.xc(i), j * g.dy());
    gap.validate();
    return gap;
  }

  static GapField from_cells(const Grid2D& g, std::vector<double> values) {
    check_grid(g);
    detail::require(static_cast<int>(values.size()) == g.cells(),
                    "GapField: cell table does not conform to the grid");
    GapField gap;
    gap.nx = g.nx;
    gap.ny = g.ny;
    gap.provenance = Provenance::Sampled;
    gap.cell = std::move(values);
    gap.x_face.resize(g.x_faces());
    gap.y_face.resize(g.y_faces());
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i <= g.nx; ++i) {
        const double left = gap.cell[g.cell(std::max(i - 1, 0), j)];
        const double right = gap.cell[g.cell(std::min(i, g.nx - 1), j)];
        gap.x_face[g.x_face(i, j)] = 0.5 * (left + right);
      }
    for (int j = 0; j <= g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double below = gap.cell[g.cell(i, std::max(j - 1, 0))];
        const double above = gap.cell[g.cell(i, std::min(j, g.ny - 1))];
        gap.y_face[g.y_face(i, j)] = 0.5 * (below + above);
      }
    gap.validate();
    return gap;
  }
};

/// Horizontal body force f'(y'). Cell samples carry the field; faces hold the
/// normal component used by the flux stencil (analytic where available,
/// otherwise the two-cell average).
struct ForcingField {
  int nx = 0;
  int ny = 0;
  std::vector<double> cell_x; // nx*ny
  std::vector<double> cell_y; // nx*ny
  std::vector<double> x_face; // fx at x-faces
  std::vector<double> y_face; // fy at y-faces

  bool conforms(const Grid2D& g) const { return nx == g.nx && ny == g.ny; }

  void validate() const {
    auto check = [](const std::vector<double>& v) {
      for (double a : v)
        if (!std::isfinite(a))
          throw std::invalid_argument("ForcingField: body force must be bounded");
    };
    check(cell_x);
    check(cell_y);
    check(x_face);
    check(y_face);
  }

  template <class FX, class FY>
  static ForcingField from_functions(const Grid2D& g, FX&& fx, FY&& fy) {
    check_grid(g);
    ForcingField f;
    f.nx = g.nx;
    f.ny = g.ny;
    f.cell_x.resize(g.cells());
    f.cell_y.resize(g.cells());
    f.x_face.resize(g.x_faces());
    f.y_face.resize(g.y_faces());
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        f.cell_x[g.cell(i, j)] = fx(g.xc(i), g.yc(j));
        f.cell_y[g.cell(i, j)] = fy(g.xc(i), g.yc(j));
      }
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i <= g.nx; ++i) f.x_face[g.x_face(i, j)] = fx(i * g.dx(), g.yc(j));
    for (int j = 0; j <= g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) f.y_face[g.y_face(i, j)] = fy(g.xc(i), j * g.dy());
    f.validate();
    return f;
  }

  static ForcingField from_cells(const Grid2D& g, std::vector<double> fx, std::vector<double> fy) {
    check_grid(g);
    detail::require(static_cast<int>(fx.size()) == g.cells() &&
                        static_cast<int>(fy.size()) == g.cells(),
                    "ForcingField: cell tables do not conform to the grid");
    ForcingField f;
    f.nx = g.nx;
    f.ny = g.ny;
    f.cell_x = std::move(fx);
    f.cell_y = std::move(fy);
    f.x_face.resize(g.x_faces());
    f.y_face.resize(g.y_faces());
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i <= g.nx; ++i) {
        const double left = f.cell_x[g.cell(std::max(i - 1, 0), j)];
        const double right = f.cell_x[g.cell(std::min(i, g.nx - 1), j)];
        f.x_face[g.x_face(i, j)] = 0.5 * (left + right);
      }
    for (int j = 0; j <= g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double below = f.cell_y[g.cell(i, std::max(j - 1, 0))];
        const double above = f.cell_y[g.cell(i, std::min(j, g.ny - 1))];
        f.y_face[g.y_face(i, j)] = 0.5 * (below + above);
      }
    f.validate();
    return f;
  }
};

/// Zero-mean cell-centered pressure.
struct PressureField {
  std::vector<double> value;

  PressureField() = default;
  explicit PressureField(const Grid2D& g) : value(g.cells(), 0.0) {}

  bool conforms(const Grid2D& g) const { return static_cast<int>(value.size()) == g.cells(); }

  double mean() const {
    if (value.empty()) return 0.0;
    double s = 0.0;
    for (double v : value) s += v;
    return s / static_cast<double>(value.size());
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : value) m = std::max(m, std::abs(v));
    return m;
  }

  void project_zero_mean() {
    const double m = mean();
    for (double& v : value) v -= m;
  }
};

} // namespace thinfilm
