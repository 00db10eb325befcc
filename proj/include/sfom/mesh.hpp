#pragma once

#include <vector>

namespace sfom::mesh {

struct Grid1D {
  int n = 0;
  double dx = 0.0;
  double x0 = 0.0;
  bool periodic = true;

  double coordinate(int i) const { return x0 + i * dx; }
  // periodic tiling length of the DOF lattice
  double length() const { return n * dx; }
};

// n = floor((b-a)/dx) + 1, except when (b-a)/dx is within 1e-9 of an integer:
// then the duplicate endpoint is dropped so a periodic domain has no aliased node.
Grid1D make_grid_1d(double a, double b, double dx, bool periodic = true);

struct Grid2D {
  int nx = 0, ny = 0;
  double dx = 0.0, dy = 0.0;
  double x0 = 0.0, y0 = 0.0;
  bool periodic = true;

  int n() const { return nx * ny; }
  // row-major linearization, fixed convention
  int index(int ix, int iy) const { return ix * ny + iy; }
  double x(int ix) const { return x0 + ix * dx; }
  double y(int iy) const { return y0 + iy * dy; }
};

Grid2D make_grid_2d(double ax, double bx, double ay, double by, double dx, double dy,
                    bool periodic = true);

struct Stencil {
  int dims = 1;
  int m = 0, l = 0;      // 1D: left/right widths
  std::vector<int> di;   // ascending (1D); row-major over (di,dj) (2D)
  std::vector<int> dj;   // empty for 1D

  int size() const { return static_cast<int>(di.size()); }
};

Stencil build_stencil_1d(int m, int l);
Stencil build_block_stencil_2d(int halfwidth);

struct SupportSet {
  int center = 0;
  std::vector<int> members;  // ordered as the stencil offsets

  int cardinality() const { return static_cast<int>(members.size()); }
};

SupportSet support_set(const Grid1D& grid, int i, const Stencil& st);
SupportSet support_set(const Grid2D& grid, int i, const Stencil& st);

// all DOFs within taxicab graph distance <= order (1D: |di| <= order)
SupportSet adjacency_order_support(const Grid1D& grid, int i, int order);
SupportSet adjacency_order_support(const Grid2D& grid, int i, int order);

}  // namespace sfom::mesh
