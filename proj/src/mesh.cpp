#include "sfom/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace sfom::mesh {

namespace {

int pmod(int a, int n) {
  int r = a % n;
  return r < 0 ? r + n : r;
}

int point_count(double a, double b, double h) {
  if (h <= 0.0) throw std::invalid_argument("grid spacing must be positive");
  double ratio = (b - a) / h;
  double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) < 1e-9) return static_cast<int>(nearest);
  return static_cast<int>(std::floor(ratio)) + 1;
}

}  // namespace

Grid1D make_grid_1d(double a, double b, double dx, bool periodic) {
  Grid1D g{point_count(a, b, dx), dx, a, periodic};
  if (g.n < 3) throw std::invalid_argument("grid needs at least 3 DOFs");
  return g;
}

Grid2D make_grid_2d(double ax, double bx, double ay, double by, double dx, double dy,
                    bool periodic) {
  Grid2D g;
  g.nx = point_count(ax, bx, dx);
  g.ny = point_count(ay, by, dy);
  g.dx = dx;
  g.dy = dy;
  g.x0 = ax;
  g.y0 = ay;
  g.periodic = periodic;
  if (g.nx < 3 || g.ny < 3) throw std::invalid_argument("grid needs at least 3 DOFs per axis");
  return g;
}

Stencil build_stencil_1d(int m, int l) {
  if (m < 0 || l < 0) throw std::invalid_argument("stencil widths must be nonnegative");
  if (m + l < 1) throw std::invalid_argument("degenerate stencil: m = l = 0");
  Stencil st;
  st.dims = 1;
  st.m = m;
  st.l = l;
  for (int j = -m; j <= l; ++j) st.di.push_back(j);
  return st;
}

Stencil build_block_stencil_2d(int halfwidth) {
  if (halfwidth < 1) throw std::invalid_argument("block stencil halfwidth must be >= 1");
  Stencil st;
  st.dims = 2;
  for (int di = -halfwidth; di <= halfwidth; ++di)
    for (int dj = -halfwidth; dj <= halfwidth; ++dj) {
      st.di.push_back(di);
      st.dj.push_back(dj);
    }
  return st;
}

SupportSet support_set(const Grid1D& grid, int i, const Stencil& st) {
  if (st.dims != 1) throw std::invalid_argument("1D grid needs a 1D stencil");
  if (i < 0 || i >= grid.n) throw std::out_of_range("DOF index out of range");
  SupportSet s{i, {}};
  s.members.reserve(st.di.size());
  for (int off : st.di) {
    int j = i + off;
    if (grid.periodic) {
      j = pmod(j, grid.n);
    } else if (j < 0 || j >= grid.n) {
      throw std::out_of_range("stencil overhangs a non-periodic boundary");
    }
    s.members.push_back(j);
  }
  return s;
}

SupportSet support_set(const Grid2D& grid, int i, const Stencil& st) {
  if (st.dims != 2) throw std::invalid_argument("2D grid needs a 2D stencil");
  if (i < 0 || i >= grid.n()) throw std::out_of_range("DOF index out of range");
  int ix = i / grid.ny, iy = i % grid.ny;
  SupportSet s{i, {}};
  s.members.reserve(st.di.size());
  for (size_t k = 0; k < st.di.size(); ++k) {
    int jx = ix + st.di[k], jy = iy + st.dj[k];
    if (grid.periodic) {
      jx = pmod(jx, grid.nx);
      jy = pmod(jy, grid.ny);
    } else if (jx < 0 || jx >= grid.nx || jy < 0 || jy >= grid.ny) {
      throw std::out_of_range("stencil overhangs a non-periodic boundary");
    }
    s.members.push_back(grid.index(jx, jy));
  }
  return s;
}

SupportSet adjacency_order_support(const Grid1D& grid, int i, int order) {
  if (order < 1) throw std::invalid_argument("adjacency order must be >= 1");
  return support_set(grid, i, build_stencil_1d(order, order));
}

SupportSet adjacency_order_support(const Grid2D& grid, int i, int order) {
  if (order < 1) throw std::invalid_argument("adjacency order must be >= 1");
  Stencil st;
  st.dims = 2;
  for (int di = -order; di <= order; ++di)
    for (int dj = -order; dj <= order; ++dj)
      if (std::abs(di) + std::abs(dj) <= order) {
        st.di.push_back(di);
        st.dj.push_back(dj);
      }
  return support_set(grid, i, st);
}

}  // namespace sfom::mesh
