#include "sfom/manufactured.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sfom::manufactured {

AdvectionConfig AdvectionConfig::cos_pi(double c, double dt) {
  AdvectionConfig cfg;
  cfg.c = c;
  cfg.dt = dt;
  cfg.u0 = [](double x) { return std::cos(std::numbers::pi * x); };
  cfg.du0 = [](double x) { return -std::numbers::pi * std::sin(std::numbers::pi * x); };
  cfg.profile = "cos_pi";
  return cfg;
}

AdvectionConfig AdvectionConfig::cosine(double c, double dt) {
  AdvectionConfig cfg;
  cfg.c = c;
  cfg.dt = dt;
  cfg.u0 = [](double x) { return std::cos(x); };
  cfg.du0 = [](double x) { return -std::sin(x); };
  cfg.profile = "cos";
  return cfg;
}

SnapshotSet diffusion_analytic(const mesh::Grid1D& grid, const DiffusionConfig& cfg, int N) {
  if (cfg.c <= 0.0) throw std::invalid_argument("diffusivity must be positive");
  if (cfg.dt <= 0.0 || N < 2) throw std::invalid_argument("need dt > 0 and N >= 2");
  SnapshotSet snap;
  snap.dt = cfg.dt;
  snap.t0 = cfg.t0;
  snap.states.resize(grid.n, N + 1);
  for (int k = 0; k <= N; ++k) {
    double decay = std::exp(-cfg.c * (cfg.t0 + k * cfg.dt));
    for (int i = 0; i < grid.n; ++i) snap.states(i, k) = std::cos(grid.coordinate(i)) * decay;
  }
  return snap;
}

SnapshotSet advection_analytic(const mesh::Grid1D& grid, const AdvectionConfig& cfg, int N) {
  if (!cfg.u0) throw std::invalid_argument("advection profile not set");
  if (cfg.dt <= 0.0 || N < 2) throw std::invalid_argument("need dt > 0 and N >= 2");
  const double L = grid.length();
  auto wrap = [&](double z) {
    double y = std::fmod(z - grid.x0, L);
    if (y < 0) y += L;
    return grid.x0 + y;
  };
  SnapshotSet snap;
  snap.dt = cfg.dt;
  snap.t0 = cfg.t0;
  snap.states.resize(grid.n, N + 1);
  for (int k = 0; k <= N; ++k) {
    double shift = cfg.c * (cfg.t0 + k * cfg.dt);
    for (int i = 0; i < grid.n; ++i)
      snap.states(i, k) = cfg.u0(wrap(grid.coordinate(i) + shift));
  }
  return snap;
}

Eigen::VectorXd burgers_initial(const mesh::Grid2D& grid, double alpha, double mu) {
  Eigen::VectorXd u(grid.n());
  for (int ix = 0; ix < grid.nx; ++ix) {
    double gx = std::exp(-mu * (grid.x(ix) - 0.5) * (grid.x(ix) - 0.5));
    for (int iy = 0; iy < grid.ny; ++iy) {
      double gy = std::exp(-mu * (grid.y(iy) - 0.5) * (grid.y(iy) - 0.5));
      u[grid.index(ix, iy)] = alpha * gx * gy;
    }
  }
  return u;
}

namespace {

struct BurgersRhs {
  const mesh::Grid2D& grid;
  double c, nu;

  void operator()(const Eigen::VectorXd& u, Eigen::VectorXd& out) const {
    const int nx = grid.nx, ny = grid.ny;
    const double i2dx = 1.0 / (2.0 * grid.dx), i2dy = 1.0 / (2.0 * grid.dy);
    const double idx2 = 1.0 / (grid.dx * grid.dx), idy2 = 1.0 / (grid.dy * grid.dy);
    for (int ix = 0; ix < nx; ++ix) {
      const int xp1 = (ix + 1) % nx, xp2 = (ix + 2) % nx, xm1 = (ix + nx - 1) % nx;
      for (int iy = 0; iy < ny; ++iy) {
        const int yp1 = (iy + 1) % ny, yp2 = (iy + 2) % ny, ym1 = (iy + ny - 1) % ny;
        const double uc = u[grid.index(ix, iy)];
        const double ux =
            (-3.0 * uc + 4.0 * u[grid.index(xp1, iy)] - u[grid.index(xp2, iy)]) * i2dx;
        const double uy =
            (-3.0 * uc + 4.0 * u[grid.index(ix, yp1)] - u[grid.index(ix, yp2)]) * i2dy;
        const double lap =
            (u[grid.index(xp1, iy)] - 2.0 * uc + u[grid.index(xm1, iy)]) * idx2 +
            (u[grid.index(ix, yp1)] - 2.0 * uc + u[grid.index(ix, ym1)]) * idy2;
        out[grid.index(ix, iy)] = c * uc * (ux + uy) + nu * lap;
      }
    }
  }
};

}  // namespace

SnapshotSet burgers_solve(const mesh::Grid2D& grid, const BurgersConfig& cfg) {
  if (cfg.nu < 0.0) throw std::invalid_argument("viscosity must be nonnegative");
  if (cfg.dx <= 0.0 || cfg.dt <= 0.0) throw std::invalid_argument("need dx, dt > 0");
  const int N = static_cast<int>(std::round(cfg.T / cfg.dt));
  const int n = grid.n();
  BurgersRhs rhs{grid, cfg.c, cfg.nu};

  SnapshotSet snap;
  snap.dt = cfg.dt;
  snap.t0 = 0.0;
  snap.states.resize(n, N + 1);

  Eigen::VectorXd u = burgers_initial(grid, cfg.alpha, cfg.mu);
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), tmp(n);
  snap.states.col(0) = u;
  for (int k = 0; k < N; ++k) {
    rhs(u, k1);
    tmp = u + 0.5 * cfg.dt * k1;
    rhs(tmp, k2);
    tmp = u + 0.5 * cfg.dt * k2;
    rhs(tmp, k3);
    tmp = u + cfg.dt * k3;
    rhs(tmp, k4);
    u += (cfg.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!u.allFinite() || u.cwiseAbs().maxCoeff() > 1e6)
      throw std::runtime_error("data generation blew up at step " + std::to_string(k + 1));
    snap.states.col(k + 1) = u;
  }
  return snap;
}

void save_csv(const SnapshotSet& snap, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << snap.n() << "," << snap.dt << "," << snap.t0 << "\n";
  for (int i = 0; i < snap.n(); ++i) {
    for (int k = 0; k < snap.states.cols(); ++k) {
      if (k) out << ",";
      out << snap.states(i, k);
    }
    out << "\n";
  }
}

SnapshotSet load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty snapshot file");
  SnapshotSet snap;
  int n = 0;
  {
    std::istringstream hdr(line);
    std::string tok;
    std::getline(hdr, tok, ',');
    n = std::stoi(tok);
    std::getline(hdr, tok, ',');
    snap.dt = std::stod(tok);
    std::getline(hdr, tok, ',');
    snap.t0 = std::stod(tok);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    std::vector<double> row;
    while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
    rows.push_back(std::move(row));
  }
  if (static_cast<int>(rows.size()) != n) throw std::runtime_error("snapshot row count mismatch");
  snap.states.resize(n, rows[0].size());
  for (int i = 0; i < n; ++i) {
    if (rows[i].size() != rows[0].size())
      throw std::runtime_error("ragged snapshot file");
    for (size_t k = 0; k < rows[i].size(); ++k) snap.states(i, k) = rows[i][k];
  }
  return snap;
}

}  // namespace sfom::manufactured
