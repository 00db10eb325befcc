#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "sfom/mesh.hpp"

namespace sfom::manufactured {

struct SnapshotSet {
  Eigen::MatrixXd states;  // n x (N+1); column k holds u(t_k)
  double dt = 0.0;
  double t0 = 0.0;

  int n() const { return static_cast<int>(states.rows()); }
  int transitions() const { return static_cast<int>(states.cols()) - 1; }
};

struct DiffusionConfig {
  double c = 1.0;  // diffusivity
  double dt = 0.0;
  double t0 = 0.0;
};

struct AdvectionConfig {
  double c = 1.0;  // transport speed
  std::function<double(double)> u0;
  std::function<double(double)> du0;  // profile derivative, used by the stability predictor
  std::string profile = "custom";
  double dt = 0.0;
  double t0 = 0.0;

  static AdvectionConfig cos_pi(double c, double dt);  // u0(x) = cos(pi x)
  static AdvectionConfig cosine(double c, double dt);  // u0(x) = cos(x), wrapped at the seam
};

struct BurgersConfig {
  double c = 0.1;    // transport coefficient
  double nu = 1e-3;  // kinematic viscosity
  double alpha = 1.0, mu = 10.0;  // IC amplitude and width
  double dx = 0.02, dt = 0.01, T = 10.0;
};

// states[i][k] = cos(x_i) * exp(-c t_k)
SnapshotSet diffusion_analytic(const mesh::Grid1D& grid, const DiffusionConfig& cfg, int N);

// states[i][k] = u0(wrap(x_i + c t_k)), wrap period = grid.length()
SnapshotSet advection_analytic(const mesh::Grid1D& grid, const AdvectionConfig& cfg, int N);

// alpha * exp(-mu (x-1/2)^2) * exp(-mu (y-1/2)^2), row-major over the grid
Eigen::VectorXd burgers_initial(const mesh::Grid2D& grid, double alpha, double mu);

// du/dt = c u (u_x + u_y) + nu (u_xx + u_yy), periodic; second-order central diffusion,
// second-order forward advection derivatives; classical RK4 at the snapshot step.
// Throws on blow-up (max|u| > 1e6).
SnapshotSet burgers_solve(const mesh::Grid2D& grid, const BurgersConfig& cfg);

// CSV layout: header row "n,dt,t0", then one row per DOF
void save_csv(const SnapshotSet& snap, const std::string& path);
SnapshotSet load_csv(const std::string& path);

}  // namespace sfom::manufactured
