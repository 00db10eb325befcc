#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfom/mesh.hpp"
#include "sfom/solver.hpp"

namespace sfom::model {

// uniform row sparsity: every row holds k entries, row-major storage
struct SparseLinearOperator {
  int n = 0;
  int k = 0;
  std::vector<int> cols;     // n*k
  std::vector<double> vals;  // n*k

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  Eigen::MatrixXd dense() const;
  double row_l1(int i) const;
};

// contribution_i = (H u)_i * u_i
struct QuadraticHadamardOperator {
  SparseLinearOperator H;
};

struct ModelMetadata {
  int dims = 1;
  int stencil_m = -1, stencil_l = -1, stencil_halfwidth = -1;
  std::string feature = "linear";
  double eta = 0.0, g = 0.0;
  std::uint64_t seed = 0;
  double dx = 0.0, dt = 0.0;
};

struct DiscreteModel {
  SparseLinearOperator A;
  std::optional<QuadraticHadamardOperator> H;
  std::optional<Eigen::VectorXd> c;
  ModelMetadata meta;
};

// every row gets the same coefficient block at its support columns (periodic grids only);
// full-quadratic feature maps have no row-local operator form and are rejected
DiscreteModel assemble_shared(const solver::CoefficientVector& beta, const mesh::Grid1D& grid,
                              const mesh::Stencil& st);
DiscreteModel assemble_shared(const solver::CoefficientVector& beta, const mesh::Grid2D& grid,
                              const mesh::Stencil& st);
DiscreteModel assemble_per_dof(const std::vector<solver::CoefficientVector>& betas,
                               const mesh::Grid1D& grid, const mesh::Stencil& st);
DiscreteModel assemble_per_dof(const std::vector<solver::CoefficientVector>& betas,
                               const mesh::Grid2D& grid, const mesh::Stencil& st);

// u' = A u + (H u) o u + c
Eigen::VectorXd step(const DiscreteModel& model, const Eigen::VectorXd& u);

struct RolloutResult {
  Eigen::VectorXd state;  // last finite state
  int steps = 0;
  bool completed = false;
  int diverged_step = -1;  // 1-based step at which the guard tripped
};

RolloutResult rollout(const DiscreteModel& model, Eigen::VectorXd u0, int K,
                      double guard = 1e6);

// mean(|pred - ref|) / max(ref) * 100
double average_error(const Eigen::VectorXd& pred, const Eigen::VectorXd& ref,
                     bool use_max_abs = false);

void save_json(const DiscreteModel& model, const std::string& path);
DiscreteModel load_json(const std::string& path);

}  // namespace sfom::model
