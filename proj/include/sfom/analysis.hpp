#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "sfom/manufactured.hpp"
#include "sfom/model.hpp"
#include "sfom/solver.hpp"

namespace sfom::analysis {

struct TaylorGeometry {
  int m = 0, l = 0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
};

struct TaylorDataCoeffs {
  double a = 0.0;  // u.u
  double b = 0.0;  // ux.ux
  double d = 0.0;  // u.ux
  double g = 0.0;  // u.ut
  double e = 0.0;  // ux.ut
};

struct TaylorBeta {
  int m = 0, l = 0;
  double K1 = 0.0, K2 = 0.0;
  double denominator = 0.0;  // (ab - d^2)(c1 c2 - c3^2)
  Eigen::VectorXd beta;      // entries over j = -m..l
  double l1() const { return beta.lpNorm<1>(); }
};

struct StabilityReport {
  std::vector<double> row_l1;
  double max_row_l1 = 0.0;
  double rho = -1.0;  // -1: not computed
  std::vector<std::complex<double>> eigenvalues;  // dense mode only
  bool sufficient_stable = false;  // all row l1 <= 1
  bool stable = false;             // rho <= 1 + 1e-8 (forced true when sufficient passes)
  bool power_converged = true;
  bool quadratic_ignored = false;

  std::string to_json() const;
};

// beta_j = exp(-c dt) cos(x_j) cos(x_i) / sum_k cos(x_k)^2
solver::CoefficientVector diffusion_closed_form_beta(const Eigen::VectorXd& xQ, double x_i,
                                                     double c, double dt);

struct DiffusionTaylorBeta {
  solver::CoefficientVector beta;  // 3-point row
  double l1 = 0.0;
  bool near_singular = false;  // |cos(x_i)| < 1e-8
};

// (1 - c dt)/(3 + 2 (tan(x_i) dx)^2) * [1 + tan(x_i) dx, 1, 1 - tan(x_i) dx]
DiffusionTaylorBeta diffusion_taylor_beta(double x_i, double c, double dt, double dx);

// sum of the linear feature block only
double consistency_sum(const solver::CoefficientVector& beta);

// c1 = m+l+1, c2 = [m(m+1)(2m+1)+l(l+1)(2l+1)]/6, c3 = (l-m)(m+l+1)/2
TaylorGeometry taylor_geometry(int m, int l);

TaylorDataCoeffs taylor_data_coeffs(const Eigen::VectorXd& u, const Eigen::VectorXd& dudx,
                                    const Eigen::VectorXd& dudt);
// derivative series by second-order central differences in space, first-order forward in time
TaylorDataCoeffs taylor_data_coeffs_fd(const manufactured::SnapshotSet& snap,
                                       const mesh::Grid1D& grid, int i);

TaylorBeta taylor_first_order_beta(const TaylorGeometry& geom, const TaylorDataCoeffs& coeffs,
                                   double dx, double dt);

// sum_j |K1 + j K2| <= denominator, i.e. ||beta||_1 <= 1
bool sufficient_stability_check(const TaylorBeta& tb);

// dt/dx <= (m+1)/(3c) for a symmetric stencil of half-width m
double sampling_cfl_bound(int m, double c);

// row l1 norms and the sufficient verdict only (no spectrum)
StabilityReport gershgorin_check(const model::SparseLinearOperator& A);
StabilityReport gershgorin_check(const model::DiscreteModel& model);

enum class SpectralMode { Auto, Dense, Power };

// Auto: dense eigensolve for n <= 4000, else power iteration (tol 1e-8, <= 1e4 iterations,
// non-convergence reported via power_converged)
StabilityReport spectral_radius(const model::SparseLinearOperator& A,
                                SpectralMode mode = SpectralMode::Auto);

}  // namespace sfom::analysis
