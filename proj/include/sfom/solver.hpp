#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "sfom/snapshot.hpp"

namespace sfom::solver {

// thin SVD of M itself: M = Phi * diag(sigma) * Psi^T, sigma descending,
// sign fixed so each Phi column's largest-magnitude entry is positive
struct SvdFactors {
  Eigen::MatrixXd Phi;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd Psi;
};

SvdFactors svd(const Eigen::MatrixXd& M);

struct CoefficientVector {
  Eigen::VectorXd values;
  snapshot::FeatureMap map;
  int rank = -1;  // effective rank used by the pseudo-inverse path; -1 when not applicable

  Eigen::VectorXd linear_block() const { return values.head(map.linear_size()); }
  Eigen::VectorXd quadratic_block() const {
    return values.segment(map.linear_size(), map.quadratic_size());
  }
  double constant_term() const { return map.has_constant() ? values[values.size() - 1] : 0.0; }
};

// beta = Phi Sigma^+ Psi^T d on the SVD of D^T; singular values below
// rank_cutoff * sigma_1 are dropped from the pseudo-inverse
CoefficientVector min_norm_solve(const snapshot::LocalProblem& prob, double rank_cutoff = 1e-10);

struct RidgeConfig {
  double eta = 0.0;
  double quad_weight = 1.0;  // g: multiplies eta on the quadratic block only
};

// (D^T D + eta W) beta = D^T d, W diagonal with per-block weights (linear 1, quadratic g,
// constant 1)
CoefficientVector ridge_solve(const snapshot::LocalProblem& prob, const RidgeConfig& cfg);
CoefficientVector ridge_solve(const snapshot::GramProblem& prob, const RidgeConfig& cfg);

struct LCurveCandidate {
  double eta = 0.0, g = 0.0;
  double resid = 0.0;   // ||D beta - d||
  double norm = 0.0;    // ||beta||
  Eigen::VectorXd beta;
  double spectral_radius = -1.0;  // filled for corner candidates when a screen is given
  bool corner = false;
};

struct LCurveResult {
  std::vector<LCurveCandidate> candidates;  // g-major, eta ascending within each g
  std::vector<int> corner_index;            // into candidates, one per g
  bool corner_at_endpoint = false;          // any corner at the first/last interior vertex
  int selected = -1;
  CoefficientVector selected_beta;
  bool screen_found_stable = false;
};

using SpectralRadiusFn = std::function<double(const CoefficientVector&)>;

// per-g corner = maximum discrete (circumcircle) curvature of the (log resid, log norm)
// polyline; the screen keeps corners with spectral radius <= 1 and picks the smallest
// residual among them, falling back to the smallest spectral radius when none qualifies.
// Without a screen callback the corner with the smallest residual is selected.
LCurveResult l_curve_select(const snapshot::GramProblem& prob,
                            const std::vector<double>& eta_grid,
                            const std::vector<double>& g_grid,
                            const SpectralRadiusFn& screen = {});
LCurveResult l_curve_select(const snapshot::LocalProblem& prob,
                            const std::vector<double>& eta_grid,
                            const std::vector<double>& g_grid,
                            const SpectralRadiusFn& screen = {});

std::vector<double> log_spaced(double lo, double hi, int count);
std::vector<double> lin_spaced(double lo, double hi, int count);

}  // namespace sfom::solver
