#include "sfom/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace sfom::solver {

SvdFactors svd(const Eigen::MatrixXd& M) {
  if (!M.allFinite()) throw std::invalid_argument("svd: non-finite input");
  Eigen::JacobiSVD<Eigen::MatrixXd> dec(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactors f{dec.matrixU(), dec.singularValues(), dec.matrixV()};
  for (int j = 0; j < f.Phi.cols(); ++j) {
    int imax = 0;
    f.Phi.col(j).cwiseAbs().maxCoeff(&imax);
    if (f.Phi(imax, j) < 0.0) {
      f.Phi.col(j) = -f.Phi.col(j);
      f.Psi.col(j) = -f.Psi.col(j);
    }
  }
  return f;
}

CoefficientVector min_norm_solve(const snapshot::LocalProblem& prob, double rank_cutoff) {
  SvdFactors f = svd(prob.D.transpose());  // D^T = Phi Sigma Psi^T, so D^+ = Phi Sigma^+ Psi^T
  CoefficientVector beta;
  beta.map = prob.map;
  const double s1 = f.sigma.size() ? f.sigma[0] : 0.0;
  if (s1 == 0.0) {
    beta.values = Eigen::VectorXd::Zero(prob.map.dim());
    beta.rank = 0;
    return beta;
  }
  Eigen::VectorXd proj = f.Psi.transpose() * prob.d;
  int rank = 0;
  for (int k = 0; k < f.sigma.size(); ++k) {
    if (f.sigma[k] < rank_cutoff * s1) {
      proj[k] = 0.0;
    } else {
      proj[k] /= f.sigma[k];
      ++rank;
    }
  }
  beta.values = f.Phi * proj;
  beta.rank = rank;
  return beta;
}

namespace {

Eigen::VectorXd block_weights(const snapshot::FeatureMap& map, double g) {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(map.dim());
  w.segment(map.linear_size(), map.quadratic_size()).setConstant(g);
  return w;
}

CoefficientVector ridge_from_gram(const Eigen::MatrixXd& G, const Eigen::VectorXd& rhs,
                                  const snapshot::FeatureMap& map, const RidgeConfig& cfg) {
  if (cfg.eta <= 0.0) throw std::invalid_argument("ridge needs eta > 0");
  if (cfg.quad_weight <= 0.0) throw std::invalid_argument("quadratic block weight must be > 0");
  Eigen::MatrixXd A = G;
  A.diagonal() += cfg.eta * block_weights(map, cfg.quad_weight);
  CoefficientVector beta;
  beta.map = map;
  beta.values = Eigen::LDLT<Eigen::MatrixXd>(A).solve(rhs);
  return beta;
}

}  // namespace

CoefficientVector ridge_solve(const snapshot::LocalProblem& prob, const RidgeConfig& cfg) {
  if (!prob.D.allFinite() || !prob.d.allFinite())
    throw std::invalid_argument("ridge: non-finite data");
  return ridge_from_gram(prob.D.transpose() * prob.D, prob.D.transpose() * prob.d, prob.map,
                         cfg);
}

CoefficientVector ridge_solve(const snapshot::GramProblem& prob, const RidgeConfig& cfg) {
  return ridge_from_gram(prob.G, prob.rhs, prob.map, cfg);
}

namespace {

double log10_floor(double v) { return std::log10(std::max(v, 1e-300)); }

// circumcircle curvature of the triple (p0, p1, p2), signed by turn orientation
double menger(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double a = std::hypot(x1 - x0, y1 - y0);
  const double b = std::hypot(x2 - x1, y2 - y1);
  const double c = std::hypot(x2 - x0, y2 - y0);
  if (a == 0.0 || b == 0.0 || c == 0.0) return 0.0;
  const double cross = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0);
  return 2.0 * cross / (a * b * c);
}

}  // namespace

LCurveResult l_curve_select(const snapshot::GramProblem& prob,
                            const std::vector<double>& eta_grid,
                            const std::vector<double>& g_grid,
                            const SpectralRadiusFn& screen) {
  const int K = static_cast<int>(eta_grid.size());
  if (K < 3) throw std::invalid_argument("l-curve needs at least 3 eta points");
  if (g_grid.empty()) throw std::invalid_argument("l-curve needs at least one g");
  for (int k = 1; k < K; ++k)
    if (eta_grid[k] <= eta_grid[k - 1])
      throw std::invalid_argument("eta grid must be increasing");

  LCurveResult res;
  res.candidates.reserve(static_cast<size_t>(K) * g_grid.size());
  for (double g : g_grid) {
    const int base = static_cast<int>(res.candidates.size());
    for (int k = 0; k < K; ++k) {
      LCurveCandidate cand;
      cand.eta = eta_grid[k];
      cand.g = g;
      CoefficientVector beta = ridge_solve(prob, RidgeConfig{eta_grid[k], g});
      cand.resid = prob.residual_norm(beta.values);
      cand.norm = beta.values.norm();
      cand.beta = std::move(beta.values);
      res.candidates.push_back(std::move(cand));
    }
    // Tikhonov monotonicity: residual nondecreasing, norm nonincreasing in eta.
    // The gram-form residual of a near-exact fit carries absolute noise of order
    // sqrt(eps * d^T d), so squared residuals are compared against the data energy.
    const double r2_slack = 1e-12 * std::max(prob.dtd, 1e-300);
    for (int k = 1; k < K; ++k) {
      const auto& lo = res.candidates[base + k - 1];
      const auto& hi = res.candidates[base + k];
      if (hi.resid * hi.resid < lo.resid * lo.resid * (1.0 - 1e-9) - r2_slack ||
          hi.norm > lo.norm * (1.0 + 1e-9) + 1e-12)
        throw std::logic_error("l-curve monotonicity violated");
    }
    int best = base + 1;
    double best_kappa = -1e300;
    for (int k = 1; k < K - 1; ++k) {
      const auto& p0 = res.candidates[base + k - 1];
      const auto& p1 = res.candidates[base + k];
      const auto& p2 = res.candidates[base + k + 1];
      const double kappa =
          menger(log10_floor(p0.resid), log10_floor(p0.norm), log10_floor(p1.resid),
                 log10_floor(p1.norm), log10_floor(p2.resid), log10_floor(p2.norm));
      if (kappa > best_kappa) {
        best_kappa = kappa;
        best = base + k;
      }
    }
    res.corner_index.push_back(best);
    res.candidates[best].corner = true;
    if (best == base + 1 || best == base + K - 2) res.corner_at_endpoint = true;
  }

  int pick = -1;
  if (screen) {
    double best_resid = 1e300, best_rho = 1e300;
    int fallback = -1;
    for (int idx : res.corner_index) {
      auto& cand = res.candidates[idx];
      CoefficientVector beta{cand.beta, prob.map, -1};
      cand.spectral_radius = screen(beta);
      if (cand.spectral_radius <= 1.0 && cand.resid < best_resid) {
        best_resid = cand.resid;
        pick = idx;
      }
      if (cand.spectral_radius < best_rho) {
        best_rho = cand.spectral_radius;
        fallback = idx;
      }
    }
    res.screen_found_stable = pick >= 0;
    if (pick < 0) pick = fallback;
  } else {
    double best_resid = 1e300;
    for (int idx : res.corner_index)
      if (res.candidates[idx].resid < best_resid) {
        best_resid = res.candidates[idx].resid;
        pick = idx;
      }
  }
  res.selected = pick;
  res.selected_beta = CoefficientVector{res.candidates[pick].beta, prob.map, -1};
  return res;
}

LCurveResult l_curve_select(const snapshot::LocalProblem& prob,
                            const std::vector<double>& eta_grid,
                            const std::vector<double>& g_grid,
                            const SpectralRadiusFn& screen) {
  return l_curve_select(snapshot::to_gram(prob), eta_grid, g_grid, screen);
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (count < 2) throw std::invalid_argument("grid needs at least 2 points");
  if (lo <= 0.0 || hi <= 0.0) throw std::invalid_argument("log grid endpoints must be positive");
  std::vector<double> out(count);
  const double llo = std::log10(lo), lhi = std::log10(hi);
  for (int i = 0; i < count; ++i)
    out[i] = std::pow(10.0, llo + (lhi - llo) * i / (count - 1));
  return out;
}

std::vector<double> lin_spaced(double lo, double hi, int count) {
  if (count < 2) throw std::invalid_argument("grid needs at least 2 points");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = lo + (hi - lo) * i / (count - 1);
  return out;
}

}  // namespace sfom::solver
