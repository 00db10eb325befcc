#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sfom/analysis.hpp"
#include "sfom/manufactured.hpp"
#include "sfom/model.hpp"
#include "sfom/solver.hpp"

namespace sfom::experiments {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> provenance;  // emitted as "# key: value"

  std::string to_csv() const;
  void save_csv(const std::string& path) const;
};

std::string format_value(double v);  // %.17g, locale-free
std::string format_value(int v);
std::string format_value(long v);
std::string format_value(bool v);

std::uint64_t fnv1a_hash(std::string_view s);

// ---- diffusion sweep --------------------------------------------------------

struct DiffusionSweepConfig {
  double c = 1.0;
  double T = 10.0;
  std::vector<double> dx_values;  // empty: 8 log-spaced in [0.005, 0.3]
  std::vector<double> dt_values;  // empty: 8 log-spaced in [0.001, 0.1]
  double augment_fraction = 0.05;
  std::uint64_t seed = 12345;
  bool compute_rho = true;
};

struct DiffusionCell {
  std::string mode;  // "per_dof" | "augmented"
  double dx = 0.0, dt = 0.0;
  int n = 0;
  bool completed = false;
  bool diverged = false;
  int diverged_step = -1;
  double error = 0.0;  // percent at T; NaN when the rollout diverged
  double rho = -1.0;
  double max_row_l1 = 0.0;
  bool gershgorin_pass = false;
  bool rho_exceeds_one = false;  // rho > 1 + 1e-8
  bool unstable = false;         // rho_exceeds_one || diverged
};

struct DiffusionSweepResult {
  DiffusionSweepConfig config;  // with defaults resolved
  std::vector<DiffusionCell> cells;
  ResultTable table;
};

DiffusionSweepResult run_diffusion_sweep(const DiffusionSweepConfig& cfg);

// ---- advection CFL map ------------------------------------------------------

struct AdvectionCflConfig {
  int m = 1;  // symmetric stencil half-width
  double c = 1.0;
  std::string profile = "cos_pi";  // "cos_pi" | "cos"
  double T = 5.0;
  std::vector<double> dx_values;  // empty: 8 linear in [0.005, 0.01], snapped commensurate
  std::vector<double> dt_values;  // empty: 8 log-spaced in [0.002, 0.02]
  double phase_tolerance = 0.01;  // row-l1 slack for the stable/unstable verdict
  int taylor_dof = -1;            // -1: n/3
  bool compute_rho = true;
};

struct AdvectionCell {
  double dx = 0.0, dt = 0.0, ratio = 0.0;
  int n = 0;
  bool completed = false;
  bool diverged = false;
  int diverged_step = -1;
  double error = 0.0;  // percent at T; NaN when the rollout diverged
  double rho = -1.0;
  double max_row_l1 = 0.0;
  bool stable = false;           // max_row_l1 <= 1 + phase_tolerance
  bool rho_exceeds_one = false;  // recorded alongside, not the phase verdict
  bool taylor_stable = false;    // sufficient check on the first-order predictor
};

struct AdvectionCflResult {
  AdvectionCflConfig config;  // with defaults resolved and dx snapped
  double bound = 0.0;         // (m+1)/(3c)
  std::vector<AdvectionCell> cells;
  ResultTable table;
};

AdvectionCflResult run_advection_cfl_map(const AdvectionCflConfig& cfg);

// ---- Burgers ---------------------------------------------------------------

struct BurgersRunConfig {
  manufactured::BurgersConfig physics;  // training IC is physics.alpha, physics.mu
  int stencil_halfwidth = 2;            // 5x5 block support
  int augment_count = 500;
  std::uint64_t seed = 12345;
  std::vector<double> eta_values;    // empty: 30 log-spaced in [1e-5, 1]
  std::vector<double> g_values;      // empty: {10, 20, 50, 80, 100}
  std::vector<double> alpha_sweep;   // empty: {0.1, 0.2, 0.5, 1, 2, 5}
  std::vector<double> mu_sweep;      // empty: {1, 2, 5, 7, 10, 15, 20}
};

struct BurgersSweepCell {
  double alpha = 0.0, mu = 0.0;
  bool completed = false;
  bool diverged = false;
  int diverged_step = -1;
  double error = 0.0;  // percent at T vs the fine solver; NaN when diverged
};

struct BurgersRunResult {
  BurgersRunConfig config;  // with defaults resolved
  solver::LCurveResult lcurve;
  model::DiscreteModel selected;
  analysis::StabilityReport stability;  // dense spectrum of the linear part
  double training_error = 0.0;          // percent at T on the training trajectory
  std::vector<BurgersSweepCell> sweep;
  ResultTable table;         // the IC sweep
  std::string summary_json;  // verdicts + selected hyperparameters + L-curve data
  std::string spectrum_csv;  // re,im rows
};

BurgersRunResult run_burgers(const BurgersRunConfig& cfg);

// ---- model diagnostics ------------------------------------------------------

struct StabilityReportResult {
  analysis::StabilityReport report;
  std::vector<double> consistency;  // per-row sum of linear coefficients
  ResultTable table;                // row, l1, consistency_sum
  std::string summary_json;
  std::string spectrum_csv;  // empty when the spectrum was not computed densely
};

StabilityReportResult run_stability_report(const model::DiscreteModel& m);

struct SimulateResult {
  model::RolloutResult rollout;
  ResultTable table;  // dof, value of the final state
};

SimulateResult run_simulate(const model::DiscreteModel& m, const Eigen::VectorXd& u0, int steps,
                            double guard = 1e6);

}  // namespace sfom::experiments
