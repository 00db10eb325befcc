#include "sfom/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "json.hpp"
#include "sfom/mesh.hpp"
#include "sfom/snapshot.hpp"

namespace sfom::experiments {

namespace {

constexpr double kRhoTol = 1e-8;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

using nlohmann::ordered_json;

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::pair<std::string, std::string>> provenance(const std::string& name,
                                                            std::uint64_t seed,
                                                            const ordered_json& cfg) {
  const std::string dump = cfg.dump();
  return {{"experiment", name},
          {"toolkit_version", kToolkitVersion},
          {"seed", std::to_string(seed)},
          {"config", dump},
          {"config_hash", hash_hex(fnv1a_hash(dump))}};
}

int step_count(double T, double dt) {
  if (dt <= 0.0 || T <= 0.0) throw std::invalid_argument("T and dt must be positive");
  return std::max(static_cast<int>(std::lround(T / dt)), 1);
}

}  // namespace

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string format_value(int v) { return std::to_string(v); }
std::string format_value(long v) { return std::to_string(v); }
std::string format_value(bool v) { return v ? "true" : "false"; }

std::uint64_t fnv1a_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ResultTable::to_csv() const {
  std::string out;
  for (const auto& [key, value] : provenance) out += "# " + key + ": " + value + "\n";
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j) out += ',';
    out += columns[j];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw std::logic_error("ragged result row");
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += row[j];
    }
    out += '\n';
  }
  return out;
}

void ResultTable::save_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << to_csv();
}

// ---- diffusion sweep --------------------------------------------------------

DiffusionSweepResult run_diffusion_sweep(const DiffusionSweepConfig& cfg_in) {
  DiffusionSweepResult out;
  out.config = cfg_in;
  auto& cfg = out.config;
  if (cfg.c <= 0.0) throw std::invalid_argument("diffusivity must be positive");
  if (cfg.augment_fraction <= 0.0 || cfg.augment_fraction > 1.0)
    throw std::invalid_argument("augmentation fraction must lie in (0, 1]");
  if (cfg.dx_values.empty()) cfg.dx_values = solver::log_spaced(0.005, 0.3, 8);
  if (cfg.dt_values.empty()) cfg.dt_values = solver::log_spaced(0.001, 0.1, 8);

  const double pi = std::numbers::pi;
  const mesh::Stencil st = mesh::build_stencil_1d(1, 1);
  const snapshot::FeatureMap map{snapshot::FeatureKind::Linear, 3};

  for (const char* mode : {"per_dof", "augmented"}) {
    for (const double dx : cfg.dx_values) {
      const mesh::Grid1D grid = mesh::make_grid_1d(-pi, pi, dx, true);
      for (const double dt : cfg.dt_values) {
        const int N = step_count(cfg.T, dt);
        const auto snap =
            manufactured::diffusion_analytic(grid, {cfg.c, dt, 0.0}, N);

        model::DiscreteModel m;
        if (std::string_view(mode) == "per_dof") {
          std::vector<solver::CoefficientVector> betas(static_cast<std::size_t>(grid.n));
          for (int i = 0; i < grid.n; ++i)
            betas[static_cast<std::size_t>(i)] = solver::min_norm_solve(
                snapshot::assemble_local(snap, i, mesh::support_set(grid, i, st), map));
          m = model::assemble_per_dof(betas, grid, st);
        } else {
          const auto plan =
              snapshot::sample_augmentation_fraction(grid.n, cfg.augment_fraction, cfg.seed);
          m = model::assemble_shared(
              solver::min_norm_solve(snapshot::augment(snap, plan, grid, st, map)), grid, st);
        }

        DiffusionCell cell;
        cell.mode = mode;
        cell.dx = dx;
        cell.dt = dt;
        cell.n = grid.n;
        const auto roll = model::rollout(m, snap.states.col(0), N);
        cell.completed = roll.completed;
        cell.diverged = !roll.completed;
        cell.diverged_step = roll.diverged_step;
        cell.error =
            roll.completed ? model::average_error(roll.state, snap.states.col(N)) : kNaN;
        const analysis::StabilityReport rep =
            cfg.compute_rho ? analysis::spectral_radius(m.A) : analysis::gershgorin_check(m.A);
        cell.rho = rep.rho;
        cell.max_row_l1 = rep.max_row_l1;
        cell.gershgorin_pass = rep.sufficient_stable;
        cell.rho_exceeds_one = rep.rho > 1.0 + kRhoTol;
        cell.unstable = cell.rho_exceeds_one || cell.diverged;
        out.cells.push_back(std::move(cell));
      }
    }
  }

  const ordered_json jc{{"c", cfg.c},
                        {"T", cfg.T},
                        {"domain", {-pi, pi}},
                        {"stencil", {1, 1}},
                        {"dx_values", cfg.dx_values},
                        {"dt_values", cfg.dt_values},
                        {"augment_fraction", cfg.augment_fraction},
                        {"seed", cfg.seed},
                        {"compute_rho", cfg.compute_rho}};
  out.table.provenance = provenance("diffusion_sweep", cfg.seed, jc);
  out.table.columns = {"mode",      "dx",        "dt",
                       "n",         "completed", "diverged",
                       "diverged_step", "error_pct", "rho",
                       "max_row_l1",    "gershgorin_pass", "rho_exceeds_one",
                       "unstable"};
  for (const auto& c : out.cells)
    out.table.rows.push_back({c.mode, format_value(c.dx), format_value(c.dt), format_value(c.n),
                              format_value(c.completed), format_value(c.diverged),
                              format_value(c.diverged_step), format_value(c.error),
                              format_value(c.rho), format_value(c.max_row_l1),
                              format_value(c.gershgorin_pass), format_value(c.rho_exceeds_one),
                              format_value(c.unstable)});
  return out;
}

// ---- advection CFL map ------------------------------------------------------

AdvectionCflResult run_advection_cfl_map(const AdvectionCflConfig& cfg_in) {
  AdvectionCflResult out;
  out.config = cfg_in;
  auto& cfg = out.config;
  if (cfg.m != 1 && cfg.m != 2) throw std::invalid_argument("stencil half-width must be 1 or 2");
  if (cfg.c <= 0.0) throw std::invalid_argument("transport speed must be positive");
  if (cfg.profile != "cos_pi" && cfg.profile != "cos")
    throw std::invalid_argument("unknown profile: " + cfg.profile);
  if (cfg.dx_values.empty()) cfg.dx_values = solver::lin_spaced(0.005, 0.01, 8);
  // snap to divisors of the domain so the periodic lattice has no seam cell
  for (double& v : cfg.dx_values) {
    if (v <= 0.0) throw std::invalid_argument("dx must be positive");
    v = 2.0 / static_cast<double>(std::lround(2.0 / v));
  }
  cfg.dx_values.erase(std::unique(cfg.dx_values.begin(), cfg.dx_values.end()),
                      cfg.dx_values.end());
  if (cfg.dt_values.empty()) cfg.dt_values = solver::log_spaced(0.002, 0.02, 8);

  out.bound = analysis::sampling_cfl_bound(cfg.m, cfg.c);
  const mesh::Stencil st = mesh::build_stencil_1d(cfg.m, cfg.m);
  const snapshot::FeatureMap map{snapshot::FeatureKind::Linear, 2 * cfg.m + 1};
  const analysis::TaylorGeometry geom = analysis::taylor_geometry(cfg.m, cfg.m);

  for (const double dx : cfg.dx_values) {
    const mesh::Grid1D grid = mesh::make_grid_1d(-1.0, 1.0, dx, true);
    const int jdof = cfg.taylor_dof < 0 ? grid.n / 3 : cfg.taylor_dof;
    if (jdof < 0 || jdof >= grid.n) throw std::invalid_argument("predictor dof out of range");
    const double L = grid.length();
    const auto wrapx = [&](double xv) {
      double y = std::fmod(xv - grid.x0, L);
      if (y < 0.0) y += L;
      return grid.x0 + y;
    };

    for (const double dt : cfg.dt_values) {
      const auto advcfg = cfg.profile == "cos_pi"
                              ? manufactured::AdvectionConfig::cos_pi(cfg.c, dt)
                              : manufactured::AdvectionConfig::cosine(cfg.c, dt);
      const int N = step_count(cfg.T, dt);
      const auto snap = manufactured::advection_analytic(grid, advcfg, N);

      std::vector<solver::CoefficientVector> betas(static_cast<std::size_t>(grid.n));
      for (int i = 0; i < grid.n; ++i)
        betas[static_cast<std::size_t>(i)] = solver::min_norm_solve(
            snapshot::assemble_local(snap, i, mesh::support_set(grid, i, st), map));
      const model::DiscreteModel m = model::assemble_per_dof(betas, grid, st);

      AdvectionCell cell;
      cell.dx = dx;
      cell.dt = dt;
      cell.ratio = dt / dx;
      cell.n = grid.n;
      const auto roll = model::rollout(m, snap.states.col(0), N);
      cell.completed = roll.completed;
      cell.diverged = !roll.completed;
      cell.diverged_step = roll.diverged_step;
      cell.error =
          roll.completed ? model::average_error(roll.state, snap.states.col(N)) : kNaN;
      const analysis::StabilityReport rep =
          cfg.compute_rho ? analysis::spectral_radius(m.A) : analysis::gershgorin_check(m.A);
      cell.rho = rep.rho;
      cell.max_row_l1 = rep.max_row_l1;
      cell.stable = rep.max_row_l1 <= 1.0 + cfg.phase_tolerance;
      cell.rho_exceeds_one = rep.rho > 1.0 + kRhoTol;

      Eigen::VectorXd u(N), ux(N), ut(N);
      const double xj = grid.coordinate(jdof);
      for (int k = 0; k < N; ++k) {
        const double xk = wrapx(xj + cfg.c * (snap.t0 + k * dt));
        u[k] = advcfg.u0(xk);
        ux[k] = advcfg.du0(xk);
        ut[k] = cfg.c * ux[k];
      }
      const auto tb = analysis::taylor_first_order_beta(
          geom, analysis::taylor_data_coeffs(u, ux, ut), dx, dt);
      cell.taylor_stable = analysis::sufficient_stability_check(tb);
      out.cells.push_back(cell);
    }
  }

  const ordered_json jc{{"m", cfg.m},
                        {"c", cfg.c},
                        {"profile", cfg.profile},
                        {"T", cfg.T},
                        {"domain", {-1.0, 1.0}},
                        {"dx_values", cfg.dx_values},
                        {"dt_values", cfg.dt_values},
                        {"phase_tolerance", cfg.phase_tolerance},
                        {"taylor_dof", cfg.taylor_dof},
                        {"compute_rho", cfg.compute_rho},
                        {"bound", out.bound}};
  out.table.provenance = provenance("advection_cfl_map", 0, jc);
  out.table.columns = {"dx",       "dt",         "ratio",      "n",
                       "completed", "diverged",  "diverged_step", "error_pct",
                       "rho",       "max_row_l1", "stable",     "rho_exceeds_one",
                       "taylor_stable", "bound"};
  for (const auto& c : out.cells)
    out.table.rows.push_back(
        {format_value(c.dx), format_value(c.dt), format_value(c.ratio), format_value(c.n),
         format_value(c.completed), format_value(c.diverged), format_value(c.diverged_step),
         format_value(c.error), format_value(c.rho), format_value(c.max_row_l1),
         format_value(c.stable), format_value(c.rho_exceeds_one), format_value(c.taylor_stable),
         format_value(out.bound)});
  return out;
}

// ---- Burgers ---------------------------------------------------------------

BurgersRunResult run_burgers(const BurgersRunConfig& cfg_in) {
  BurgersRunResult out;
  out.config = cfg_in;
  auto& cfg = out.config;
  if (cfg.stencil_halfwidth < 1) throw std::invalid_argument("stencil half-width must be >= 1");
  if (cfg.augment_count < 1) throw std::invalid_argument("augmentation count must be >= 1");
  if (cfg.eta_values.empty()) cfg.eta_values = solver::log_spaced(1e-5, 1.0, 30);
  if (cfg.g_values.empty()) cfg.g_values = {10.0, 20.0, 50.0, 80.0, 100.0};
  if (cfg.alpha_sweep.empty()) cfg.alpha_sweep = {0.1, 0.2, 0.5, 1.0, 2.0, 5.0};
  if (cfg.mu_sweep.empty()) cfg.mu_sweep = {1.0, 2.0, 5.0, 7.0, 10.0, 15.0, 20.0};

  const auto& phys = cfg.physics;
  const mesh::Grid2D grid = mesh::make_grid_2d(0.0, 1.0, 0.0, 1.0, phys.dx, phys.dx, true);
  const mesh::Stencil st = mesh::build_block_stencil_2d(cfg.stencil_halfwidth);
  const snapshot::FeatureMap map{snapshot::FeatureKind::LinearHadamardQuadratic,
                                 static_cast<int>(st.size())};

  const auto training = manufactured::burgers_solve(grid, phys);
  const auto plan = snapshot::sample_augmentation_indices(grid.n(), cfg.augment_count, cfg.seed);
  const auto gram = snapshot::accumulate_gram(training, plan, grid, st, map);

  const solver::SpectralRadiusFn screen = [&](const solver::CoefficientVector& beta) {
    const auto cand = model::assemble_shared(beta, grid, st);
    return analysis::spectral_radius(cand.A, analysis::SpectralMode::Power).rho;
  };
  out.lcurve = solver::l_curve_select(gram, cfg.eta_values, cfg.g_values, screen);
  const auto& sel = out.lcurve.candidates[static_cast<std::size_t>(out.lcurve.selected)];

  out.selected = model::assemble_shared(out.lcurve.selected_beta, grid, st);
  out.selected.meta.eta = sel.eta;
  out.selected.meta.g = sel.g;
  out.selected.meta.seed = cfg.seed;
  out.selected.meta.dx = phys.dx;
  out.selected.meta.dt = phys.dt;

  out.stability = analysis::spectral_radius(out.selected.A, analysis::SpectralMode::Dense);
  const bool in_disc = out.stability.rho <= 1.0 + kRhoTol;

  const int K = step_count(phys.T, phys.dt);
  const auto troll = model::rollout(out.selected, training.states.col(0), K);
  out.training_error =
      troll.completed ? model::average_error(troll.state, training.states.col(K)) : kNaN;

  for (const double alpha : cfg.alpha_sweep)
    for (const double mu : cfg.mu_sweep) {
      BurgersSweepCell cell;
      cell.alpha = alpha;
      cell.mu = mu;
      const auto roll =
          model::rollout(out.selected, manufactured::burgers_initial(grid, alpha, mu), K);
      cell.completed = roll.completed;
      cell.diverged = !roll.completed;
      cell.diverged_step = roll.diverged_step;
      if (roll.completed) {
        manufactured::BurgersConfig pc = phys;
        pc.alpha = alpha;
        pc.mu = mu;
        const auto ref = manufactured::burgers_solve(grid, pc);
        cell.error = model::average_error(roll.state, ref.states.col(K));
      } else {
        cell.error = kNaN;
      }
      out.sweep.push_back(cell);
    }

  bool low_ok = true, a5_all = true;
  int a2_div = 0, a2_n = 0;
  for (const auto& cell : out.sweep) {
    if (cell.alpha <= 0.5 + 1e-12 && !cell.completed) low_ok = false;
    if (std::abs(cell.alpha - 5.0) < 1e-9 && !cell.diverged) a5_all = false;
    if (std::abs(cell.alpha - 2.0) < 1e-9) {
      ++a2_n;
      a2_div += cell.diverged ? 1 : 0;
    }
  }
  const bool a2_majority = a2_n > 0 && 2 * a2_div > a2_n;

  const ordered_json jc{{"c", phys.c},
                        {"nu", phys.nu},
                        {"alpha", phys.alpha},
                        {"mu", phys.mu},
                        {"dx", phys.dx},
                        {"dt", phys.dt},
                        {"T", phys.T},
                        {"stencil_halfwidth", cfg.stencil_halfwidth},
                        {"augment_count", cfg.augment_count},
                        {"seed", cfg.seed},
                        {"eta_values", cfg.eta_values},
                        {"g_values", cfg.g_values},
                        {"alpha_sweep", cfg.alpha_sweep},
                        {"mu_sweep", cfg.mu_sweep}};

  out.table.provenance = provenance("burgers", cfg.seed, jc);
  out.table.columns = {"alpha", "mu", "completed", "diverged", "diverged_step", "error_pct"};
  for (const auto& c : out.sweep)
    out.table.rows.push_back({format_value(c.alpha), format_value(c.mu),
                              format_value(c.completed), format_value(c.diverged),
                              format_value(c.diverged_step), format_value(c.error)});

  ordered_json js;
  js["experiment"] = "burgers";
  js["toolkit_version"] = kToolkitVersion;
  js["config"] = jc;
  js["config_hash"] = hash_hex(fnv1a_hash(jc.dump()));
  js["selected"] = {{"eta", sel.eta},
                    {"g", sel.g},
                    {"residual", sel.resid},
                    {"coefficient_norm", sel.norm},
                    {"spectral_radius_screen", sel.spectral_radius},
                    {"screen_found_stable", out.lcurve.screen_found_stable},
                    {"corner_at_endpoint", out.lcurve.corner_at_endpoint}};
  js["stability"] = {{"rho", out.stability.rho},
                     {"max_row_l1", out.stability.max_row_l1},
                     {"all_eigenvalues_in_unit_disc", in_disc},
                     {"sufficient_stable", out.stability.sufficient_stable}};
  js["training_error_pct"] = out.training_error;
  js["verdicts"] = {{"alpha_le_half_all_completed", low_ok},
                    {"alpha_2_majority_diverged", a2_majority},
                    {"alpha_5_all_diverged", a5_all}};
  ordered_json jl = ordered_json::array();
  for (const auto& cand : out.lcurve.candidates) {
    ordered_json e{{"eta", cand.eta},
                   {"g", cand.g},
                   {"residual", cand.resid},
                   {"coefficient_norm", cand.norm},
                   {"corner", cand.corner}};
    if (cand.spectral_radius >= 0.0)
      e["spectral_radius"] = cand.spectral_radius;
    else
      e["spectral_radius"] = nullptr;
    jl.push_back(std::move(e));
  }
  js["l_curve"] = std::move(jl);
  out.summary_json = js.dump(1, '\t');

  std::string spec = "re,im\n";
  for (const auto& z : out.stability.eigenvalues)
    spec += format_value(z.real()) + "," + format_value(z.imag()) + "\n";
  out.spectrum_csv = std::move(spec);
  return out;
}

// ---- model diagnostics ------------------------------------------------------

StabilityReportResult run_stability_report(const model::DiscreteModel& m) {
  StabilityReportResult out;
  out.report = analysis::spectral_radius(m.A);
  out.report.quadratic_ignored = m.H.has_value();

  out.consistency.resize(static_cast<std::size_t>(m.A.n));
  double max_dev = 0.0;
  for (int i = 0; i < m.A.n; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.A.k; ++j) s += m.A.vals[static_cast<std::size_t>(i * m.A.k + j)];
    out.consistency[static_cast<std::size_t>(i)] = s;
    max_dev = std::max(max_dev, std::abs(s - 1.0));
  }

  const ordered_json jc{{"n", m.A.n},       {"k", m.A.k},   {"feature", m.meta.feature},
                        {"dims", m.meta.dims}, {"dx", m.meta.dx}, {"dt", m.meta.dt}};
  out.table.provenance = provenance("stability_report", m.meta.seed, jc);
  out.table.columns = {"row", "l1", "consistency_sum"};
  for (int i = 0; i < m.A.n; ++i)
    out.table.rows.push_back({format_value(i),
                              format_value(out.report.row_l1[static_cast<std::size_t>(i)]),
                              format_value(out.consistency[static_cast<std::size_t>(i)])});

  ordered_json js;
  js["experiment"] = "stability_report";
  js["toolkit_version"] = kToolkitVersion;
  js["config"] = jc;
  js["config_hash"] = hash_hex(fnv1a_hash(jc.dump()));
  js["max_row_l1"] = out.report.max_row_l1;
  js["rho"] = out.report.rho;
  js["sufficient_stable"] = out.report.sufficient_stable;
  js["stable"] = out.report.stable;
  js["power_converged"] = out.report.power_converged;
  js["quadratic_ignored"] = out.report.quadratic_ignored;
  js["max_consistency_deviation"] = max_dev;
  out.summary_json = js.dump(1, '\t');

  if (!out.report.eigenvalues.empty()) {
    std::string spec = "re,im\n";
    for (const auto& z : out.report.eigenvalues)
      spec += format_value(z.real()) + "," + format_value(z.imag()) + "\n";
    out.spectrum_csv = std::move(spec);
  }
  return out;
}

SimulateResult run_simulate(const model::DiscreteModel& m, const Eigen::VectorXd& u0, int steps,
                            double guard) {
  SimulateResult out;
  out.rollout = model::rollout(m, u0, steps, guard);
  const ordered_json jc{{"n", m.A.n}, {"steps", steps}, {"guard", guard}};
  out.table.provenance = provenance("simulate", m.meta.seed, jc);
  out.table.provenance.emplace_back("completed", format_value(out.rollout.completed));
  out.table.provenance.emplace_back("diverged_step", format_value(out.rollout.diverged_step));
  out.table.columns = {"dof", "value"};
  for (Eigen::Index i = 0; i < out.rollout.state.size(); ++i)
    out.table.rows.push_back(
        {format_value(static_cast<int>(i)), format_value(out.rollout.state[i])});
  return out;
}

}  // namespace sfom::experiments
