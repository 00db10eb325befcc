#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sfom/experiments.hpp"
#include "sfom/model.hpp"

namespace fs = std::filesystem;
namespace ex = sfom::experiments;
namespace model = sfom::model;

namespace {

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot open " + p.string());
  f << text;
}

Eigen::VectorXd load_vector(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::vector<double> vals;
  double v;
  while (f >> v) vals.push_back(v);
  if (vals.empty()) throw std::runtime_error("no values in " + path);
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(f);
}

template <typename T>
void take(const nlohmann::json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> known) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw std::runtime_error("unknown config key: " + key);
  }
}

void apply(const nlohmann::json& j, ex::DiffusionSweepConfig& cfg) {
  check_keys(j, {"c", "T", "dx_values", "dt_values", "augment_fraction", "seed", "compute_rho"});
  take(j, "c", cfg.c);
  take(j, "T", cfg.T);
  take(j, "dx_values", cfg.dx_values);
  take(j, "dt_values", cfg.dt_values);
  take(j, "augment_fraction", cfg.augment_fraction);
  take(j, "seed", cfg.seed);
  take(j, "compute_rho", cfg.compute_rho);
}

void apply(const nlohmann::json& j, ex::AdvectionCflConfig& cfg) {
  check_keys(j, {"m", "c", "profile", "T", "dx_values", "dt_values", "phase_tolerance",
                 "taylor_dof", "compute_rho"});
  take(j, "m", cfg.m);
  take(j, "c", cfg.c);
  take(j, "profile", cfg.profile);
  take(j, "T", cfg.T);
  take(j, "dx_values", cfg.dx_values);
  take(j, "dt_values", cfg.dt_values);
  take(j, "phase_tolerance", cfg.phase_tolerance);
  take(j, "taylor_dof", cfg.taylor_dof);
  take(j, "compute_rho", cfg.compute_rho);
}

void apply(const nlohmann::json& j, ex::BurgersRunConfig& cfg) {
  check_keys(j, {"c", "nu", "alpha", "mu", "dx", "dt", "T", "stencil_halfwidth", "augment_count",
                 "seed", "eta_values", "g_values", "alpha_sweep", "mu_sweep"});
  take(j, "c", cfg.physics.c);
  take(j, "nu", cfg.physics.nu);
  take(j, "alpha", cfg.physics.alpha);
  take(j, "mu", cfg.physics.mu);
  take(j, "dx", cfg.physics.dx);
  take(j, "dt", cfg.physics.dt);
  take(j, "T", cfg.physics.T);
  take(j, "stencil_halfwidth", cfg.stencil_halfwidth);
  take(j, "augment_count", cfg.augment_count);
  take(j, "seed", cfg.seed);
  take(j, "eta_values", cfg.eta_values);
  take(j, "g_values", cfg.g_values);
  take(j, "alpha_sweep", cfg.alpha_sweep);
  take(j, "mu_sweep", cfg.mu_sweep);
}

// the config file is applied before flag parsing so explicit flags win
std::string preparse_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

std::string preparse_subcommand(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (!a.empty() && a[0] != '-') return a;
  }
  return {};
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse discrete-time full-order model toolkit"};
  app.require_subcommand(1);

  ex::DiffusionSweepConfig dcfg;
  ex::AdvectionCflConfig acfg;
  ex::BurgersRunConfig bcfg;

  const std::string config_path = preparse_config(argc, argv);
  const std::string subname = preparse_subcommand(argc, argv);
  try {
    if (!config_path.empty()) {
      const nlohmann::json j = load_config_file(config_path);
      if (subname == "diffusion-sweep")
        apply(j, dcfg);
      else if (subname == "advection-cfl-map")
        apply(j, acfg);
      else if (subname == "burgers")
        apply(j, bcfg);
      else if (!subname.empty())
        throw std::runtime_error("--config is not supported for " + subname);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::string out_dir = ".";
  std::string config_opt;  // consumed in the preparse above

  auto* diff = app.add_subcommand("diffusion-sweep",
                                  "infer 3-point diffusion models over a (dx, dt) lattice");
  diff->add_option("--config", config_opt, "JSON config file");
  diff->add_option("--c", dcfg.c, "diffusivity");
  diff->add_option("--T", dcfg.T, "final time");
  diff->add_option("--dx", dcfg.dx_values, "dx lattice")->delimiter(',');
  diff->add_option("--dt", dcfg.dt_values, "dt lattice")->delimiter(',');
  diff->add_option("--augment-fraction", dcfg.augment_fraction, "sampled DOF fraction");
  diff->add_option("--seed", dcfg.seed, "augmentation sampling seed")->default_val(dcfg.seed);
  diff->add_flag("!--no-rho", dcfg.compute_rho, "skip the spectral radius column");
  diff->add_option("--out-dir", out_dir, "output directory")->default_val(out_dir);
  diff->callback([&] {
    const auto res = ex::run_diffusion_sweep(dcfg);
    const fs::path dir = prepare_out_dir(out_dir);
    res.table.save_csv((dir / "results.csv").string());

    int unstable = 0, diverged = 0;
    for (const auto& c : res.cells) {
      unstable += c.unstable ? 1 : 0;
      diverged += c.diverged ? 1 : 0;
    }
    nlohmann::ordered_json js;
    js["experiment"] = "diffusion_sweep";
    js["cells"] = res.cells.size();
    js["unstable_cells"] = unstable;
    js["diverged_cells"] = diverged;
    write_file(dir / "summary.json", js.dump(1, '\t'));
    std::cout << "wrote " << (dir / "results.csv").string() << " (" << res.cells.size()
              << " cells)\n";
  });

  auto* adv = app.add_subcommand("advection-cfl-map",
                                 "stability phase map of per-DOF advection models");
  adv->add_option("--config", config_opt, "JSON config file");
  adv->add_option("--m", acfg.m, "symmetric stencil half-width (1 or 2)");
  adv->add_option("--c", acfg.c, "transport speed");
  adv->add_option("--profile", acfg.profile, "initial profile: cos_pi | cos");
  adv->add_option("--T", acfg.T, "final time");
  adv->add_option("--dx", acfg.dx_values, "dx lattice (snapped commensurate)")->delimiter(',');
  adv->add_option("--dt", acfg.dt_values, "dt lattice")->delimiter(',');
  adv->add_option("--phase-tolerance", acfg.phase_tolerance, "row-l1 slack for the verdict");
  adv->add_option("--taylor-dof", acfg.taylor_dof, "predictor DOF (-1: n/3)");
  adv->add_flag("!--no-rho", acfg.compute_rho, "skip the spectral radius column");
  adv->add_option("--out-dir", out_dir, "output directory")->default_val(out_dir);
  adv->callback([&] {
    const auto res = ex::run_advection_cfl_map(acfg);
    const fs::path dir = prepare_out_dir(out_dir);
    res.table.save_csv((dir / "results.csv").string());

    double max_stable_ratio = 0.0, min_unstable_ratio = 0.0;
    bool any_unstable = false;
    for (const auto& c : res.cells) {
      if (c.stable) {
        max_stable_ratio = std::max(max_stable_ratio, c.ratio);
      } else if (!any_unstable || c.ratio < min_unstable_ratio) {
        min_unstable_ratio = c.ratio;
        any_unstable = true;
      }
    }
    nlohmann::ordered_json js;
    js["experiment"] = "advection_cfl_map";
    js["bound"] = res.bound;
    js["max_stable_ratio"] = max_stable_ratio;
    if (any_unstable)
      js["min_unstable_ratio"] = min_unstable_ratio;
    else
      js["min_unstable_ratio"] = nullptr;
    write_file(dir / "summary.json", js.dump(1, '\t'));
    std::cout << "wrote " << (dir / "results.csv").string() << " (" << res.cells.size()
              << " cells, bound " << res.bound << ")\n";
  });

  auto* bur = app.add_subcommand(
      "burgers", "train an augmented Hadamard-quadratic model and sweep initial conditions");
  bur->add_option("--config", config_opt, "JSON config file");
  bur->add_option("--c", bcfg.physics.c, "transport coefficient");
  bur->add_option("--nu", bcfg.physics.nu, "viscosity");
  bur->add_option("--alpha", bcfg.physics.alpha, "training IC amplitude");
  bur->add_option("--mu", bcfg.physics.mu, "training IC width");
  bur->add_option("--dx", bcfg.physics.dx, "grid spacing");
  bur->add_option("--dt", bcfg.physics.dt, "snapshot step");
  bur->add_option("--T", bcfg.physics.T, "final time");
  bur->add_option("--halfwidth", bcfg.stencil_halfwidth, "block stencil half-width");
  bur->add_option("--augment-count", bcfg.augment_count, "sampled DOF count");
  bur->add_option("--eta", bcfg.eta_values, "regularization lattice")->delimiter(',');
  bur->add_option("--g", bcfg.g_values, "quadratic-block weights")->delimiter(',');
  bur->add_option("--alpha-sweep", bcfg.alpha_sweep, "IC amplitudes")->delimiter(',');
  bur->add_option("--mu-sweep", bcfg.mu_sweep, "IC widths")->delimiter(',');
  bur->add_option("--seed", bcfg.seed, "augmentation sampling seed")->default_val(bcfg.seed);
  bur->add_option("--out-dir", out_dir, "output directory")->default_val(out_dir);
  bur->callback([&] {
    const auto res = ex::run_burgers(bcfg);
    const fs::path dir = prepare_out_dir(out_dir);
    res.table.save_csv((dir / "results.csv").string());
    write_file(dir / "summary.json", res.summary_json);
    model::save_json(res.selected, (dir / "model.json").string());
    write_file(dir / "spectrum.csv", res.spectrum_csv);
    std::cout << "selected eta=" << res.selected.meta.eta << " g=" << res.selected.meta.g
              << " rho=" << res.stability.rho << " training error " << res.training_error
              << "%\n";
  });

  std::string model_path, ic_path;
  int steps = 1;
  double guard = 1e6;

  auto* rep = app.add_subcommand("stability-report", "diagnostics for a saved model");
  rep->add_option("--model", model_path, "model file")->required();
  rep->add_option("--out-dir", out_dir, "output directory")->default_val(out_dir);
  rep->callback([&] {
    const auto m = model::load_json(model_path);
    const auto res = ex::run_stability_report(m);
    const fs::path dir = prepare_out_dir(out_dir);
    res.table.save_csv((dir / "results.csv").string());
    write_file(dir / "summary.json", res.summary_json);
    if (!res.spectrum_csv.empty()) write_file(dir / "spectrum.csv", res.spectrum_csv);
    std::cout << "max row l1 " << res.report.max_row_l1 << ", rho " << res.report.rho << "\n";
  });

  auto* sim = app.add_subcommand("simulate", "roll a saved model forward from an IC file");
  sim->add_option("--model", model_path, "model file")->required();
  sim->add_option("--ic", ic_path, "initial condition, one value per line")->required();
  sim->add_option("--steps", steps, "number of steps")->required();
  sim->add_option("--guard", guard, "divergence guard");
  sim->add_option("--out-dir", out_dir, "output directory")->default_val(out_dir);
  sim->callback([&] {
    const auto m = model::load_json(model_path);
    const auto res = ex::run_simulate(m, load_vector(ic_path), steps, guard);
    const fs::path dir = prepare_out_dir(out_dir);
    res.table.save_csv((dir / "results.csv").string());
    nlohmann::ordered_json js;
    js["experiment"] = "simulate";
    js["steps"] = res.rollout.steps;
    js["completed"] = res.rollout.completed;
    js["diverged_step"] = res.rollout.diverged_step;
    write_file(dir / "summary.json", js.dump(1, '\t'));
    std::cout << (res.rollout.completed ? "completed" : "diverged") << " after "
              << res.rollout.steps << " steps\n";
  });

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
