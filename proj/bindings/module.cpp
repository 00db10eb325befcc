#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sfom/analysis.hpp"
#include "sfom/manufactured.hpp"
#include "sfom/mesh.hpp"
#include "sfom/model.hpp"
#include "sfom/snapshot.hpp"
#include "sfom/solver.hpp"

namespace py = pybind11;
using namespace sfom;

PYBIND11_MODULE(_core, m) {
  m.doc() = "sparse discrete-time full-order models from snapshot data";

  // ---- mesh ----
  py::class_<mesh::Grid1D>(m, "Grid1D")
      .def_readonly("n", &mesh::Grid1D::n)
      .def_readonly("dx", &mesh::Grid1D::dx)
      .def_readonly("x0", &mesh::Grid1D::x0)
      .def_readonly("periodic", &mesh::Grid1D::periodic)
      .def("coordinate", &mesh::Grid1D::coordinate)
      .def("length", &mesh::Grid1D::length);
  py::class_<mesh::Grid2D>(m, "Grid2D")
      .def_readonly("nx", &mesh::Grid2D::nx)
      .def_readonly("ny", &mesh::Grid2D::ny)
      .def_readonly("dx", &mesh::Grid2D::dx)
      .def_readonly("dy", &mesh::Grid2D::dy)
      .def("n", &mesh::Grid2D::n)
      .def("index", &mesh::Grid2D::index)
      .def("x", &mesh::Grid2D::x)
      .def("y", &mesh::Grid2D::y);
  m.def("make_grid_1d", &mesh::make_grid_1d, py::arg("a"), py::arg("b"), py::arg("dx"),
        py::arg("periodic") = true);
  m.def("make_grid_2d", &mesh::make_grid_2d, py::arg("ax"), py::arg("bx"), py::arg("ay"),
        py::arg("by"), py::arg("dx"), py::arg("dy"), py::arg("periodic") = true);

  py::class_<mesh::Stencil>(m, "Stencil")
      .def_readonly("dims", &mesh::Stencil::dims)
      .def_readonly("m", &mesh::Stencil::m)
      .def_readonly("l", &mesh::Stencil::l)
      .def_readonly("di", &mesh::Stencil::di)
      .def_readonly("dj", &mesh::Stencil::dj)
      .def("size", &mesh::Stencil::size);
  m.def("build_stencil_1d", &mesh::build_stencil_1d, py::arg("m"), py::arg("l"));
  m.def("build_block_stencil_2d", &mesh::build_block_stencil_2d, py::arg("halfwidth"));

  py::class_<mesh::SupportSet>(m, "SupportSet")
      .def_readonly("center", &mesh::SupportSet::center)
      .def_readonly("members", &mesh::SupportSet::members)
      .def("cardinality", &mesh::SupportSet::cardinality);
  m.def("support_set",
        py::overload_cast<const mesh::Grid1D&, int, const mesh::Stencil&>(&mesh::support_set),
        py::arg("grid"), py::arg("i"), py::arg("stencil"));
  m.def("support_set",
        py::overload_cast<const mesh::Grid2D&, int, const mesh::Stencil&>(&mesh::support_set),
        py::arg("grid"), py::arg("i"), py::arg("stencil"));

  // ---- manufactured data ----
  py::class_<manufactured::SnapshotSet>(m, "SnapshotSet")
      .def(py::init<>())
      .def_readwrite("states", &manufactured::SnapshotSet::states)
      .def_readwrite("dt", &manufactured::SnapshotSet::dt)
      .def_readwrite("t0", &manufactured::SnapshotSet::t0)
      .def("n", &manufactured::SnapshotSet::n)
      .def("transitions", &manufactured::SnapshotSet::transitions);
  py::class_<manufactured::DiffusionConfig>(m, "DiffusionConfig")
      .def(py::init<double, double, double>(), py::arg("c") = 1.0, py::arg("dt") = 0.0,
           py::arg("t0") = 0.0)
      .def_readwrite("c", &manufactured::DiffusionConfig::c)
      .def_readwrite("dt", &manufactured::DiffusionConfig::dt)
      .def_readwrite("t0", &manufactured::DiffusionConfig::t0);
  py::class_<manufactured::AdvectionConfig>(m, "AdvectionConfig")
      .def_readwrite("c", &manufactured::AdvectionConfig::c)
      .def_readonly("profile", &manufactured::AdvectionConfig::profile)
      .def_readwrite("dt", &manufactured::AdvectionConfig::dt)
      .def_static("cos_pi", &manufactured::AdvectionConfig::cos_pi, py::arg("c"), py::arg("dt"))
      .def_static("cosine", &manufactured::AdvectionConfig::cosine, py::arg("c"), py::arg("dt"));
  py::class_<manufactured::BurgersConfig>(m, "BurgersConfig")
      .def(py::init<>())
      .def_readwrite("c", &manufactured::BurgersConfig::c)
      .def_readwrite("nu", &manufactured::BurgersConfig::nu)
      .def_readwrite("alpha", &manufactured::BurgersConfig::alpha)
      .def_readwrite("mu", &manufactured::BurgersConfig::mu)
      .def_readwrite("dx", &manufactured::BurgersConfig::dx)
      .def_readwrite("dt", &manufactured::BurgersConfig::dt)
      .def_readwrite("T", &manufactured::BurgersConfig::T);
  m.def("diffusion_analytic", &manufactured::diffusion_analytic, py::arg("grid"), py::arg("cfg"),
        py::arg("N"));
  m.def("advection_analytic", &manufactured::advection_analytic, py::arg("grid"), py::arg("cfg"),
        py::arg("N"));
  m.def("burgers_initial", &manufactured::burgers_initial, py::arg("grid"), py::arg("alpha"),
        py::arg("mu"));
  m.def("burgers_solve", &manufactured::burgers_solve, py::arg("grid"), py::arg("cfg"));

  // ---- features and local problems ----
  py::enum_<snapshot::FeatureKind>(m, "FeatureKind")
      .value("Linear", snapshot::FeatureKind::Linear)
      .value("LinearHadamardQuadratic", snapshot::FeatureKind::LinearHadamardQuadratic)
      .value("LinearQuadraticConstant", snapshot::FeatureKind::LinearQuadraticConstant);
  py::class_<snapshot::FeatureMap>(m, "FeatureMap")
      .def(py::init<snapshot::FeatureKind, int>(), py::arg("kind"), py::arg("r"))
      .def_readwrite("kind", &snapshot::FeatureMap::kind)
      .def_readwrite("r", &snapshot::FeatureMap::r)
      .def("dim", &snapshot::FeatureMap::dim)
      .def("linear_size", &snapshot::FeatureMap::linear_size)
      .def("quadratic_size", &snapshot::FeatureMap::quadratic_size)
      .def("has_constant", &snapshot::FeatureMap::has_constant);
  m.def("feature_vector", &snapshot::feature_vector, py::arg("uQ"), py::arg("center_value"),
        py::arg("map"));

  py::class_<snapshot::LocalProblem>(m, "LocalProblem")
      .def_readonly("D", &snapshot::LocalProblem::D)
      .def_readonly("d", &snapshot::LocalProblem::d)
      .def_readonly("centers", &snapshot::LocalProblem::centers)
      .def_readonly("map", &snapshot::LocalProblem::map)
      .def_readonly("dx", &snapshot::LocalProblem::dx)
      .def_readonly("dt", &snapshot::LocalProblem::dt);
  m.def("assemble_local", &snapshot::assemble_local, py::arg("snap"), py::arg("i"),
        py::arg("support"), py::arg("map"));

  py::class_<snapshot::AugmentationPlan>(m, "AugmentationPlan")
      .def_readonly("indices", &snapshot::AugmentationPlan::indices)
      .def_readonly("seed", &snapshot::AugmentationPlan::seed);
  m.def("sample_augmentation_indices", &snapshot::sample_augmentation_indices, py::arg("n"),
        py::arg("count"), py::arg("seed"));
  m.def("sample_augmentation_fraction", &snapshot::sample_augmentation_fraction, py::arg("n"),
        py::arg("fraction"), py::arg("seed"));
  m.def("augment",
        py::overload_cast<const manufactured::SnapshotSet&, const snapshot::AugmentationPlan&,
                          const mesh::Grid1D&, const mesh::Stencil&, const snapshot::FeatureMap&>(
            &snapshot::augment),
        py::arg("snap"), py::arg("plan"), py::arg("grid"), py::arg("stencil"), py::arg("map"));
  m.def("augment",
        py::overload_cast<const manufactured::SnapshotSet&, const snapshot::AugmentationPlan&,
                          const mesh::Grid2D&, const mesh::Stencil&, const snapshot::FeatureMap&>(
            &snapshot::augment),
        py::arg("snap"), py::arg("plan"), py::arg("grid"), py::arg("stencil"), py::arg("map"));

  py::class_<snapshot::GramProblem>(m, "GramProblem")
      .def_readonly("G", &snapshot::GramProblem::G)
      .def_readonly("rhs", &snapshot::GramProblem::rhs)
      .def_readonly("dtd", &snapshot::GramProblem::dtd)
      .def_readonly("rows", &snapshot::GramProblem::rows)
      .def("residual_norm", &snapshot::GramProblem::residual_norm);
  m.def("to_gram", &snapshot::to_gram, py::arg("problem"));
  m.def("accumulate_gram", &snapshot::accumulate_gram, py::arg("snap"), py::arg("plan"),
        py::arg("grid"), py::arg("stencil"), py::arg("map"));

  // ---- solvers ----
  py::class_<solver::CoefficientVector>(m, "CoefficientVector")
      .def(py::init<>())
      .def_readwrite("values", &solver::CoefficientVector::values)
      .def_readwrite("map", &solver::CoefficientVector::map)
      .def_readonly("rank", &solver::CoefficientVector::rank)
      .def("linear_block", &solver::CoefficientVector::linear_block)
      .def("quadratic_block", &solver::CoefficientVector::quadratic_block)
      .def("constant_term", &solver::CoefficientVector::constant_term);
  m.def("min_norm_solve", &solver::min_norm_solve, py::arg("problem"),
        py::arg("rank_cutoff") = 1e-10);

  py::class_<solver::RidgeConfig>(m, "RidgeConfig")
      .def(py::init<double, double>(), py::arg("eta"), py::arg("quad_weight") = 1.0)
      .def_readwrite("eta", &solver::RidgeConfig::eta)
      .def_readwrite("quad_weight", &solver::RidgeConfig::quad_weight);
  m.def("ridge_solve",
        py::overload_cast<const snapshot::LocalProblem&, const solver::RidgeConfig&>(
            &solver::ridge_solve),
        py::arg("problem"), py::arg("cfg"));
  m.def("ridge_solve",
        py::overload_cast<const snapshot::GramProblem&, const solver::RidgeConfig&>(
            &solver::ridge_solve),
        py::arg("problem"), py::arg("cfg"));

  py::class_<solver::LCurveCandidate>(m, "LCurveCandidate")
      .def_readonly("eta", &solver::LCurveCandidate::eta)
      .def_readonly("g", &solver::LCurveCandidate::g)
      .def_readonly("resid", &solver::LCurveCandidate::resid)
      .def_readonly("norm", &solver::LCurveCandidate::norm)
      .def_readonly("beta", &solver::LCurveCandidate::beta)
      .def_readonly("spectral_radius", &solver::LCurveCandidate::spectral_radius)
      .def_readonly("corner", &solver::LCurveCandidate::corner);
  py::class_<solver::LCurveResult>(m, "LCurveResult")
      .def_readonly("candidates", &solver::LCurveResult::candidates)
      .def_readonly("corner_index", &solver::LCurveResult::corner_index)
      .def_readonly("corner_at_endpoint", &solver::LCurveResult::corner_at_endpoint)
      .def_readonly("selected", &solver::LCurveResult::selected)
      .def_readonly("selected_beta", &solver::LCurveResult::selected_beta)
      .def_readonly("screen_found_stable", &solver::LCurveResult::screen_found_stable);
  m.def("l_curve_select",
        py::overload_cast<const snapshot::GramProblem&, const std::vector<double>&,
                          const std::vector<double>&, const solver::SpectralRadiusFn&>(
            &solver::l_curve_select),
        py::arg("problem"), py::arg("eta_grid"), py::arg("g_grid"),
        py::arg("screen") = solver::SpectralRadiusFn{});
  m.def("l_curve_select",
        py::overload_cast<const snapshot::LocalProblem&, const std::vector<double>&,
                          const std::vector<double>&, const solver::SpectralRadiusFn&>(
            &solver::l_curve_select),
        py::arg("problem"), py::arg("eta_grid"), py::arg("g_grid"),
        py::arg("screen") = solver::SpectralRadiusFn{});
  m.def("log_spaced", &solver::log_spaced, py::arg("lo"), py::arg("hi"), py::arg("count"));
  m.def("lin_spaced", &solver::lin_spaced, py::arg("lo"), py::arg("hi"), py::arg("count"));

  // ---- models ----
  py::class_<model::SparseLinearOperator>(m, "SparseLinearOperator")
      .def_readonly("n", &model::SparseLinearOperator::n)
      .def_readonly("k", &model::SparseLinearOperator::k)
      .def_readonly("cols", &model::SparseLinearOperator::cols)
      .def_readonly("vals", &model::SparseLinearOperator::vals)
      .def("apply", &model::SparseLinearOperator::apply)
      .def("dense", &model::SparseLinearOperator::dense)
      .def("row_l1", &model::SparseLinearOperator::row_l1);
  py::class_<model::ModelMetadata>(m, "ModelMetadata")
      .def_readwrite("dims", &model::ModelMetadata::dims)
      .def_readwrite("stencil_m", &model::ModelMetadata::stencil_m)
      .def_readwrite("stencil_l", &model::ModelMetadata::stencil_l)
      .def_readwrite("stencil_halfwidth", &model::ModelMetadata::stencil_halfwidth)
      .def_readwrite("feature", &model::ModelMetadata::feature)
      .def_readwrite("eta", &model::ModelMetadata::eta)
      .def_readwrite("g", &model::ModelMetadata::g)
      .def_readwrite("seed", &model::ModelMetadata::seed)
      .def_readwrite("dx", &model::ModelMetadata::dx)
      .def_readwrite("dt", &model::ModelMetadata::dt);
  py::class_<model::DiscreteModel>(m, "DiscreteModel")
      .def_readonly("A", &model::DiscreteModel::A)
      .def_readwrite("meta", &model::DiscreteModel::meta)
      .def_property_readonly("has_quadratic",
                             [](const model::DiscreteModel& dm) { return dm.H.has_value(); });
  m.def("assemble_shared",
        py::overload_cast<const solver::CoefficientVector&, const mesh::Grid1D&,
                          const mesh::Stencil&>(&model::assemble_shared),
        py::arg("beta"), py::arg("grid"), py::arg("stencil"));
  m.def("assemble_shared",
        py::overload_cast<const solver::CoefficientVector&, const mesh::Grid2D&,
                          const mesh::Stencil&>(&model::assemble_shared),
        py::arg("beta"), py::arg("grid"), py::arg("stencil"));
  m.def("assemble_per_dof",
        py::overload_cast<const std::vector<solver::CoefficientVector>&, const mesh::Grid1D&,
                          const mesh::Stencil&>(&model::assemble_per_dof),
        py::arg("betas"), py::arg("grid"), py::arg("stencil"));
  m.def("assemble_per_dof",
        py::overload_cast<const std::vector<solver::CoefficientVector>&, const mesh::Grid2D&,
                          const mesh::Stencil&>(&model::assemble_per_dof),
        py::arg("betas"), py::arg("grid"), py::arg("stencil"));
  m.def("step", &model::step, py::arg("model"), py::arg("u"));
  py::class_<model::RolloutResult>(m, "RolloutResult")
      .def_readonly("state", &model::RolloutResult::state)
      .def_readonly("steps", &model::RolloutResult::steps)
      .def_readonly("completed", &model::RolloutResult::completed)
      .def_readonly("diverged_step", &model::RolloutResult::diverged_step);
  m.def("rollout", &model::rollout, py::arg("model"), py::arg("u0"), py::arg("K"),
        py::arg("guard") = 1e6);
  m.def("average_error", &model::average_error, py::arg("pred"), py::arg("ref"),
        py::arg("use_max_abs") = false);
  m.def("save_model", &model::save_json, py::arg("model"), py::arg("path"));
  m.def("load_model", &model::load_json, py::arg("path"));

  // ---- stability analysis ----
  py::class_<analysis::StabilityReport>(m, "StabilityReport")
      .def_readonly("row_l1", &analysis::StabilityReport::row_l1)
      .def_readonly("max_row_l1", &analysis::StabilityReport::max_row_l1)
      .def_readonly("rho", &analysis::StabilityReport::rho)
      .def_readonly("eigenvalues", &analysis::StabilityReport::eigenvalues)
      .def_readonly("sufficient_stable", &analysis::StabilityReport::sufficient_stable)
      .def_readonly("stable", &analysis::StabilityReport::stable)
      .def_readonly("power_converged", &analysis::StabilityReport::power_converged)
      .def("to_json", &analysis::StabilityReport::to_json);
  py::enum_<analysis::SpectralMode>(m, "SpectralMode")
      .value("Auto", analysis::SpectralMode::Auto)
      .value("Dense", analysis::SpectralMode::Dense)
      .value("Power", analysis::SpectralMode::Power);
  m.def("spectral_radius", &analysis::spectral_radius, py::arg("A"),
        py::arg("mode") = analysis::SpectralMode::Auto);
  m.def("gershgorin_check",
        py::overload_cast<const model::SparseLinearOperator&>(&analysis::gershgorin_check),
        py::arg("A"));
  m.def("sampling_cfl_bound", &analysis::sampling_cfl_bound, py::arg("m"), py::arg("c"));

  py::class_<analysis::TaylorGeometry>(m, "TaylorGeometry")
      .def_readonly("m", &analysis::TaylorGeometry::m)
      .def_readonly("l", &analysis::TaylorGeometry::l)
      .def_readonly("c1", &analysis::TaylorGeometry::c1)
      .def_readonly("c2", &analysis::TaylorGeometry::c2)
      .def_readonly("c3", &analysis::TaylorGeometry::c3);
  py::class_<analysis::TaylorDataCoeffs>(m, "TaylorDataCoeffs")
      .def_readonly("a", &analysis::TaylorDataCoeffs::a)
      .def_readonly("b", &analysis::TaylorDataCoeffs::b)
      .def_readonly("d", &analysis::TaylorDataCoeffs::d)
      .def_readonly("g", &analysis::TaylorDataCoeffs::g)
      .def_readonly("e", &analysis::TaylorDataCoeffs::e);
  py::class_<analysis::TaylorBeta>(m, "TaylorBeta")
      .def_readonly("m", &analysis::TaylorBeta::m)
      .def_readonly("l", &analysis::TaylorBeta::l)
      .def_readonly("K1", &analysis::TaylorBeta::K1)
      .def_readonly("K2", &analysis::TaylorBeta::K2)
      .def_readonly("denominator", &analysis::TaylorBeta::denominator)
      .def_readonly("beta", &analysis::TaylorBeta::beta)
      .def("l1", &analysis::TaylorBeta::l1);
  m.def("taylor_geometry", &analysis::taylor_geometry, py::arg("m"), py::arg("l"));
  m.def("taylor_data_coeffs", &analysis::taylor_data_coeffs, py::arg("u"), py::arg("dudx"),
        py::arg("dudt"));
  m.def("taylor_first_order_beta", &analysis::taylor_first_order_beta, py::arg("geometry"),
        py::arg("coeffs"), py::arg("dx"), py::arg("dt"));
  m.def("sufficient_stability_check", &analysis::sufficient_stability_check, py::arg("tb"));
  m.def("diffusion_closed_form_beta", &analysis::diffusion_closed_form_beta, py::arg("xQ"),
        py::arg("x_i"), py::arg("c"), py::arg("dt"));
  py::class_<analysis::DiffusionTaylorBeta>(m, "DiffusionTaylorBeta")
      .def_readonly("beta", &analysis::DiffusionTaylorBeta::beta)
      .def_readonly("l1", &analysis::DiffusionTaylorBeta::l1)
      .def_readonly("near_singular", &analysis::DiffusionTaylorBeta::near_singular);
  m.def("diffusion_taylor_beta", &analysis::diffusion_taylor_beta, py::arg("x_i"), py::arg("c"),
        py::arg("dt"), py::arg("dx"));
  m.def("consistency_sum", &analysis::consistency_sum, py::arg("beta"));
}
