#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "doctest.h"
#include "sfom/mesh.hpp"
#include "sfom/model.hpp"
#include "sfom/snapshot.hpp"
#include "sfom/solver.hpp"

using namespace sfom;

namespace {

solver::CoefficientVector make_beta(snapshot::FeatureKind kind, const Eigen::VectorXd& values,
                                    int r) {
  solver::CoefficientVector beta;
  beta.map = {kind, r};
  beta.values = values;
  return beta;
}

model::SparseLinearOperator diag_op(int n, double s) {
  model::SparseLinearOperator A;
  A.n = n;
  A.k = 1;
  for (int i = 0; i < n; ++i) {
    A.cols.push_back(i);
    A.vals.push_back(s);
  }
  return A;
}

std::filesystem::path temp_model_path(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("sparse apply agrees with the dense form, duplicates included") {
  model::SparseLinearOperator A;
  A.n = 30;
  A.k = 4;
  for (int i = 0; i < A.n; ++i) {
    // includes a duplicated column per row, which must accumulate
    A.cols.insert(A.cols.end(), {i, (i + 7) % 30, (i + 13) % 30, i});
    for (int j = 0; j < 4; ++j) A.vals.push_back(std::sin(0.3 * i + 1.1 * j));
  }
  Eigen::VectorXd u(30);
  for (int i = 0; i < 30; ++i) u[i] = std::cos(0.2 * i) + 0.1 * i;
  CHECK((A.apply(u) - A.dense() * u).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("shared assembly lays the heat stencil down as a circulant") {
  auto grid = mesh::make_grid_1d(0.0, 1.0, 0.02);  // exactly 50 cells, seam dropped
  REQUIRE(grid.n == 50);
  auto st = mesh::build_stencil_1d(1, 1);
  const double r = 0.4;
  auto beta = make_beta(snapshot::FeatureKind::Linear, Eigen::Vector3d(r, 1.0 - 2.0 * r, r), 3);
  auto mod = model::assemble_shared(beta, grid, st);

  CHECK(mod.A.n == 50);
  CHECK(mod.A.k == 3);
  CHECK_FALSE(mod.H.has_value());
  CHECK_FALSE(mod.c.has_value());
  CHECK(mod.meta.dims == 1);
  CHECK(mod.meta.stencil_m == 1);
  CHECK(mod.meta.stencil_l == 1);
  CHECK(mod.meta.feature == "linear");
  for (int i = 0; i < 50; ++i) CHECK(mod.A.row_l1(i) == 1.0);
  CHECK(mod.A.cols[0] == 49);  // wrapped left neighbour of row 0
  CHECK(mod.A.cols[1] == 0);
  CHECK(mod.A.cols[2] == 1);

  Eigen::VectorXd u(50);
  for (int i = 0; i < 50; ++i) u[i] = std::sin(0.7 * i);
  Eigen::VectorXd manual(50);
  for (int i = 0; i < 50; ++i)
    manual[i] = r * u[(i + 49) % 50] + (1.0 - 2.0 * r) * u[i] + r * u[(i + 1) % 50];
  CHECK((model::step(mod, u) - manual).lpNorm<Eigen::Infinity>() < 1e-15);
}

TEST_CASE("a pure right-shift row makes the rollout periodic") {
  auto grid = mesh::make_grid_1d(0.0, 1.0, 1.0 / 6.0);
  REQUIRE(grid.n == 6);
  auto beta = make_beta(snapshot::FeatureKind::Linear, Eigen::Vector3d(0.0, 0.0, 1.0), 3);
  auto mod = model::assemble_shared(beta, grid, mesh::build_stencil_1d(1, 1));

  Eigen::VectorXd u0(6);
  u0 << 1.0, -2.0, 3.0, 0.5, 0.0, 4.0;
  auto res = model::rollout(mod, u0, 6);
  CHECK(res.completed);
  CHECK(res.steps == 6);
  CHECK((res.state - u0).norm() == 0.0);
}

TEST_CASE("per-dof assembly with identical rows equals the shared form") {
  auto grid = mesh::make_grid_1d(0.0, 1.0, 0.1);
  auto st = mesh::build_stencil_1d(1, 1);
  auto beta = make_beta(snapshot::FeatureKind::Linear, Eigen::Vector3d(0.2, 0.5, 0.3), 3);
  std::vector<solver::CoefficientVector> betas(grid.n, beta);
  auto shared = model::assemble_shared(beta, grid, st);
  auto per_dof = model::assemble_per_dof(betas, grid, st);
  CHECK((shared.A.dense() - per_dof.A.dense()).norm() == 0.0);
}

TEST_CASE("per-dof assembly places each row at its wrapped support") {
  auto grid = mesh::make_grid_1d(0.0, 1.0, 0.25);
  REQUIRE(grid.n == 4);
  auto st = mesh::build_stencil_1d(1, 1);
  std::vector<solver::CoefficientVector> betas;
  for (int i = 0; i < 4; ++i)
    betas.push_back(make_beta(snapshot::FeatureKind::Linear,
                              (i + 1) * Eigen::Vector3d(0.01, 0.02, 0.03), 3));
  auto mod = model::assemble_per_dof(betas, grid, st);

  Eigen::MatrixXd M = mod.A.dense();
  CHECK(M(0, 3) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(M(0, 0) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(M(0, 1) == doctest::Approx(0.03).epsilon(1e-15));
  CHECK(M(2, 1) == doctest::Approx(0.03).epsilon(1e-15));
  CHECK(M(2, 2) == doctest::Approx(0.06).epsilon(1e-15));
  CHECK(M(2, 3) == doctest::Approx(0.09).epsilon(1e-15));
  CHECK(M(3, 0) == doctest::Approx(0.12).epsilon(1e-15));
}

TEST_CASE("assembly validates row count, map agreement, and support size") {
  auto grid = mesh::make_grid_1d(0.0, 1.0, 0.25);
  auto st = mesh::build_stencil_1d(1, 1);
  auto beta = make_beta(snapshot::FeatureKind::Linear, Eigen::Vector3d(0.1, 0.2, 0.3), 3);

  std::vector<solver::CoefficientVector> too_few(grid.n - 1, beta);
  CHECK_THROWS_AS((void)model::assemble_per_dof(too_few, grid, st), std::invalid_argument);

  std::vector<solver::CoefficientVector> mixed(grid.n, beta);
  mixed[2] = make_beta(snapshot::FeatureKind::LinearHadamardQuadratic,
                       Eigen::VectorXd::Ones(6), 3);
  CHECK_THROWS_AS((void)model::assemble_per_dof(mixed, grid, st), std::invalid_argument);

  auto wide = make_beta(snapshot::FeatureKind::Linear, Eigen::VectorXd::Ones(5), 5);
  CHECK_THROWS_AS((void)model::assemble_shared(wide, grid, st), std::invalid_argument);
}

TEST_CASE("full-quadratic rows are rejected at assembly") {
  auto grid = mesh::make_grid_1d(0.0, 1.0, 0.25);
  auto beta = make_beta(snapshot::FeatureKind::LinearQuadraticConstant,
                        Eigen::VectorXd::Ones(10), 3);  // 3 + 6 + 1
  CHECK_THROWS_WITH_AS(
      (void)model::assemble_shared(beta, grid, mesh::build_stencil_1d(1, 1)),
      "full-quadratic coefficients have no row-local operator; use the Hadamard map",
      std::invalid_argument);
}

TEST_CASE("hadamard assembly stepping equals the per-dof feature inner product") {
  auto grid = mesh::make_grid_1d(0.0, 1.0, 1.0 / 12.0);
  REQUIRE(grid.n == 12);
  auto st = mesh::build_stencil_1d(1, 1);
  snapshot::FeatureMap map{snapshot::FeatureKind::LinearHadamardQuadratic, 3};
  Eigen::VectorXd values(6);
  values << 0.3, 0.4, 0.1, -0.05, 0.02, 0.07;
  auto beta = make_beta(map.kind, values, 3);
  auto mod = model::assemble_shared(beta, grid, st);
  REQUIRE(mod.H.has_value());
  CHECK(mod.meta.feature == "linear_hadamard_quadratic");

  Eigen::VectorXd u(12);
  for (int i = 0; i < 12; ++i) u[i] = std::sin(1.1 * i) - 0.3;
  auto next = model::step(mod, u);
  for (int i = 0; i < 12; ++i) {
    Eigen::VectorXd uQ(3);
    uQ << u[(i + 11) % 12], u[i], u[(i + 1) % 12];
    const double direct = values.dot(snapshot::feature_vector(uQ, u[i], map));
    CHECK(next[i] == doctest::Approx(direct).epsilon(1e-14));
  }
}

TEST_CASE("planar block assembly carries the quadratic part at full problem size") {
  auto grid = mesh::make_grid_2d(0.0, 1.0, 0.0, 1.0, 0.02, 0.02);
  REQUIRE(grid.n() == 2500);
  auto st = mesh::build_block_stencil_2d(2);
  auto beta = make_beta(snapshot::FeatureKind::LinearHadamardQuadratic,
                        Eigen::VectorXd::Constant(50, 0.01), 25);
  auto mod = model::assemble_shared(beta, grid, st);
  CHECK(mod.A.n == 2500);
  CHECK(mod.A.k == 25);
  REQUIRE(mod.H.has_value());
  CHECK(mod.H->H.n == 2500);
  CHECK(mod.H->H.k == 25);
  CHECK(mod.meta.dims == 2);
  CHECK(mod.meta.stencil_halfwidth == 2);
  CHECK(mod.A.row_l1(0) == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("step composes the linear, hadamard, and constant pieces") {
  model::DiscreteModel mod;
  mod.A = diag_op(3, 1.0);
  mod.H = model::QuadraticHadamardOperator{diag_op(3, 1.0)};
  mod.c = Eigen::Vector3d(1.0, 2.0, 3.0);

  Eigen::VectorXd u(3);
  u << 1.0, 2.0, 3.0;
  auto next = model::step(mod, u);
  CHECK(next[0] == 3.0);   // 1 + 1^2 + 1
  CHECK(next[1] == 8.0);   // 2 + 2^2 + 2
  CHECK(next[2] == 15.0);  // 3 + 3^2 + 3
}

TEST_CASE("step validates the state") {
  model::DiscreteModel mod;
  mod.A = diag_op(3, 0.5);
  CHECK_THROWS_AS((void)model::step(mod, Eigen::VectorXd::Ones(2)), std::invalid_argument);
  Eigen::VectorXd bad = Eigen::VectorXd::Ones(3);
  bad[1] = std::nan("");
  CHECK_THROWS_AS((void)model::step(mod, bad), std::invalid_argument);
}

TEST_CASE("rollout runs a contraction to completion") {
  model::DiscreteModel mod;
  mod.A = diag_op(4, 0.5);
  auto res = model::rollout(mod, Eigen::VectorXd::Ones(4), 10);
  CHECK(res.completed);
  CHECK(res.steps == 10);
  CHECK(res.diverged_step == -1);
  CHECK(res.state[0] == doctest::Approx(std::pow(0.5, 10)).epsilon(1e-15));
}

TEST_CASE("rollout guard reports the first overflowing step") {
  model::DiscreteModel mod;
  mod.A = diag_op(2, 2.0);
  auto res = model::rollout(mod, Eigen::VectorXd::Ones(2), 64);
  CHECK_FALSE(res.completed);
  CHECK(res.diverged_step == 20);  // 2^20 is the first power past 1e6
  CHECK(res.steps == 19);
  CHECK(res.state[0] == doctest::Approx(std::pow(2.0, 19)).epsilon(1e-15));

  auto loose = model::rollout(mod, Eigen::VectorXd::Ones(2), 8, 1e12);
  CHECK(loose.completed);
  CHECK(loose.state[0] == doctest::Approx(256.0).epsilon(1e-15));

  CHECK_THROWS_AS((void)model::rollout(mod, Eigen::VectorXd::Ones(2), 0),
                  std::invalid_argument);
}

TEST_CASE("average error is the mean deviation against the reference peak") {
  Eigen::VectorXd ref(3), pred(3);
  ref << 1.0, 2.0, 4.0;
  pred = ref;
  CHECK(model::average_error(pred, ref) == 0.0);

  pred.array() += 0.04;
  CHECK(model::average_error(pred, ref) == doctest::Approx(1.0).epsilon(1e-12));

  Eigen::VectorXd neg(3);
  neg << -4.0, -2.0, -1.0;
  CHECK_THROWS_AS((void)model::average_error(pred, neg), std::domain_error);
  CHECK(model::average_error(neg.array() + 0.04, neg, true) ==
        doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS((void)model::average_error(Eigen::VectorXd::Ones(2), ref),
                  std::invalid_argument);
}

TEST_CASE("model files round-trip bit for bit") {
  auto grid = mesh::make_grid_1d(0.0, 1.0, 1.0 / 12.0);
  auto st = mesh::build_stencil_1d(1, 1);
  Eigen::VectorXd values(6);
  values << 0.31 / 3.0, 0.47, 0.22, -0.053, 1e-17, 0.07;
  auto beta = make_beta(snapshot::FeatureKind::LinearHadamardQuadratic, values, 3);
  auto mod = model::assemble_shared(beta, grid, st);
  mod.c = Eigen::VectorXd::Constant(12, 0.001 / 7.0);
  mod.meta.eta = 1.7e-5;
  mod.meta.g = 50.0;
  mod.meta.seed = 424242;
  mod.meta.dx = grid.dx;
  mod.meta.dt = 0.008;

  const auto path = temp_model_path("model_roundtrip.json");
  model::save_json(mod, path.string());
  auto back = model::load_json(path.string());
  std::filesystem::remove(path);

  CHECK(back.A.n == mod.A.n);
  CHECK(back.A.k == mod.A.k);
  CHECK(back.A.cols == mod.A.cols);
  CHECK(back.A.vals == mod.A.vals);
  REQUIRE(back.H.has_value());
  CHECK(back.H->H.vals == mod.H->H.vals);
  REQUIRE(back.c.has_value());
  CHECK((*back.c - *mod.c).norm() == 0.0);
  CHECK(back.meta.dims == 1);
  CHECK(back.meta.stencil_m == 1);
  CHECK(back.meta.stencil_l == 1);
  CHECK(back.meta.feature == "linear_hadamard_quadratic");
  CHECK(back.meta.eta == mod.meta.eta);
  CHECK(back.meta.g == mod.meta.g);
  CHECK(back.meta.seed == mod.meta.seed);
  CHECK(back.meta.dx == mod.meta.dx);
  CHECK(back.meta.dt == mod.meta.dt);
}

TEST_CASE("model loading rejects tampered and missing files") {
  auto grid = mesh::make_grid_1d(0.0, 1.0, 0.25);
  auto beta = make_beta(snapshot::FeatureKind::Linear, Eigen::Vector3d(0.1, 0.2, 0.3), 3);
  auto mod = model::assemble_shared(beta, grid, mesh::build_stencil_1d(1, 1));
  const auto path = temp_model_path("model_tamper.json");
  model::save_json(mod, path.string());

  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();

  auto write_text = [&](const std::string& s) {
    std::ofstream out(path);
    out << s;
  };

  std::string renamed = text;
  renamed.replace(renamed.find("\"linear\""), 8, "\"cubic\"");
  write_text(renamed);
  CHECK_THROWS_AS((void)model::load_json(path.string()), std::runtime_error);

  write_text(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS((void)model::load_json(path.string()), std::runtime_error);

  const char* meta_tail = R"("meta": {"dims": 1, "stencil_m": 1, "stencil_l": 0,
    "stencil_halfwidth": -1, "feature": "linear", "eta": 0.0, "g": 0.0, "seed": 0,
    "dx": 0.1, "dt": 0.1}})";
  write_text(std::string(R"({"A": {"n": 2, "k": 1, "cols": [0, 5], "vals": [0.1, 0.2]},
    "H": null, "c": null, )") + meta_tail);
  CHECK_THROWS_AS((void)model::load_json(path.string()), std::runtime_error);

  write_text(std::string(R"({"A": {"n": 2, "k": 1, "cols": [0], "vals": [0.1]},
    "H": null, "c": null, )") + meta_tail);
  CHECK_THROWS_AS((void)model::load_json(path.string()), std::runtime_error);

  std::filesystem::remove(path);
  CHECK_THROWS_AS((void)model::load_json(path.string()), std::runtime_error);
}
