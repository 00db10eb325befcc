#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "json.hpp"
#include "sfom/analysis.hpp"
#include "sfom/manufactured.hpp"
#include "sfom/mesh.hpp"
#include "sfom/model.hpp"
#include "sfom/snapshot.hpp"
#include "sfom/solver.hpp"

using namespace sfom;

namespace {

model::SparseLinearOperator scaled_identity(int n, double s) {
  model::SparseLinearOperator A;
  A.n = n;
  A.k = 1;
  for (int i = 0; i < n; ++i) {
    A.cols.push_back(i);
    A.vals.push_back(s);
  }
  return A;
}

analysis::TaylorDataCoeffs translation_coeffs(double a, double b, double d, double speed) {
  // pure transport makes the time slope a multiple of the space slope
  analysis::TaylorDataCoeffs c;
  c.a = a;
  c.b = b;
  c.d = d;
  c.g = -speed * d;
  c.e = -speed * b;
  return c;
}

}  // namespace

TEST_CASE("closed-form decay row matches its symmetric-support hand value") {
  const double h = 0.3, c = 2.0, dt = 0.05;
  Eigen::VectorXd xQ(3);
  xQ << -h, 0.0, h;
  auto beta = analysis::diffusion_closed_form_beta(xQ, 0.0, c, dt);
  const double denom = 1.0 + 2.0 * std::cos(h) * std::cos(h);
  CHECK(beta.values[0] == doctest::Approx(std::exp(-c * dt) * std::cos(h) / denom).epsilon(1e-14));
  CHECK(beta.values[1] == doctest::Approx(std::exp(-c * dt) / denom).epsilon(1e-14));
  CHECK(beta.values[2] == doctest::Approx(beta.values[0]).epsilon(1e-15));
  CHECK(beta.map.r == 3);
}

TEST_CASE("closed-form row reproduces frozen cosine data exactly at zero decay") {
  const double x_i = 0.7;
  Eigen::VectorXd xQ(3);
  xQ << x_i - 0.24, x_i, x_i + 0.24;
  auto beta = analysis::diffusion_closed_form_beta(xQ, x_i, 1.0, 0.0);
  double pred = 0.0;
  for (int j = 0; j < 3; ++j) pred += beta.values[j] * std::cos(xQ[j]);
  CHECK(pred == doctest::Approx(std::cos(x_i)).epsilon(1e-14));
}

TEST_CASE("closed-form row equals the least-squares row learned from decay snapshots") {
  auto grid = mesh::make_grid_1d(-M_PI, M_PI, 0.24);
  manufactured::DiffusionConfig cfg{1.0, 0.01, 0.0};
  auto snap = manufactured::diffusion_analytic(grid, cfg, 30);
  const int i = 17;
  auto sup = mesh::support_set(grid, i, mesh::build_stencil_1d(1, 1));
  auto prob = snapshot::assemble_local(snap, i, sup, {snapshot::FeatureKind::Linear, 3});
  auto learned = solver::min_norm_solve(prob);

  Eigen::VectorXd xQ(3);
  for (int j = 0; j < 3; ++j) xQ[j] = grid.coordinate(i - 1 + j);
  auto closed = analysis::diffusion_closed_form_beta(xQ, grid.coordinate(i), cfg.c, cfg.dt);
  CHECK((learned.values - closed.values).lpNorm<Eigen::Infinity>() <=
        1e-8 * closed.values.lpNorm<Eigen::Infinity>());
}

TEST_CASE("closed-form row rejects supports with no cosine mass") {
  CHECK_THROWS_AS((void)analysis::diffusion_closed_form_beta(Eigen::VectorXd(0), 0.0, 1.0, 0.1),
                  std::domain_error);
}

TEST_CASE("small-step decay row is uniform at the symmetry point") {
  auto tb = analysis::diffusion_taylor_beta(0.0, 1.0, 0.01, 0.24);
  CHECK_FALSE(tb.near_singular);
  for (int j = 0; j < 3; ++j)
    CHECK(tb.beta.values[j] == doctest::Approx(0.99 / 3.0).epsilon(1e-14));
  CHECK(tb.l1 == doctest::Approx(0.99).epsilon(1e-14));
  CHECK(tb.l1 == doctest::Approx(tb.beta.values.lpNorm<1>()).epsilon(1e-15));
}

TEST_CASE("small-step decay row flags the cosine zero") {
  auto tb = analysis::diffusion_taylor_beta(M_PI / 2.0, 1.0, 0.01, 0.24);
  CHECK(tb.near_singular);
}

TEST_CASE("small-step decay row approaches the closed form at second order in dx") {
  const double x_i = 0.5, c = 1.0, dt = 0.01;
  auto err = [&](double dx) {
    Eigen::VectorXd xQ(3);
    xQ << x_i - dx, x_i, x_i + dx;
    auto closed = analysis::diffusion_closed_form_beta(xQ, x_i, c, dt);
    auto taylor = analysis::diffusion_taylor_beta(x_i, c, dt, dx);
    return (closed.values - taylor.beta.values).lpNorm<Eigen::Infinity>();
  };
  const double ratio = err(0.2) / err(0.1);
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);
}

TEST_CASE("consistency sum reads only the linear feature block") {
  solver::CoefficientVector lin;
  lin.map = {snapshot::FeatureKind::Linear, 3};
  lin.values = Eigen::Vector3d(0.4, 0.2, 0.4);
  CHECK(analysis::consistency_sum(lin) == doctest::Approx(1.0).epsilon(1e-15));

  solver::CoefficientVector had;
  had.map = {snapshot::FeatureKind::LinearHadamardQuadratic, 3};
  had.values.resize(6);
  had.values << 0.4, 0.2, 0.4, 9.0, 9.0, 9.0;
  CHECK(analysis::consistency_sum(had) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("stencil moment constants follow the half-width arithmetic") {
  auto g = analysis::taylor_geometry(1, 1);
  CHECK(g.c1 == 3.0);
  CHECK(g.c2 == 2.0);
  CHECK(g.c3 == 0.0);

  g = analysis::taylor_geometry(2, 2);
  CHECK(g.c1 == 5.0);
  CHECK(g.c2 == 10.0);
  CHECK(g.c3 == 0.0);

  g = analysis::taylor_geometry(0, 1);
  CHECK(g.c1 == 2.0);
  CHECK(g.c2 == 1.0);
  CHECK(g.c3 == 1.0);

  g = analysis::taylor_geometry(1, 2);
  CHECK(g.c1 == 4.0);
  CHECK(g.c2 == 6.0);
  CHECK(g.c3 == 2.0);

  CHECK_THROWS_AS((void)analysis::taylor_geometry(0, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)analysis::taylor_geometry(-1, 2), std::invalid_argument);
}

TEST_CASE("data coefficients are plain inner products of the three series") {
  Eigen::VectorXd u(2), ux(2), ut(2);
  u << 1.0, 2.0;
  ux << 3.0, 4.0;
  ut << 5.0, 6.0;
  auto c = analysis::taylor_data_coeffs(u, ux, ut);
  CHECK(c.a == 5.0);
  CHECK(c.b == 25.0);
  CHECK(c.d == 11.0);
  CHECK(c.g == 17.0);
  CHECK(c.e == 39.0);

  CHECK_THROWS_AS((void)analysis::taylor_data_coeffs(u, ux, Eigen::VectorXd(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)analysis::taylor_data_coeffs(Eigen::VectorXd(0), Eigen::VectorXd(0),
                                                     Eigen::VectorXd(0)),
                  std::invalid_argument);
}

TEST_CASE("finite-difference coefficients factor separably on decay snapshots") {
  auto grid = mesh::make_grid_1d(-M_PI, M_PI, 0.24);
  manufactured::DiffusionConfig cfg{1.5, 0.02, 0.0};
  const int N = 12;  // transitions, so N+1 stored states
  auto snap = manufactured::diffusion_analytic(grid, cfg, N);
  const int i = 5;
  auto c = analysis::taylor_data_coeffs_fd(snap, grid, i);

  double time_mass = 0.0;
  for (int k = 0; k < N; ++k) time_mass += std::exp(-2.0 * cfg.c * k * cfg.dt);
  const double ci = std::cos(grid.coordinate(i));
  const double slope =
      (std::cos(grid.coordinate(i + 1)) - std::cos(grid.coordinate(i - 1))) / (2.0 * grid.dx);
  const double decay_rate = (std::exp(-cfg.c * cfg.dt) - 1.0) / cfg.dt;

  CHECK(c.a == doctest::Approx(ci * ci * time_mass).epsilon(1e-12));
  CHECK(c.b == doctest::Approx(slope * slope * time_mass).epsilon(1e-12));
  CHECK(c.d == doctest::Approx(ci * slope * time_mass).epsilon(1e-12));
  CHECK(c.g / c.a == doctest::Approx(decay_rate).epsilon(1e-12));
  CHECK(c.e / c.d == doctest::Approx(decay_rate).epsilon(1e-12));

  // separable data has collinear state and slope series
  CHECK_THROWS_AS((void)analysis::taylor_first_order_beta(analysis::taylor_geometry(1, 1), c,
                                                          grid.dx, cfg.dt),
                  std::domain_error);
}

TEST_CASE("finite-difference coefficients validate grid and dof") {
  auto grid = mesh::make_grid_1d(-1.0, 1.0, 0.25);
  auto snap = manufactured::diffusion_analytic(grid, {1.0, 0.05, 0.0}, 5);
  CHECK_THROWS_AS((void)analysis::taylor_data_coeffs_fd(snap, grid, -1), std::out_of_range);
  CHECK_THROWS_AS((void)analysis::taylor_data_coeffs_fd(snap, grid, grid.n), std::out_of_range);

  auto bounded = mesh::make_grid_1d(-1.0, 1.0, 0.25, false);
  CHECK_THROWS_AS((void)analysis::taylor_data_coeffs_fd(snap, bounded, 0), std::out_of_range);

  auto wrong = mesh::make_grid_1d(-1.0, 1.0, 0.125);
  CHECK_THROWS_AS((void)analysis::taylor_data_coeffs_fd(snap, wrong, 2), std::invalid_argument);

  manufactured::SnapshotSet single;
  single.states = snap.states.leftCols(1);
  single.dt = snap.dt;
  CHECK_THROWS_AS((void)analysis::taylor_data_coeffs_fd(single, grid, 2), std::invalid_argument);
}

TEST_CASE("transport data yields the drifted uniform row on a symmetric stencil") {
  const double speed = 1.0, dx = 0.1;
  auto geom = analysis::taylor_geometry(1, 1);
  auto coeffs = translation_coeffs(2.3, 1.7, 0.9, speed);

  for (double ratio : {0.1, 0.5}) {
    auto tb = analysis::taylor_first_order_beta(geom, coeffs, dx, ratio * dx);
    const double drift = speed * ratio;
    CHECK(tb.beta[0] == doctest::Approx(1.0 / 3.0 + drift / 2.0).epsilon(1e-12));
    CHECK(tb.beta[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(tb.beta[2] == doctest::Approx(1.0 / 3.0 - drift / 2.0).epsilon(1e-12));
    CHECK(tb.beta.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tb.l1() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("transport row on a one-sided stencil pins the upwind cell as dt vanishes") {
  auto geom = analysis::taylor_geometry(0, 1);
  auto coeffs = translation_coeffs(1.9, 2.4, -0.6, 1.0);
  auto tb = analysis::taylor_first_order_beta(geom, coeffs, 0.1, 1e-12);
  CHECK(tb.beta[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(tb.beta[1] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("row-sum stability verdict flips exactly at the sampling ratio bound") {
  const double dx = 0.013;
  for (int m : {1, 2}) {
    for (double speed : {1.0, 2.0}) {
      auto geom = analysis::taylor_geometry(m, m);
      auto coeffs = translation_coeffs(1.3, 0.8, 0.4, speed);
      const double bound = analysis::sampling_cfl_bound(m, speed);
      auto below = analysis::taylor_first_order_beta(geom, coeffs, dx,
                                                     bound * (1.0 - 1e-9) * dx);
      auto above = analysis::taylor_first_order_beta(geom, coeffs, dx,
                                                     bound * (1.0 + 1e-9) * dx);
      CHECK(analysis::sufficient_stability_check(below));
      CHECK_FALSE(analysis::sufficient_stability_check(above));
      CHECK(below.l1() <= 1.0 + 1e-12);
      CHECK(above.l1() > 1.0);
    }
  }
}

TEST_CASE("first-order row construction validates steps and data") {
  auto geom = analysis::taylor_geometry(1, 1);
  auto coeffs = translation_coeffs(1.0, 1.0, 0.2, 1.0);
  CHECK_THROWS_AS((void)analysis::taylor_first_order_beta(geom, coeffs, 0.0, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)analysis::taylor_first_order_beta(geom, coeffs, 0.1, -1.0),
                  std::invalid_argument);

  analysis::TaylorDataCoeffs collinear;
  collinear.a = 4.0;
  collinear.b = 1.0;
  collinear.d = 2.0;  // ux = u/2 exactly
  CHECK_THROWS_AS((void)analysis::taylor_first_order_beta(geom, collinear, 0.1, 0.01),
                  std::domain_error);
}

TEST_CASE("row-sum verdict compares the accumulated magnitudes against the denominator") {
  analysis::TaylorBeta tb;
  tb.m = 1;
  tb.l = 1;
  tb.K1 = 1.0;
  tb.K2 = 0.0;
  tb.denominator = 3.0;
  CHECK(analysis::sufficient_stability_check(tb));
  // a sub-ulp-scale excess is accumulation rounding, not instability
  tb.denominator = 3.0 * (1.0 - 1e-14);
  CHECK(analysis::sufficient_stability_check(tb));
  tb.denominator = 3.0 - 1e-12;
  CHECK_FALSE(analysis::sufficient_stability_check(tb));
}

TEST_CASE("sampling ratio bound scales with stencil width and speed") {
  CHECK(analysis::sampling_cfl_bound(1, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(analysis::sampling_cfl_bound(2, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(analysis::sampling_cfl_bound(1, 2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(analysis::sampling_cfl_bound(3, 0.5) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS((void)analysis::sampling_cfl_bound(1, 0.0), std::domain_error);
  CHECK_THROWS_AS((void)analysis::sampling_cfl_bound(1, -1.0), std::domain_error);
  CHECK_THROWS_AS((void)analysis::sampling_cfl_bound(0, 1.0), std::invalid_argument);
}

TEST_CASE("row-norm check reports norms without touching the spectrum") {
  auto rep = analysis::gershgorin_check(scaled_identity(4, 0.5));
  REQUIRE(rep.row_l1.size() == 4);
  for (double s : rep.row_l1) CHECK(s == 0.5);
  CHECK(rep.max_row_l1 == 0.5);
  CHECK(rep.sufficient_stable);
  CHECK(rep.stable);
  CHECK(rep.rho == -1.0);
  CHECK(rep.eigenvalues.empty());
  CHECK_FALSE(rep.quadratic_ignored);
}

TEST_CASE("row-norm check is sound but not necessary") {
  model::SparseLinearOperator A;
  A.n = 2;
  A.k = 2;
  A.cols = {0, 1, 0, 1};
  A.vals = {0.6, 0.6, 0.0, 0.1};
  auto rows = analysis::gershgorin_check(A);
  CHECK_FALSE(rows.sufficient_stable);
  CHECK_FALSE(rows.stable);
  CHECK(rows.max_row_l1 == doctest::Approx(1.2).epsilon(1e-15));

  auto spectrum = analysis::spectral_radius(A);
  CHECK(spectrum.rho == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(spectrum.stable);
}

TEST_CASE("row-norm check on a model notes when a quadratic part was ignored") {
  model::DiscreteModel mod;
  mod.A = scaled_identity(3, 0.4);
  auto rep = analysis::gershgorin_check(mod);
  CHECK_FALSE(rep.quadratic_ignored);

  mod.H = model::QuadraticHadamardOperator{scaled_identity(3, 0.2)};
  rep = analysis::gershgorin_check(mod);
  CHECK(rep.quadratic_ignored);
  CHECK(rep.sufficient_stable);
}

TEST_CASE("dense spectrum of a scaled identity is the scale itself") {
  auto rep = analysis::spectral_radius(scaled_identity(3, 0.9));
  CHECK(rep.rho == doctest::Approx(0.9).epsilon(1e-13));
  CHECK(rep.stable);
  CHECK(rep.sufficient_stable);
  REQUIRE(rep.eigenvalues.size() == 3);
  for (const auto& z : rep.eigenvalues) {
    CHECK(z.real() == doctest::Approx(0.9).epsilon(1e-13));
    CHECK(std::abs(z.imag()) < 1e-13);
  }
}

TEST_CASE("dense spectrum of a cyclic shift sits on the unit circle") {
  const int n = 5;
  model::SparseLinearOperator A;
  A.n = n;
  A.k = 1;
  for (int i = 0; i < n; ++i) {
    A.cols.push_back((i + 1) % n);
    A.vals.push_back(1.0);
  }
  auto rep = analysis::spectral_radius(A, analysis::SpectralMode::Dense);
  CHECK(rep.rho == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.stable);
  REQUIRE(rep.eigenvalues.size() == 5);
  for (const auto& z : rep.eigenvalues) CHECK(std::abs(z) == doctest::Approx(1.0).epsilon(1e-12));

  for (auto& v : A.vals) v = 1.2;
  rep = analysis::spectral_radius(A, analysis::SpectralMode::Dense);
  CHECK(rep.rho == doctest::Approx(1.2).epsilon(1e-12));
  CHECK_FALSE(rep.stable);
  CHECK_FALSE(rep.sufficient_stable);
}

TEST_CASE("power iteration tracks a dominant complex pair") {
  const double theta = 0.7, r = 0.9;
  model::SparseLinearOperator A;
  A.n = 4;
  A.k = 2;
  A.cols = {0, 1, 0, 1, 2, 0, 3, 0};
  A.vals = {r * std::cos(theta), -r * std::sin(theta),
            r * std::sin(theta), r * std::cos(theta),
            0.3, 0.0, 0.3, 0.0};
  auto rep = analysis::spectral_radius(A, analysis::SpectralMode::Power);
  CHECK(rep.power_converged);
  CHECK(rep.rho == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(rep.eigenvalues.empty());

  auto dense = analysis::spectral_radius(A, analysis::SpectralMode::Dense);
  CHECK(std::abs(rep.rho - dense.rho) <= 1e-6);
}

TEST_CASE("power iteration agrees with the dense spectrum on a heat step matrix") {
  const int n = 60;
  const double r = 0.4;
  model::SparseLinearOperator A;
  A.n = n;
  A.k = 3;
  for (int i = 0; i < n; ++i) {
    A.cols.insert(A.cols.end(), {(i + n - 1) % n, i, (i + 1) % n});
    A.vals.insert(A.vals.end(), {r, 1.0 - 2.0 * r, r});
  }
  auto dense = analysis::spectral_radius(A, analysis::SpectralMode::Dense);
  auto power = analysis::spectral_radius(A, analysis::SpectralMode::Power);
  CHECK(dense.rho == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(power.power_converged);
  CHECK(std::abs(power.rho - dense.rho) <= 1e-6);
}

TEST_CASE("power iteration terminates on a nilpotent operator") {
  model::SparseLinearOperator A;
  A.n = 3;
  A.k = 1;
  A.cols = {1, 2, 0};
  A.vals = {1.0, 1.0, 0.0};
  auto rep = analysis::spectral_radius(A, analysis::SpectralMode::Power);
  CHECK(rep.power_converged);
  CHECK(rep.rho <= 1e-8);
  CHECK(rep.stable);
}

TEST_CASE("per-dof closed-form model keeps the cosine mode and the decay spectrum") {
  auto grid = mesh::make_grid_1d(-M_PI, M_PI, 0.24);
  const double c = 1.0, dt = 0.01;
  auto st = mesh::build_stencil_1d(1, 1);
  std::vector<solver::CoefficientVector> betas;
  for (int i = 0; i < grid.n; ++i) {
    // the wrapped support coordinates matter at the seam rows
    auto sup = mesh::support_set(grid, i, st);
    Eigen::VectorXd xQ(3);
    for (int j = 0; j < 3; ++j) xQ[j] = grid.coordinate(sup.members[j]);
    betas.push_back(analysis::diffusion_closed_form_beta(xQ, grid.coordinate(i), c, dt));
  }
  auto mod = model::assemble_per_dof(betas, grid, st);

  Eigen::VectorXd cosine(grid.n);
  for (int i = 0; i < grid.n; ++i) cosine[i] = std::cos(grid.coordinate(i));
  const double lambda = std::exp(-c * dt);
  CHECK((mod.A.apply(cosine) - lambda * cosine).lpNorm<Eigen::Infinity>() < 1e-14);

  auto rep = analysis::spectral_radius(mod.A);
  CHECK(rep.rho == doctest::Approx(lambda).epsilon(1e-9));
  CHECK(rep.stable);
}

TEST_CASE("stability report serializes every field as json") {
  auto rep = analysis::spectral_radius(scaled_identity(2, 0.5));
  auto j = nlohmann::json::parse(rep.to_json());
  CHECK(j["max_row_l1"].get<double>() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(j["rho"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(j["sufficient_stable"].get<bool>());
  CHECK(j["stable"].get<bool>());
  CHECK(j["power_converged"].get<bool>());
  CHECK_FALSE(j["quadratic_ignored"].get<bool>());
  REQUIRE(j["row_l1"].size() == 2);
  REQUIRE(j["eigenvalues"].size() == 2);
  CHECK(j["eigenvalues"][0].size() == 2);
}
