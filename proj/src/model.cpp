#include "sfom/model.hpp"

#include <cmath>
#include <fstream>
#include "json.hpp"
#include <stdexcept>

namespace sfom::model {

using json = nlohmann::ordered_json;

Eigen::VectorXd SparseLinearOperator::apply(const Eigen::VectorXd& u) const {
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    const int base = i * k;
    for (int j = 0; j < k; ++j) acc += vals[base + j] * u[cols[base + j]];
    out[i] = acc;
  }
  return out;
}

Eigen::MatrixXd SparseLinearOperator::dense() const {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) M(i, cols[i * k + j]) += vals[i * k + j];
  return M;
}

double SparseLinearOperator::row_l1(int i) const {
  double acc = 0.0;
  for (int j = 0; j < k; ++j) acc += std::abs(vals[i * k + j]);
  return acc;
}

namespace {

void meta_from_stencil(ModelMetadata& meta, const mesh::Stencil& st) {
  meta.dims = st.dims;
  if (st.dims == 1) {
    meta.stencil_m = st.m;
    meta.stencil_l = st.l;
  } else {
    meta.stencil_halfwidth = (static_cast<int>(std::lround(std::sqrt(
                                  static_cast<double>(st.size())))) -
                              1) /
                             2;
  }
}

const char* feature_name(snapshot::FeatureKind kind) {
  switch (kind) {
    case snapshot::FeatureKind::Linear: return "linear";
    case snapshot::FeatureKind::LinearHadamardQuadratic: return "linear_hadamard_quadratic";
    case snapshot::FeatureKind::LinearQuadraticConstant: return "linear_quadratic_constant";
  }
  return "?";
}

snapshot::FeatureKind feature_from_name(const std::string& s) {
  if (s == "linear") return snapshot::FeatureKind::Linear;
  if (s == "linear_hadamard_quadratic") return snapshot::FeatureKind::LinearHadamardQuadratic;
  if (s == "linear_quadratic_constant") return snapshot::FeatureKind::LinearQuadraticConstant;
  throw std::runtime_error("unknown feature map: " + s);
}

template <class Grid>
DiscreteModel assemble_impl(const std::vector<const solver::CoefficientVector*>& rows,
                            const Grid& grid, const mesh::Stencil& st, int n) {
  const auto& map0 = rows[0]->map;
  if (map0.kind == snapshot::FeatureKind::LinearQuadraticConstant)
    throw std::invalid_argument(
        "full-quadratic coefficients have no row-local operator; use the Hadamard map");
  if (map0.r != st.size())
    throw std::invalid_argument("feature map and stencil disagree on support size");

  DiscreteModel model;
  model.A.n = n;
  model.A.k = st.size();
  model.A.cols.resize(static_cast<size_t>(n) * st.size());
  model.A.vals.resize(static_cast<size_t>(n) * st.size());
  const bool hadamard = map0.kind == snapshot::FeatureKind::LinearHadamardQuadratic;
  if (hadamard) {
    model.H.emplace();
    model.H->H.n = n;
    model.H->H.k = st.size();
    model.H->H.cols.resize(static_cast<size_t>(n) * st.size());
    model.H->H.vals.resize(static_cast<size_t>(n) * st.size());
  }

  for (int i = 0; i < n; ++i) {
    const auto& beta = *rows[i];
    if (beta.map.kind != map0.kind || beta.map.r != map0.r)
      throw std::invalid_argument("mixed feature maps across rows");
    auto support = mesh::support_set(grid, i, st);
    const int base = i * st.size();
    for (int j = 0; j < st.size(); ++j) {
      model.A.cols[base + j] = support.members[j];
      model.A.vals[base + j] = beta.values[j];
      if (hadamard) {
        model.H->H.cols[base + j] = support.members[j];
        model.H->H.vals[base + j] = beta.values[map0.r + j];
      }
    }
  }
  meta_from_stencil(model.meta, st);
  model.meta.feature = feature_name(map0.kind);
  return model;
}

template <class Grid>
DiscreteModel shared_impl(const solver::CoefficientVector& beta, const Grid& grid,
                          const mesh::Stencil& st, int n) {
  std::vector<const solver::CoefficientVector*> rows(n, &beta);
  return assemble_impl(rows, grid, st, n);
}

template <class Grid>
DiscreteModel per_dof_impl(const std::vector<solver::CoefficientVector>& betas,
                           const Grid& grid, const mesh::Stencil& st, int n) {
  if (static_cast<int>(betas.size()) != n)
    throw std::invalid_argument("need one coefficient vector per DOF");
  std::vector<const solver::CoefficientVector*> rows(n);
  for (int i = 0; i < n; ++i) rows[i] = &betas[i];
  return assemble_impl(rows, grid, st, n);
}

}  // namespace

DiscreteModel assemble_shared(const solver::CoefficientVector& beta, const mesh::Grid1D& grid,
                              const mesh::Stencil& st) {
  return shared_impl(beta, grid, st, grid.n);
}

DiscreteModel assemble_shared(const solver::CoefficientVector& beta, const mesh::Grid2D& grid,
                              const mesh::Stencil& st) {
  return shared_impl(beta, grid, st, grid.n());
}

DiscreteModel assemble_per_dof(const std::vector<solver::CoefficientVector>& betas,
                               const mesh::Grid1D& grid, const mesh::Stencil& st) {
  return per_dof_impl(betas, grid, st, grid.n);
}

DiscreteModel assemble_per_dof(const std::vector<solver::CoefficientVector>& betas,
                               const mesh::Grid2D& grid, const mesh::Stencil& st) {
  return per_dof_impl(betas, grid, st, grid.n());
}

Eigen::VectorXd step(const DiscreteModel& model, const Eigen::VectorXd& u) {
  if (u.size() != model.A.n) throw std::invalid_argument("state dimension mismatch");
  if (!u.allFinite()) throw std::invalid_argument("non-finite state");
  Eigen::VectorXd out = model.A.apply(u);
  if (model.H) out += model.H->H.apply(u).cwiseProduct(u);
  if (model.c) out += *model.c;
  return out;
}

RolloutResult rollout(const DiscreteModel& model, Eigen::VectorXd u0, int K, double guard) {
  if (K < 1) throw std::invalid_argument("need at least one step");
  RolloutResult res;
  res.state = std::move(u0);
  for (int k = 1; k <= K; ++k) {
    Eigen::VectorXd next = step(model, res.state);
    if (!next.allFinite() || next.cwiseAbs().maxCoeff() > guard) {
      res.diverged_step = k;
      return res;
    }
    res.state = std::move(next);
    res.steps = k;
  }
  res.completed = true;
  return res;
}

double average_error(const Eigen::VectorXd& pred, const Eigen::VectorXd& ref,
                     bool use_max_abs) {
  if (pred.size() != ref.size()) throw std::invalid_argument("length mismatch");
  const double denom = use_max_abs ? ref.cwiseAbs().maxCoeff() : ref.maxCoeff();
  if (denom <= 0.0) throw std::domain_error("error metric undefined: max(ref) <= 0");
  return (pred - ref).cwiseAbs().mean() / denom * 100.0;
}

namespace {

json operator_to_json(const SparseLinearOperator& op) {
  return json{{"n", op.n}, {"k", op.k}, {"cols", op.cols}, {"vals", op.vals}};
}

SparseLinearOperator operator_from_json(const json& j) {
  SparseLinearOperator op;
  op.n = j.at("n").get<int>();
  op.k = j.at("k").get<int>();
  op.cols = j.at("cols").get<std::vector<int>>();
  op.vals = j.at("vals").get<std::vector<double>>();
  if (op.cols.size() != static_cast<size_t>(op.n) * op.k || op.cols.size() != op.vals.size())
    throw std::runtime_error("malformed operator block");
  for (int c : op.cols)
    if (c < 0 || c >= op.n) throw std::runtime_error("operator column out of range");
  return op;
}

}  // namespace

void save_json(const DiscreteModel& model, const std::string& path) {
  json j;
  j["A"] = operator_to_json(model.A);
  j["H"] = model.H ? operator_to_json(model.H->H) : json(nullptr);
  j["c"] = model.c ? json(std::vector<double>((*model.c).data(),
                                              (*model.c).data() + (*model.c).size()))
                   : json(nullptr);
  j["meta"] = {{"dims", model.meta.dims},
               {"stencil_m", model.meta.stencil_m},
               {"stencil_l", model.meta.stencil_l},
               {"stencil_halfwidth", model.meta.stencil_halfwidth},
               {"feature", model.meta.feature},
               {"eta", model.meta.eta},
               {"g", model.meta.g},
               {"seed", model.meta.seed},
               {"dx", model.meta.dx},
               {"dt", model.meta.dt}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(1, '\t') << "\n";
}

DiscreteModel load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("malformed model file: " + std::string(e.what()));
  }
  DiscreteModel model;
  model.A = operator_from_json(j.at("A"));
  if (!j.at("H").is_null()) model.H = QuadraticHadamardOperator{operator_from_json(j.at("H"))};
  if (!j.at("c").is_null()) {
    auto v = j.at("c").get<std::vector<double>>();
    model.c = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  }
  const auto& m = j.at("meta");
  model.meta.dims = m.at("dims").get<int>();
  model.meta.stencil_m = m.at("stencil_m").get<int>();
  model.meta.stencil_l = m.at("stencil_l").get<int>();
  model.meta.stencil_halfwidth = m.at("stencil_halfwidth").get<int>();
  model.meta.feature = m.at("feature").get<std::string>();
  feature_from_name(model.meta.feature);  // reject unknown feature tags early
  model.meta.eta = m.at("eta").get<double>();
  model.meta.g = m.at("g").get<double>();
  model.meta.seed = m.at("seed").get<std::uint64_t>();
  model.meta.dx = m.at("dx").get<double>();
  model.meta.dt = m.at("dt").get<double>();
  return model;
}

}  // namespace sfom::model
