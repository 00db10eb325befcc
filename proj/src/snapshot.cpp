#include "sfom/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sfom/random.hpp"

namespace sfom::snapshot {

int FeatureMap::dim() const {
  switch (kind) {
    case FeatureKind::Linear: return r;
    case FeatureKind::LinearHadamardQuadratic: return 2 * r;
    case FeatureKind::LinearQuadraticConstant: return r + r * (r + 1) / 2 + 1;
  }
  return 0;
}

int FeatureMap::quadratic_size() const {
  switch (kind) {
    case FeatureKind::Linear: return 0;
    case FeatureKind::LinearHadamardQuadratic: return r;
    case FeatureKind::LinearQuadraticConstant: return r * (r + 1) / 2;
  }
  return 0;
}

Eigen::VectorXd feature_vector(const Eigen::VectorXd& uQ, double center_value,
                               const FeatureMap& map) {
  if (uQ.size() != map.r) throw std::invalid_argument("support size does not match feature map");
  Eigen::VectorXd f(map.dim());
  f.head(map.r) = uQ;
  switch (map.kind) {
    case FeatureKind::Linear:
      break;
    case FeatureKind::LinearHadamardQuadratic:
      f.tail(map.r) = center_value * uQ;
      break;
    case FeatureKind::LinearQuadraticConstant: {
      int p = map.r;
      for (int a = 0; a < map.r; ++a)
        for (int b = a; b < map.r; ++b) f[p++] = uQ[a] * uQ[b];
      f[p] = 1.0;
      break;
    }
  }
  return f;
}

namespace {

void fill_block(const manufactured::SnapshotSet& snap, int center,
                const std::vector<int>& members, const FeatureMap& map,
                Eigen::MatrixXd& D, Eigen::VectorXd& d, int row0) {
  const int N = snap.transitions();
  const int r = static_cast<int>(members.size());
  Eigen::VectorXd uQ(r);
  for (int k = 0; k < N; ++k) {
    for (int j = 0; j < r; ++j) uQ[j] = snap.states(members[j], k);
    D.row(row0 + k) = feature_vector(uQ, snap.states(center, k), map);
    d[row0 + k] = snap.states(center, k + 1);
  }
}

template <class Grid>
LocalProblem augment_impl(const manufactured::SnapshotSet& snap, const AugmentationPlan& plan,
                          const Grid& grid, const mesh::Stencil& st, const FeatureMap& map) {
  if (plan.indices.empty()) throw std::invalid_argument("empty augmentation plan");
  const int N = snap.transitions();
  LocalProblem prob;
  prob.map = map;
  prob.dt = snap.dt;
  prob.centers = plan.indices;
  prob.D.resize(static_cast<long>(N) * plan.indices.size(), map.dim());
  prob.d.resize(prob.D.rows());
  int row0 = 0;
  for (int idx : plan.indices) {
    auto support = mesh::support_set(grid, idx, st);
    if (support.cardinality() != map.r)
      throw std::invalid_argument("mixed feature dimensions in augmented problem");
    fill_block(snap, idx, support.members, map, prob.D, prob.d, row0);
    row0 += N;
  }
  return prob;
}

}  // namespace

LocalProblem assemble_local(const manufactured::SnapshotSet& snap, int i,
                            const mesh::SupportSet& support, const FeatureMap& map) {
  if (snap.states.cols() < 2) throw std::invalid_argument("need at least 2 snapshots");
  for (int j : support.members)
    if (j < 0 || j >= snap.n()) throw std::out_of_range("support index out of range");
  if (support.cardinality() != map.r)
    throw std::invalid_argument("support size does not match feature map");
  LocalProblem prob;
  prob.map = map;
  prob.dt = snap.dt;
  prob.centers = {i};
  prob.D.resize(snap.transitions(), map.dim());
  prob.d.resize(snap.transitions());
  fill_block(snap, i, support.members, map, prob.D, prob.d, 0);
  return prob;
}

AugmentationPlan sample_augmentation_indices(int n, int count, std::uint64_t seed) {
  if (count < 1 || count > n) throw std::invalid_argument("augmentation count out of range");
  AugmentationPlan plan;
  plan.seed = seed;
  plan.indices = random::sample_without_replacement(n, count, seed);
  return plan;
}

AugmentationPlan sample_augmentation_fraction(int n, double fraction, std::uint64_t seed) {
  const int count = static_cast<int>(std::ceil(fraction * n));
  return sample_augmentation_indices(n, count, seed);
}

LocalProblem augment(const manufactured::SnapshotSet& snap, const AugmentationPlan& plan,
                     const mesh::Grid1D& grid, const mesh::Stencil& st, const FeatureMap& map) {
  return augment_impl(snap, plan, grid, st, map);
}

LocalProblem augment(const manufactured::SnapshotSet& snap, const AugmentationPlan& plan,
                     const mesh::Grid2D& grid, const mesh::Stencil& st, const FeatureMap& map) {
  return augment_impl(snap, plan, grid, st, map);
}

double GramProblem::residual_norm(const Eigen::VectorXd& beta) const {
  double r2 = dtd - 2.0 * beta.dot(rhs) + beta.dot(G * beta);
  return std::sqrt(std::max(r2, 0.0));
}

GramProblem to_gram(const LocalProblem& prob) {
  GramProblem g;
  g.map = prob.map;
  g.rows = prob.D.rows();
  g.G = prob.D.transpose() * prob.D;
  g.rhs = prob.D.transpose() * prob.d;
  g.dtd = prob.d.squaredNorm();
  return g;
}

GramProblem accumulate_gram(const manufactured::SnapshotSet& snap, const AugmentationPlan& plan,
                            const mesh::Grid2D& grid, const mesh::Stencil& st,
                            const FeatureMap& map) {
  const int N = snap.transitions();
  const int p = map.dim();
  const int na = static_cast<int>(plan.indices.size());
  GramProblem g;
  g.map = map;
  g.rows = static_cast<long>(N) * na;
  g.G = Eigen::MatrixXd::Zero(p, p);
  g.rhs = Eigen::VectorXd::Zero(p);

  std::vector<std::vector<int>> supports;
  supports.reserve(na);
  for (int idx : plan.indices) {
    auto s = mesh::support_set(grid, idx, st);
    if (s.cardinality() != map.r)
      throw std::invalid_argument("mixed feature dimensions in augmented problem");
    supports.push_back(std::move(s.members));
  }

  // one snapshot column at a time: D_k is na x p, accumulated via syrk-style products
  Eigen::MatrixXd Dk(na, p);
  Eigen::VectorXd dk(na), uQ(map.r);
  for (int k = 0; k < N; ++k) {
    for (int a = 0; a < na; ++a) {
      for (int j = 0; j < map.r; ++j) uQ[j] = snap.states(supports[a][j], k);
      Dk.row(a) = feature_vector(uQ, snap.states(plan.indices[a], k), map);
      dk[a] = snap.states(plan.indices[a], k + 1);
    }
    g.G.noalias() += Dk.transpose() * Dk;
    g.rhs.noalias() += Dk.transpose() * dk;
    g.dtd += dk.squaredNorm();
  }
  return g;
}

}  // namespace sfom::snapshot
