#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sfom/manufactured.hpp"
#include "sfom/mesh.hpp"

namespace sfom::snapshot {

enum class FeatureKind {
  Linear,                    // [u_Q]
  LinearHadamardQuadratic,   // [u_Q ; u_i * u_Q]
  LinearQuadraticConstant,   // [u_Q ; unique products u_a u_b (a <= b) ; 1]
};

struct FeatureMap {
  FeatureKind kind = FeatureKind::Linear;
  int r = 0;  // support cardinality

  int dim() const;
  // block spans; quadratic/constant empty when absent
  int linear_size() const { return r; }
  int quadratic_size() const;
  bool has_constant() const { return kind == FeatureKind::LinearQuadraticConstant; }
};

Eigen::VectorXd feature_vector(const Eigen::VectorXd& uQ, double center_value,
                               const FeatureMap& map);

struct LocalProblem {
  Eigen::MatrixXd D;         // rows: feature vectors at t_0..t_{N-1} (stacked per center)
  Eigen::VectorXd d;         // entries: center value at t_1..t_N
  std::vector<int> centers;  // one entry per stacked block
  FeatureMap map;
  double dx = 0.0, dt = 0.0;
};

LocalProblem assemble_local(const manufactured::SnapshotSet& snap, int i,
                            const mesh::SupportSet& support, const FeatureMap& map);

struct AugmentationPlan {
  std::vector<int> indices;
  std::uint64_t seed = 0;
};

AugmentationPlan sample_augmentation_indices(int n, int count, std::uint64_t seed);
// count = ceil(fraction * n)
AugmentationPlan sample_augmentation_fraction(int n, double fraction, std::uint64_t seed);

// vertical stacking of per-DOF problems in plan order; one shared coefficient vector
LocalProblem augment(const manufactured::SnapshotSet& snap, const AugmentationPlan& plan,
                     const mesh::Grid1D& grid, const mesh::Stencil& st, const FeatureMap& map);
LocalProblem augment(const manufactured::SnapshotSet& snap, const AugmentationPlan& plan,
                     const mesh::Grid2D& grid, const mesh::Stencil& st, const FeatureMap& map);

// normal-equation form of a (stacked) problem: G = D^T D, rhs = D^T d, dtd = d^T d;
// keeps the memory footprint at p^2 for problems with N*|alpha| rows
struct GramProblem {
  Eigen::MatrixXd G;
  Eigen::VectorXd rhs;
  double dtd = 0.0;
  long rows = 0;
  FeatureMap map;

  double residual_norm(const Eigen::VectorXd& beta) const;
};

GramProblem to_gram(const LocalProblem& prob);
GramProblem accumulate_gram(const manufactured::SnapshotSet& snap, const AugmentationPlan& plan,
                            const mesh::Grid2D& grid, const mesh::Stencil& st,
                            const FeatureMap& map);

}  // namespace sfom::snapshot
