#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstddef>
#include <vector>

#include "renyi/joint.hpp"
#include "renyi/schema.hpp"

namespace renyi {

/// First- and second-order marginals of (X, Y) in indicator form.
///
///   Q(offset_i + k - 1, offset_j + l - 1) = P(X_i = k, X_j = l)
///   d(offset_i + k - 1) = P(X_i = k, Y = 1) - P(X_i = k, Y = 0)
///
/// Q includes the diagonal blocks, so Q = E[W W^T] for the indicator vector W.
struct PairwiseMarginals {
  CategoricalSchema schema;
  Eigen::MatrixXd Q;
  Eigen::VectorXd d;
  double q0 = 0.5;  // P(Y = 0)
  std::size_t n = 0;  // sample count, 0 for exact marginals
  double smoothing_alpha = 0.0;

  /// P(X_i = k, Y = y) recovered from the diagonal of Q and d (k is 1-based).
  double feature_label(std::size_t i, Category k, int y) const;
};

/// Empirical marginals. With smoothing_alpha > 0 the counts are mixed with
/// alpha pseudo-samples spread uniformly over every table (equivalently, the
/// empirical joint is mixed with the uniform joint), which keeps all tables
/// mutually consistent.
PairwiseMarginals estimate(const Dataset& data, double smoothing_alpha = 0.0);

/// Exact marginalisation of an explicit joint.
PairwiseMarginals from_joint(const JointDistribution& p);

/// One equality row per pairwise event {X_i = k, X_j = l} (i < j) followed by
/// one row per feature-label event {X_i = k, Y = y}. Column c of A is the
/// joint outcome (c / 2, c % 2) in JointDistribution numbering.
struct MarginalConstraints {
  CategoricalSchema schema;
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;
  Eigen::VectorXd b;
  std::size_t pairwise_rows = 0;
  std::size_t feature_label_rows = 0;

  std::size_t num_outcomes() const noexcept { return static_cast<std::size_t>(A.cols()); }
  std::size_t num_configurations() const noexcept { return num_outcomes() / 2; }
};

inline constexpr std::size_t kDefaultOutcomeCap = 2'000'000;

MarginalConstraints build_constraints(const PairwiseMarginals& marg, std::size_t outcome_cap = kDefaultOutcomeCap);

}  // namespace renyi
