#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <vector>

#include "renyi/marginals.hpp"
#include "renyi/schema.hpp"

namespace renyi {

struct AdmmOptions {
  double rho = 1.0;
  double tol_abs = 1e-6;
  double tol_rel = 1e-4;
  std::size_t max_iter = 10'000;
  /// Double or halve rho when one residual exceeds the other by 10x.
  bool residual_balancing = false;
  std::size_t max_rho_adaptations = 10;
  /// Relative block-norm threshold for membership in the selected set.
  double support_threshold = 1e-6;
  /// Keep only the k largest blocks of the selected set.
  std::optional<std::size_t> top_k;
  bool record_trace = true;
};

struct AdmmStats {
  std::size_t iterations = 0;
  double primal_residual = 0.0;  // ||z - u||_inf
  double dual_residual = 0.0;  // rho ||u - u_prev||_inf
  std::vector<double> objective_trace;  // augmented Lagrangian per iteration
  std::size_t rho_adaptations = 0;
  double final_rho = 1.0;
};

struct SelectionResult {
  /// The u-iterate: exactly zero on blocks the prox switched off.
  Eigen::VectorXd z_rfs;
  std::vector<std::size_t> selected;  // ascending feature indices
  double lambda = 0.0;
  AdmmStats admm_stats;
  std::vector<double> block_norms;
  bool converged = false;
  /// z'Qz - d'z + lambda * sum_i ||z_i||_inf at z_rfs.
  double objective = 0.0;
};

/// Euclidean projection onto {u : ||u||_1 <= radius} (sort and threshold).
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius);

/// Proximal operator of t ||.||_inf, via the Moreau identity v - P_{t B_1}(v).
Eigen::VectorXd prox_linf(const Eigen::VectorXd& v, double t);

/// sum over feature blocks of max |z_k|.
double group_linf_norm(const Eigen::VectorXd& z, const CategoricalSchema& schema);

double selection_objective(const PairwiseMarginals& marg, const Eigen::VectorXd& z, double lambda);

/// Minimises z'Qz - d'z + lambda * sum_i ||z_i||_inf by ADMM on the split
/// z = u. Does not throw on hitting max_iter: the best iterate seen is
/// returned with converged = false.
SelectionResult select(const PairwiseMarginals& marg, double lambda, const AdmmOptions& opts = {});

/// Same problem on the empirical marginals of `data`. When the indicator
/// width exceeds the row count the z-update goes through the n x n Gram
/// matrix (Woodbury) and Q is never formed.
SelectionResult select_saa(const Dataset& data, double lambda, const AdmmOptions& opts = {});

/// count log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

}  // namespace renyi
