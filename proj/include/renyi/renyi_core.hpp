#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>

#include "renyi/joint.hpp"
#include "renyi/marginals.hpp"
#include "renyi/schema.hpp"

namespace renyi {

/// Absolute slack on the h(z) <= 1/2 and h(-z) <= 1/2 checks.
inline constexpr double kSeparabilityTolerance = 1e-9;

struct SolverStats {
  std::string method;  // "ldlt", "ldlt+jitter", "cg"
  std::size_t iterations = 0;
  double residual = 0.0;  // ||(2Q + 2 lambda I) z - d||_inf
};

/// Minimiser of z'Qz - d'z (+ ridge ||z||^2) and the quantities derived from it.
struct QuadSolution {
  Eigen::VectorXd z;
  double gamma = 0.25;  // z'Qz - d'z + 1/4 at z, always without the ridge term
  double h_plus = 0.0;  // h(z)
  double h_minus = 0.0;  // h(-z)
  bool separable = false;
  double hgr_lower_bound = 0.0;
  double q0 = 0.5;
  SolverStats stats;
};

/// Solves (2Q + 2 ridge I) z = d. At ridge = 0 the system is singular for
/// d >= 2 (every indicator block sums to one); the returned z is then the
/// (near) minimum-norm minimiser.
QuadSolution solve_population(const PairwiseMarginals& marg, double ridge_lambda);

enum class SaaPath { Automatic, Normal, Gram };

/// Least squares on indicator rows: min (1/n) sum (w_i'z - c_i)^2 + ridge ||z||^2.
/// Automatic picks the width x width normal system when width <= n and the
/// n x n Gram system otherwise; the Gram path never forms Q.
QuadSolution solve_saa(const Dataset& data, double ridge_lambda, SaaPath path = SaaPath::Automatic);

/// h(z) = sum over feature blocks of the largest entry in the block.
double h_value(const Eigen::VectorXd& z, const CategoricalSchema& schema);

/// z'Qz - d'z + 1/4.
double quadratic_risk(const PairwiseMarginals& marg, const Eigen::VectorXd& z);

/// min over z supported on the blocks of `features` of z'Qz - d'z + 1/4.
double restricted_gamma(const PairwiseMarginals& marg, std::span<const std::size_t> features);

/// HGR maximal correlation between X and a binary Y, closed form in terms of
/// the per-configuration harmonic means of P(x, 0) and P(x, 1).
double hgr_binary(const JointDistribution& p);

/// sqrt(1 - gamma / (q0 (1 - q0))) clamped at 0; 0 when q0 is 0 or 1.
double hgr_bound_from_gamma(double gamma, double q0);

struct HgrBound {
  double bound = 0.0;
  bool certified_tight = false;
};

/// Lower bound on the minimum HGR correlation over all joints matching the
/// marginals; tight when the solution is separable.
HgrBound min_hgr_bound(const PairwiseMarginals& marg, const QuadSolution& sol);

}  // namespace renyi
