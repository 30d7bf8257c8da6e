#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "renyi/joint.hpp"
#include "renyi/marginals.hpp"

namespace renyi {

/// ab / (a + b), with 0 at a = b = 0.
double harmonic_term(double a, double b);

/// sum over configurations of harmonic_term(p(x,0), p(x,1)).
double harmonic_sum(const JointDistribution& p);

/// Error of a randomised rule under p: sum_x q(x) p(x,1) + (1 - q(x)) p(x,0).
double error_of_rule(const JointDistribution& p, const DecisionRule& rule);

/// Some member of the constraint set (a vertex); Error(Infeasible) if empty.
JointDistribution feasible_point(const MarginalConstraints& cons);

struct EstarResult {
  double e_star = 0.0;
  JointDistribution p_star;
};

/// Minimax error over the constraint set: max of sum_x min(p(x,0), p(x,1)).
EstarResult solve_estar(const MarginalConstraints& cons);

/// Minimax error of rules that only look at `features`, against every joint
/// in the (full) constraint set. All features gives solve_estar.
double restricted_worst_case_error(const MarginalConstraints& cons, std::span<const std::size_t> features);

struct ThetaOptions {
  double tol = 1e-7;  // Frank-Wolfe duality gap at termination
  std::size_t max_iter = 5'000;  // Frank-Wolfe iterations before the fallback
  /// Log-barrier Newton continuation when Frank-Wolfe has not reached tol.
  bool barrier_fallback = true;
  bool line_search = true;  // exact; otherwise the 2/(k+2) schedule
  /// Newton steps on the face of the support once the gap is below tol.
  bool polish = true;
  bool record_trace = false;
};

struct ThetaResult {
  double theta = 0.0;
  JointDistribution p_tilde;
  double gap = 0.0;
  std::size_t iterations = 0;
  bool polished = false;
  std::vector<double> objective_trace;
};

/// Maximises the harmonic sum over the constraint set. Throws
/// MaxIterationsExceeded when the gap is still above tol after max_iter
/// Frank-Wolfe steps and the barrier fallback (if enabled).
ThetaResult solve_theta(const MarginalConstraints& cons, const ThetaOptions& opts = {});

/// Largest error of `rule` over the constraint set.
double worst_case_error(const MarginalConstraints& cons, const DecisionRule& rule);

/// Second singular value of p(x,y) / sqrt(p_X(x) p_Y(y)).
double hgr_bruteforce(const JointDistribution& p);

/// 1 where p(x,0) > p(x,1), 0 where smaller; ties go to the label with the
/// larger prior, 0 when the priors are equal (same as the classifier).
DecisionRule map_rule_of(const JointDistribution& p);

/// p(x,0)^2 / (p(x,0)^2 + p(x,1)^2), 1/2 on empty cells.
DecisionRule renyi_rule_of(const JointDistribution& p);

enum class InstanceMode { Generic, Separable, Deterministic };

InstanceMode parse_instance_mode(const std::string& name);
const char* to_string(InstanceMode mode) noexcept;

inline constexpr std::size_t kMaxInstanceFeatures = 3;
inline constexpr std::size_t kMaxInstanceCardinality = 3;

/// Random joint over d features with m categories each.
///   Generic: Dirichlet(1) over all outcomes.
///   Separable: P(Y=1 | x) affine in a random additive score, kept inside (0, 1).
///   Deterministic: Y = 1{x_1 = 1}.
JointDistribution random_instance(std::uint64_t seed, std::size_t d, std::size_t m, InstanceMode mode);

/// Feasible joints spread over the constraint set: LP vertices for random
/// objectives, convexly mixed with the running point.
std::vector<JointDistribution> sample_feasible(const MarginalConstraints& cons, std::size_t count, std::uint64_t seed);

}  // namespace renyi
