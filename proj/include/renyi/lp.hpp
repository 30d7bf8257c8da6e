#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>

namespace renyi {

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus status) noexcept;

/// Dense linear program over x >= 0:
///   optimise objective'x  s.t.  eq_matrix x = eq_rhs,  le_matrix x <= le_rhs,  x <= upper.
/// Empty matrices mean "no such constraints"; `upper` is empty or holds one
/// bound per variable (+inf for none).
struct LpProblem {
  Eigen::VectorXd objective;
  bool maximize = false;
  Eigen::MatrixXd eq_matrix;
  Eigen::VectorXd eq_rhs;
  Eigen::MatrixXd le_matrix;
  Eigen::VectorXd le_rhs;
  Eigen::VectorXd upper;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

inline constexpr std::size_t kMaxLpVariables = 10'000;

/// Two-phase dense simplex with Bland's rule.
LpSolution lp_solve(const LpProblem& problem);

/// {x >= 0 : A x = b} with phase one done once; every maximize() call runs
/// phase two from the stored feasible basis, so repeated linear maximisation
/// over the same polytope (Frank-Wolfe subproblems) skips phase one.
class EqualityPolytope {
 public:
  /// Throws Error(Infeasible) when the set is empty.
  EqualityPolytope(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);
  ~EqualityPolytope();
  EqualityPolytope(EqualityPolytope&&) noexcept;
  EqualityPolytope& operator=(EqualityPolytope&&) noexcept;

  std::size_t num_variables() const noexcept;
  /// The basic feasible solution found by phase one (a vertex).
  const Eigen::VectorXd& feasible_point() const noexcept;
  /// A vertex maximising c'x; status Unbounded if there is none.
  LpSolution maximize(const Eigen::VectorXd& c) const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace renyi
