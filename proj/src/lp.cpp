#include "renyi/lp.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "renyi/error.hpp"

namespace renyi {

const char* to_string(LpStatus status) noexcept {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr double kCostTolerance = 1e-10;
constexpr double kPivotTolerance = 1e-9;
constexpr std::size_t kPivotCap = 200'000;

/// Simplex tableau for min c'x s.t. T x = rhs, x >= 0 with an explicit basis.
/// The reduced-cost row is kept up to date across pivots.
struct Tableau {
  Eigen::MatrixXd T;
  Eigen::VectorXd rhs;
  std::vector<Eigen::Index> basis;
  Eigen::VectorXd reduced;
  double value = 0.0;  // current objective c_B' rhs
  std::size_t pivots = 0;

  Eigen::Index rows() const { return T.rows(); }
  Eigen::Index cols() const { return T.cols(); }

  void price(const Eigen::VectorXd& cost) {
    reduced = cost;
    value = 0.0;
    for (Eigen::Index i = 0; i < rows(); ++i) {
      const double cb = cost[basis[static_cast<std::size_t>(i)]];
      if (cb == 0.0) continue;
      reduced -= cb * T.row(i).transpose();
      value += cb * rhs[i];
    }
  }

  void pivot(Eigen::Index r, Eigen::Index j) {
    const double scale = 1.0 / T(r, j);
    T.row(r) *= scale;
    rhs[r] *= scale;
    T(r, j) = 1.0;
    for (Eigen::Index i = 0; i < rows(); ++i) {
      if (i == r) continue;
      const double f = T(i, j);
      if (f == 0.0) continue;
      T.row(i) -= f * T.row(r);
      rhs[i] -= f * rhs[r];
      T(i, j) = 0.0;
      if (rhs[i] < 0.0 && rhs[i] > -1e-13) rhs[i] = 0.0;
    }
    const double f = reduced[j];
    if (f != 0.0) {
      reduced -= f * T.row(r).transpose();
      value += f * rhs[r];
      reduced[j] = 0.0;
    }
    basis[static_cast<std::size_t>(r)] = j;
    ++pivots;
  }

  /// Bland's rule: lowest-index improving column, lowest-index basic variable
  /// among tied ratios. Columns >= `limit` never enter.
  LpStatus run(Eigen::Index limit) {
    for (;;) {
      Eigen::Index entering = -1;
      for (Eigen::Index j = 0; j < limit; ++j) {
        if (reduced[j] < -kCostTolerance) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return LpStatus::Optimal;
      Eigen::Index leaving = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows(); ++i) {
        const double a = T(i, entering);
        if (a <= kPivotTolerance) continue;
        const double ratio = std::max(rhs[i], 0.0) / a;
        const bool tie = leaving >= 0 && std::abs(ratio - best) <= 1e-12 * (1.0 + best);
        if (ratio < best && !tie) {
          best = ratio;
          leaving = i;
        } else if (tie && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leaving)]) {
          best = std::min(best, ratio);
          leaving = i;
        }
      }
      if (leaving < 0) return LpStatus::Unbounded;
      if (pivots >= kPivotCap) throw Error(ErrorKind::MaxIterationsExceeded, "simplex pivot cap reached");
      pivot(leaving, entering);
    }
  }

  Eigen::VectorXd solution(Eigen::Index n) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < rows(); ++i) {
      const Eigen::Index j = basis[static_cast<std::size_t>(i)];
      if (j < n) x[j] = std::max(rhs[i], 0.0);
    }
    return x;
  }
};

/// Phase one for {x >= 0 : A x = b}. Returns false when infeasible; on success
/// the tableau holds a feasible basis over the original columns only, with
/// redundant rows removed.
bool phase_one(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, Tableau& tab) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  tab.T = Eigen::MatrixXd::Zero(m, n + m);
  tab.rhs = b;
  tab.basis.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    tab.T.row(i).head(n) = sign * A.row(i);
    tab.rhs[i] *= sign;
    tab.T(i, n + i) = 1.0;
    tab.basis[static_cast<std::size_t>(i)] = n + i;
  }
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(n + m);
  cost.tail(m).setOnes();
  tab.price(cost);
  tab.run(n);
  const double scale = 1.0 + (b.size() ? b.lpNorm<Eigen::Infinity>() : 0.0);
  if (tab.value > 1e-9 * scale) return false;

  // Drive artificial variables out of the basis; rows where that is
  // impossible are linear combinations of the others.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basis[static_cast<std::size_t>(i)] < n) {
      keep.push_back(i);
      continue;
    }
    Eigen::Index col = -1;
    double best = kPivotTolerance;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(tab.T(i, j)) > best) {
        best = std::abs(tab.T(i, j));
        col = j;
      }
    }
    if (col >= 0) {
      tab.pivot(i, col);
      keep.push_back(i);
    }
  }
  Tableau reduced;
  const auto kept = static_cast<Eigen::Index>(keep.size());
  reduced.T.resize(kept, n);
  reduced.rhs.resize(kept);
  reduced.basis.resize(keep.size());
  for (Eigen::Index r = 0; r < kept; ++r) {
    const Eigen::Index i = keep[static_cast<std::size_t>(r)];
    reduced.T.row(r) = tab.T.row(i).head(n);
    reduced.rhs[r] = std::max(tab.rhs[i], 0.0);
    reduced.basis[static_cast<std::size_t>(r)] = tab.basis[static_cast<std::size_t>(i)];
  }
  reduced.pivots = tab.pivots;
  tab = std::move(reduced);
  return true;
}

}  // namespace

LpSolution lp_solve(const LpProblem& problem) {
  const Eigen::Index n = problem.objective.size();
  const Eigen::Index n_eq = problem.eq_matrix.rows();
  const Eigen::Index n_le = problem.le_matrix.rows();
  if ((n_eq > 0 && problem.eq_matrix.cols() != n) || problem.eq_rhs.size() != n_eq ||
      (n_le > 0 && problem.le_matrix.cols() != n) || problem.le_rhs.size() != n_le ||
      (problem.upper.size() != 0 && problem.upper.size() != n)) {
    throw Error(ErrorKind::DimensionMismatch, "LP constraint shapes do not match the objective");
  }
  if (static_cast<std::size_t>(n) > kMaxLpVariables) {
    throw Error(ErrorKind::InstanceTooLarge, "LP has more than " + std::to_string(kMaxLpVariables) + " variables");
  }

  std::vector<Eigen::Index> bounded;
  for (Eigen::Index j = 0; j < problem.upper.size(); ++j) {
    if (std::isfinite(problem.upper[j])) bounded.push_back(j);
  }
  const auto n_ub = static_cast<Eigen::Index>(bounded.size());
  const Eigen::Index slacks = n_le + n_ub;
  const Eigen::Index cols = n + slacks;
  const Eigen::Index rows = n_eq + n_le + n_ub;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::VectorXd b(rows);
  if (n_eq > 0) {
    A.topLeftCorner(n_eq, n) = problem.eq_matrix;
    b.head(n_eq) = problem.eq_rhs;
  }
  for (Eigen::Index i = 0; i < n_le; ++i) {
    A.row(n_eq + i).head(n) = problem.le_matrix.row(i);
    A(n_eq + i, n + i) = 1.0;
    b[n_eq + i] = problem.le_rhs[i];
  }
  for (Eigen::Index k = 0; k < n_ub; ++k) {
    const Eigen::Index r = n_eq + n_le + k;
    A(r, bounded[static_cast<std::size_t>(k)]) = 1.0;
    A(r, n + n_le + k) = 1.0;
    b[r] = problem.upper[bounded[static_cast<std::size_t>(k)]];
  }

  LpSolution out;
  Tableau tab;
  if (!phase_one(A, b, tab)) {
    out.status = LpStatus::Infeasible;
    out.pivots = tab.pivots;
    return out;
  }
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols);
  cost.head(n) = problem.maximize ? Eigen::VectorXd(-problem.objective) : problem.objective;
  tab.price(cost);
  out.status = tab.run(cols);
  out.pivots = tab.pivots;
  if (out.status != LpStatus::Optimal) return out;
  out.x = tab.solution(cols).head(n);
  out.objective = problem.objective.dot(out.x);
  return out;
}

struct EqualityPolytope::State {
  Tableau feasible;
  Eigen::VectorXd point;
};

EqualityPolytope::EqualityPolytope(const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
    : state_(std::make_unique<State>()) {
  if (A.rows() != b.size()) throw Error(ErrorKind::DimensionMismatch, "A and b disagree on the number of rows");
  if (static_cast<std::size_t>(A.cols()) > kMaxLpVariables) {
    throw Error(ErrorKind::InstanceTooLarge, "LP has more than " + std::to_string(kMaxLpVariables) + " variables");
  }
  if (!phase_one(A, b, state_->feasible)) throw Error(ErrorKind::Infeasible, "no point satisfies the constraints");
  state_->point = state_->feasible.solution(A.cols());
}

EqualityPolytope::~EqualityPolytope() = default;
EqualityPolytope::EqualityPolytope(EqualityPolytope&&) noexcept = default;
EqualityPolytope& EqualityPolytope::operator=(EqualityPolytope&&) noexcept = default;

std::size_t EqualityPolytope::num_variables() const noexcept {
  return static_cast<std::size_t>(state_->feasible.cols());
}

const Eigen::VectorXd& EqualityPolytope::feasible_point() const noexcept { return state_->point; }

LpSolution EqualityPolytope::maximize(const Eigen::VectorXd& c) const {
  if (c.size() != state_->feasible.cols()) throw Error(ErrorKind::DimensionMismatch, "objective length mismatch");
  Tableau tab = state_->feasible;
  tab.pivots = 0;
  tab.price(-c);
  LpSolution out;
  out.status = tab.run(tab.cols());
  out.pivots = tab.pivots;
  if (out.status != LpStatus::Optimal) return out;
  out.x = tab.solution(tab.cols());
  out.objective = c.dot(out.x);
  return out;
}

}  // namespace renyi
