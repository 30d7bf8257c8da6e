#include "renyi/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "renyi/error.hpp"
#include "renyi/lp.hpp"

namespace renyi {

double harmonic_term(double a, double b) {
  const double s = a + b;
  return s > 0.0 ? a * b / s : 0.0;
}

double harmonic_sum(const JointDistribution& p) {
  double total = 0.0;
  for (std::size_t c = 0; c < p.num_configurations(); ++c) total += harmonic_term(p.at(c, 0), p.at(c, 1));
  return total;
}

double error_of_rule(const JointDistribution& p, const DecisionRule& rule) {
  if (static_cast<std::size_t>(rule.q_delta.size()) != p.num_configurations()) {
    throw Error(ErrorKind::DimensionMismatch, "rule length does not match the number of configurations");
  }
  double total = 0.0;
  for (std::size_t c = 0; c < p.num_configurations(); ++c) {
    const double q = rule.q_delta[static_cast<Eigen::Index>(c)];
    total += q * p.at(c, 1) + (1.0 - q) * p.at(c, 0);
  }
  return total;
}

namespace {

/// Wraps an LP solution as a joint: rounding-level negatives are zeroed and
/// the vector rescaled to sum exactly to one.
JointDistribution to_joint(const CategoricalSchema& schema, Eigen::VectorXd p) {
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p[k] < 0.0) {
      if (p[k] < -1e-9) throw Error(ErrorKind::InvalidDistribution, "LP solution has a negative probability");
      p[k] = 0.0;
    }
  }
  const double total = p.sum();
  if (!(total > 0.0)) throw Error(ErrorKind::InvalidDistribution, "LP solution has no mass");
  p /= total;
  return JointDistribution(schema, std::move(p));
}

Eigen::MatrixXd dense(const MarginalConstraints& cons) { return Eigen::MatrixXd(cons.A); }

void check_rule(const MarginalConstraints& cons, const DecisionRule& rule) {
  if (static_cast<std::size_t>(rule.q_delta.size()) != cons.num_configurations()) {
    throw Error(ErrorKind::DimensionMismatch, "rule length does not match the number of configurations");
  }
}

// Harmonic-sum objective and its derivatives on the raw outcome vector.

double objective(const Eigen::VectorXd& p) {
  double total = 0.0;
  for (Eigen::Index c = 0; c + 1 < p.size(); c += 2) total += harmonic_term(std::max(p[c], 0.0), std::max(p[c + 1], 0.0));
  return total;
}

/// Gradient of the harmonic sum. Cells flagged in `dead` have a side that is
/// zero on the whole constraint set, so their term is identically zero there
/// and their gradient is taken as zero.
Eigen::VectorXd gradient(const Eigen::VectorXd& p, const std::vector<char>& dead) {
  Eigen::VectorXd g(p.size());
  for (Eigen::Index c = 0; c + 1 < p.size(); c += 2) {
    const double a = std::max(p[c], 0.0);
    const double b = std::max(p[c + 1], 0.0);
    const double s = a + b;
    if (dead[static_cast<std::size_t>(c / 2)]) {
      g[c] = 0.0;
      g[c + 1] = 0.0;
    } else if (s > 0.0) {
      g[c] = (b / s) * (b / s);
      g[c + 1] = (a / s) * (a / s);
    } else {
      // Supergradient on an empty cell.
      g[c] = 0.25;
      g[c + 1] = 0.25;
    }
  }
  return g;
}

/// argmax over [0, t_max] of the concave f(p + t dir), by bisection on the
/// (non-increasing) directional derivative.
double line_search(const Eigen::VectorXd& p, const Eigen::VectorXd& dir, double t_max, const std::vector<char>& dead) {
  auto slope = [&](double t) { return gradient(p + t * dir, dead).dot(dir); };
  if (slope(t_max) >= 0.0) return t_max;
  double lo = 0.0;
  double hi = t_max;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * t_max; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  return lo;
}

struct Atom {
  Eigen::VectorXd x;
  double weight;
};

/// Newton iterations for max f on {q : A q = A p, q_k = 0 off the support of p}.
/// Returns false (p untouched) when no improving step is found.
bool polish_on_face(const Eigen::MatrixXd& A, Eigen::VectorXd& p, const std::vector<char>& dead) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p[k] > 1e-11) support.push_back(k);
  }
  const auto nz = static_cast<Eigen::Index>(support.size());
  if (nz == 0) return false;
  Eigen::MatrixXd Az(A.rows(), nz);
  for (Eigen::Index j = 0; j < nz; ++j) Az.col(j) = A.col(support[static_cast<std::size_t>(j)]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Az, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double cutoff = 1e-10 * (sigma.size() ? sigma[0] : 0.0);
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma[rank] > cutoff) ++rank;
  if (rank >= nz) return false;
  const Eigen::MatrixXd N = svd.matrixV().rightCols(nz - rank);

  Eigen::VectorXd q = p;
  // Anything below the support threshold is taken to be exactly zero.
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    if (q[k] <= 1e-11) q[k] = 0.0;
  }
  // Zeroing the tiny entries moves q off A q = b slightly; project back
  // within the face.
  {
    const Eigen::VectorXd r = A * p - A * q;
    if (r.lpNorm<Eigen::Infinity>() > 0.0) {
      const Eigen::VectorXd fix = svd.solve(r);
      for (Eigen::Index j = 0; j < nz; ++j) q[support[static_cast<std::size_t>(j)]] += fix[j];
      for (Eigen::Index j = 0; j < nz; ++j) {
        if (q[support[static_cast<std::size_t>(j)]] < 0.0) return false;
      }
    }
  }

  bool improved = false;
  double value = objective(q);
  for (int it = 0; it < 50; ++it) {
    const Eigen::VectorXd g = gradient(q, dead);
    Eigen::VectorXd gz(nz);
    Eigen::MatrixXd Hz = Eigen::MatrixXd::Zero(nz, nz);
    for (Eigen::Index j = 0; j < nz; ++j) gz[j] = g[support[static_cast<std::size_t>(j)]];
    // Per cell, the Hessian is -(2 / s^3) [b, -a][b, -a]'.
    for (Eigen::Index j = 0; j < nz; ++j) {
      const Eigen::Index k = support[static_cast<std::size_t>(j)];
      const Eigen::Index cell = k / 2;
      if (dead[static_cast<std::size_t>(cell)]) continue;
      const double a = q[2 * cell];
      const double b = q[2 * cell + 1];
      const double s = a + b;
      const double scale = -2.0 / (s * s * s);
      const double vk = (k % 2 == 0) ? b : -a;
      for (Eigen::Index i = 0; i < nz; ++i) {
        const Eigen::Index l = support[static_cast<std::size_t>(i)];
        if (l / 2 != cell) continue;
        const double vl = (l % 2 == 0) ? b : -a;
        Hz(j, i) = scale * vk * vl;
      }
    }
    const Eigen::VectorXd gr = N.transpose() * gz;
    if (gr.lpNorm<Eigen::Infinity>() <= 1e-15) break;
    const Eigen::MatrixXd negH = -(N.transpose() * Hz * N);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(negH);
    const auto& lambdas = eig.eigenvalues();
    const double top = lambdas.size() ? std::max(lambdas.maxCoeff(), 0.0) : 0.0;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(N.cols());
    for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
      if (lambdas[i] > 1e-12 * top && lambdas[i] > 0.0) {
        const auto u = eig.eigenvectors().col(i);
        w += (u.dot(gr) / lambdas[i]) * u;
      }
    }
    const Eigen::VectorXd step_z = N * w;
    if (step_z.lpNorm<Eigen::Infinity>() == 0.0) break;
    double t_max = 1.0;
    for (Eigen::Index j = 0; j < nz; ++j) {
      if (step_z[j] < 0.0) t_max = std::min(t_max, q[support[static_cast<std::size_t>(j)]] / -step_z[j]);
    }
    double t = t_max < 1.0 ? 0.5 * t_max : 1.0;
    bool accepted = false;
    for (int back = 0; back < 40; ++back, t *= 0.5) {
      Eigen::VectorXd trial = q;
      for (Eigen::Index j = 0; j < nz; ++j) trial[support[static_cast<std::size_t>(j)]] += t * step_z[j];
      const double trial_value = objective(trial);
      if (trial_value > value) {
        q = std::move(trial);
        value = trial_value;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    improved = true;
  }
  if (improved && value > objective(p)) {
    p = q;
    return true;
  }
  return false;
}

/// Log-barrier path following for max f on the constraint set, started from
/// a point whose `free` coordinates are all positive. Coordinates outside
/// `free` vanish on the whole set and stay at zero. At a centred point the
/// Frank-Wolfe gap is at most (number of free coordinates) * mu, so mu is
/// cut until the gap, measured with `lmo`, drops below tol.
template <class Lmo>
bool barrier_ascent(const Eigen::MatrixXd& A, Eigen::VectorXd& p, const std::vector<char>& free,
                    const std::vector<char>& dead, double tol, const Lmo& lmo, double& gap, std::size_t& steps) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (free[static_cast<std::size_t>(k)]) idx.push_back(k);
    else p[k] = 0.0;
  }
  const auto nf = static_cast<Eigen::Index>(idx.size());
  if (nf == 0) return false;
  Eigen::MatrixXd Af(A.rows(), nf);
  for (Eigen::Index j = 0; j < nf; ++j) Af.col(j) = A.col(idx[static_cast<std::size_t>(j)]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Af, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double cutoff = 1e-10 * (sigma.size() ? sigma[0] : 0.0);
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma[rank] > cutoff) ++rank;
  const Eigen::MatrixXd N = svd.matrixV().rightCols(nf - rank);

  auto value = [&](const Eigen::VectorXd& q, double mu) {
    double v = objective(q);
    for (Eigen::Index k : idx) v += mu * std::log(q[k]);
    return v;
  };

  for (double mu = 1e-3; mu >= 1e-18; mu *= 0.1) {
    for (int it = 0; it < 200 && N.cols() > 0; ++it) {
      const Eigen::VectorXd g = gradient(p, dead);
      Eigen::VectorXd gf(nf);
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nf, nf);
      for (Eigen::Index j = 0; j < nf; ++j) {
        const Eigen::Index k = idx[static_cast<std::size_t>(j)];
        gf[j] = g[k] + mu / p[k];
        H(j, j) = mu / (p[k] * p[k]);
      }
      // Per live cell the harmonic term contributes (2 / s^3) [b, -a][b, -a]'
      // to the negated Hessian.
      for (Eigen::Index j = 0; j + 1 < nf; ++j) {
        const Eigen::Index k = idx[static_cast<std::size_t>(j)];
        if (k % 2 != 0 || idx[static_cast<std::size_t>(j + 1)] != k + 1 || dead[static_cast<std::size_t>(k / 2)]) continue;
        const double a = p[k];
        const double b = p[k + 1];
        const double scale = 2.0 / ((a + b) * (a + b) * (a + b));
        H(j, j) += scale * b * b;
        H(j + 1, j + 1) += scale * a * a;
        H(j, j + 1) -= scale * a * b;
        H(j + 1, j) -= scale * a * b;
      }
      const Eigen::VectorXd gr = N.transpose() * gf;
      const Eigen::MatrixXd M = N.transpose() * H * N;
      const Eigen::VectorXd dw = M.ldlt().solve(gr);
      const double decrement = gr.dot(dw);
      if (!(decrement > 1e-16)) break;
      const Eigen::VectorXd dz = N * dw;
      double t = 1.0;
      for (Eigen::Index j = 0; j < nf; ++j) {
        if (dz[j] < 0.0) t = std::min(t, 0.99 * p[idx[static_cast<std::size_t>(j)]] / -dz[j]);
      }
      const double current = value(p, mu);
      bool moved = false;
      for (int back = 0; back < 60; ++back, t *= 0.5) {
        Eigen::VectorXd trial = p;
        for (Eigen::Index j = 0; j < nf; ++j) trial[idx[static_cast<std::size_t>(j)]] += t * dz[j];
        if (value(trial, mu) >= current + 0.25 * t * decrement) {
          p = std::move(trial);
          moved = true;
          break;
        }
      }
      ++steps;
      if (!moved) break;
    }
    const Eigen::VectorXd g = gradient(p, dead);
    gap = g.dot(lmo(g) - p);
    if (gap <= tol) return true;
  }
  return false;
}

/// Uniform [0, 1) from the top 53 bits, so draws do not depend on the
/// standard library's distribution implementations.
double next_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double next_exponential(std::mt19937_64& rng) { return -std::log1p(-next_uniform(rng)); }

Eigen::VectorXd dirichlet_ones(std::mt19937_64& rng, std::size_t k) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = next_exponential(rng);
  return v / v.sum();
}

}  // namespace

JointDistribution feasible_point(const MarginalConstraints& cons) {
  const EqualityPolytope polytope(dense(cons), cons.b);
  return to_joint(cons.schema, polytope.feasible_point());
}

double restricted_worst_case_error(const MarginalConstraints& cons, std::span<const std::size_t> features) {
  const std::size_t configs = cons.num_configurations();
  const auto& schema = cons.schema;
  std::vector<std::size_t> cards;
  for (std::size_t i : features) {
    if (i >= schema.num_features()) throw Error(ErrorKind::InvalidArgument, "feature index out of range");
    cards.push_back(schema.cardinality(i));
  }
  const ConfigurationIndexer full(schema.cardinalities());
  const ConfigurationIndexer sub(cards);
  const std::size_t groups = sub.size();
  const auto n_p = static_cast<Eigen::Index>(2 * configs);
  const auto n_t = static_cast<Eigen::Index>(groups);

  LpProblem lp;
  lp.maximize = true;
  lp.objective = Eigen::VectorXd::Zero(n_p + n_t);
  lp.objective.tail(n_t).setOnes();
  const Eigen::MatrixXd A = dense(cons);
  lp.eq_matrix = Eigen::MatrixXd::Zero(A.rows(), n_p + n_t);
  lp.eq_matrix.leftCols(n_p) = A;
  lp.eq_rhs = cons.b;
  // t_g <= P(group g, Y = y) for y = 0, 1.
  lp.le_matrix = Eigen::MatrixXd::Zero(2 * n_t, n_p + n_t);
  lp.le_rhs = Eigen::VectorXd::Zero(2 * n_t);
  std::vector<Category> digits(features.size());
  for (std::size_t c = 0; c < configs; ++c) {
    for (std::size_t k = 0; k < features.size(); ++k) digits[k] = full.digit(c, features[k]);
    const auto g = static_cast<Eigen::Index>(sub.index_of(digits));
    for (int y = 0; y < 2; ++y) lp.le_matrix(2 * g + y, static_cast<Eigen::Index>(2 * c) + y) = -1.0;
  }
  for (Eigen::Index g = 0; g < n_t; ++g) {
    lp.le_matrix(2 * g, n_p + g) = 1.0;
    lp.le_matrix(2 * g + 1, n_p + g) = 1.0;
  }
  const LpSolution sol = lp_solve(lp);
  if (sol.status == LpStatus::Infeasible) throw Error(ErrorKind::Infeasible, "no joint matches the marginals");
  if (sol.status != LpStatus::Optimal) throw Error(ErrorKind::SingularSystem, "worst-case LP is unbounded");
  return sol.objective;
}

EstarResult solve_estar(const MarginalConstraints& cons) {
  const std::size_t configs = cons.num_configurations();
  const auto n_p = static_cast<Eigen::Index>(2 * configs);
  const auto n_t = static_cast<Eigen::Index>(configs);
  LpProblem lp;
  lp.maximize = true;
  lp.objective = Eigen::VectorXd::Zero(n_p + n_t);
  lp.objective.tail(n_t).setOnes();
  const Eigen::MatrixXd A = dense(cons);
  lp.eq_matrix = Eigen::MatrixXd::Zero(A.rows(), n_p + n_t);
  lp.eq_matrix.leftCols(n_p) = A;
  lp.eq_rhs = cons.b;
  lp.le_matrix = Eigen::MatrixXd::Zero(2 * n_t, n_p + n_t);
  lp.le_rhs = Eigen::VectorXd::Zero(2 * n_t);
  for (Eigen::Index c = 0; c < n_t; ++c) {
    for (int y = 0; y < 2; ++y) {
      lp.le_matrix(2 * c + y, 2 * c + y) = -1.0;
      lp.le_matrix(2 * c + y, n_p + c) = 1.0;
    }
  }
  const LpSolution sol = lp_solve(lp);
  if (sol.status == LpStatus::Infeasible) throw Error(ErrorKind::Infeasible, "no joint matches the marginals");
  if (sol.status != LpStatus::Optimal) throw Error(ErrorKind::SingularSystem, "e* LP is unbounded");
  EstarResult out;
  out.e_star = sol.objective;
  out.p_star = to_joint(cons.schema, sol.x.head(n_p));
  return out;
}

double worst_case_error(const MarginalConstraints& cons, const DecisionRule& rule) {
  check_rule(cons, rule);
  const EqualityPolytope polytope(dense(cons), cons.b);
  Eigen::VectorXd c(static_cast<Eigen::Index>(2 * cons.num_configurations()));
  for (Eigen::Index x = 0; x < rule.q_delta.size(); ++x) {
    c[2 * x] = 1.0 - rule.q_delta[x];
    c[2 * x + 1] = rule.q_delta[x];
  }
  const LpSolution sol = polytope.maximize(c);
  if (sol.status != LpStatus::Optimal) throw Error(ErrorKind::SingularSystem, "worst-case LP is unbounded");
  return sol.objective;
}

ThetaResult solve_theta(const MarginalConstraints& cons, const ThetaOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "Frank-Wolfe tolerance must be positive");
  const Eigen::MatrixXd A = dense(cons);
  const EqualityPolytope polytope(A, cons.b);
  auto lmo = [&](const Eigen::VectorXd& g) {
    LpSolution s = polytope.maximize(g);
    if (s.status != LpStatus::Optimal) throw Error(ErrorKind::SingularSystem, "linear subproblem is unbounded");
    return s.x;
  };

  // Maximising each coordinate in turn finds the coordinates that vanish on
  // the whole set; the average of those vertices is a relative-interior
  // starting point.
  const auto n = static_cast<Eigen::Index>(polytope.num_variables());
  const std::size_t cells = static_cast<std::size_t>(n / 2);
  std::vector<char> dead(cells, 0);
  std::vector<char> free(static_cast<std::size_t>(n), 1);
  std::vector<Atom> active;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::VectorXd v = lmo(Eigen::VectorXd::Unit(n, k));
    if (v[k] <= 1e-12) {
      dead[static_cast<std::size_t>(k / 2)] = 1;
      free[static_cast<std::size_t>(k)] = 0;
    }
    const bool known = std::any_of(active.begin(), active.end(),
                                   [&](const Atom& a) { return (a.x - v).lpNorm<Eigen::Infinity>() <= 1e-13; });
    if (!known) active.push_back({v, 0.0});
  }
  for (auto& a : active) a.weight = 1.0 / static_cast<double>(active.size());
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  for (const auto& a : active) p += a.weight * a.x;
  const Eigen::VectorXd interior = p;

  // Any point of {g >= 0 : sqrt(g_a) + sqrt(g_b) >= 1} is a supergradient of
  // the harmonic term at an empty cell. The default (1/4, 1/4) can leave a
  // positive gap at the optimum, so when the iterate has empty cells the
  // certificate is retried with the choice that is tight for the LP vertex.
  auto certified_gap = [&](Eigen::VectorXd g, Eigen::VectorXd s, double gap) {
    for (int round = 0; round < 8 && gap > opts.tol; ++round) {
      bool changed = false;
      for (std::size_t c = 0; c < cells; ++c) {
        const auto i = static_cast<Eigen::Index>(2 * c);
        if (dead[c] || p[i] + p[i + 1] > 0.0) continue;
        const double mass = s[i] + s[i + 1];
        if (mass <= 0.0) continue;
        g[i] = (s[i + 1] / mass) * (s[i + 1] / mass);
        g[i + 1] = (s[i] / mass) * (s[i] / mass);
        changed = true;
      }
      if (!changed) break;
      s = lmo(g);
      gap = std::min(gap, g.dot(s - p));
    }
    return gap;
  };

  ThetaResult out;
  double gap = std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  for (;; ++k) {
    const Eigen::VectorXd g = gradient(p, dead);
    const Eigen::VectorXd s = lmo(g);
    gap = g.dot(s - p);
    if (gap > opts.tol) gap = certified_gap(g, s, gap);
    if (opts.record_trace) out.objective_trace.push_back(objective(p));
    if (gap <= opts.tol || k >= opts.max_iter) break;

    if (!opts.line_search) {
      const double t = 2.0 / (static_cast<double>(k) + 2.0);
      p += t * (s - p);
      continue;
    }

    // Away-step variant: move away from the worst active vertex when that
    // promises more than the Frank-Wolfe direction.
    std::size_t away = 0;
    for (std::size_t i = 1; i < active.size(); ++i) {
      if (g.dot(active[i].x) < g.dot(active[away].x)) away = i;
    }
    const double away_gap = g.dot(p - active[away].x);
    if (gap >= away_gap || active.size() == 1) {
      const Eigen::VectorXd dir = s - p;
      const double t = line_search(p, dir, 1.0, dead);
      if (t >= 1.0) {
        active.assign(1, Atom{s, 1.0});
      } else {
        for (auto& a : active) a.weight *= 1.0 - t;
        auto it = std::find_if(active.begin(), active.end(),
                               [&](const Atom& a) { return (a.x - s).lpNorm<Eigen::Infinity>() <= 1e-13; });
        if (it != active.end()) it->weight += t;
        else active.push_back({s, t});
      }
    } else {
      const double alpha = active[away].weight;
      const double t_max = alpha / (1.0 - alpha);
      const Eigen::VectorXd dir = p - active[away].x;
      const double t = line_search(p, dir, t_max, dead);
      for (auto& a : active) a.weight *= 1.0 + t;
      if (t >= t_max * (1.0 - 1e-12)) active.erase(active.begin() + static_cast<std::ptrdiff_t>(away));
      else active[away].weight -= t;
    }
    // Atoms whose weight has decayed to rounding level only produce
    // vanishing away steps; drop them.
    active.erase(std::remove_if(active.begin(), active.end(), [](const Atom& a) { return a.weight < 1e-14; }),
                 active.end());
    // Rebuild the iterate from the atoms so it stays on the polytope.
    double total = 0.0;
    for (const auto& a : active) total += a.weight;
    p.setZero();
    for (auto& a : active) {
      a.weight /= total;
      p += a.weight * a.x;
    }
  }
  // Near-empty cells make the curvature of the harmonic sum unbounded and
  // Frank-Wolfe can stall there; finish from the relative interior instead.
  if (gap > opts.tol && opts.barrier_fallback) {
    Eigen::VectorXd q = 0.9 * p + 0.1 * interior;
    double barrier_gap = gap;
    if (barrier_ascent(A, q, free, dead, opts.tol, lmo, barrier_gap, k) || barrier_gap < gap) {
      p = q;
      gap = barrier_gap;
    }
  }
  if (gap > opts.tol) {
    throw Error(ErrorKind::MaxIterationsExceeded,
                "Frank-Wolfe gap " + std::to_string(gap) + " above tolerance after " + std::to_string(k) + " iterations");
  }

  if (opts.polish) {
    Eigen::VectorXd q = p;
    if (polish_on_face(A, q, dead)) {
      const Eigen::VectorXd g = gradient(q, dead);
      const Eigen::VectorXd s = lmo(g);
      const double polished_gap = g.dot(s - q);
      if (polished_gap <= std::max(gap, opts.tol)) {
        p = q;
        gap = polished_gap;
        out.polished = true;
        if (opts.record_trace) out.objective_trace.push_back(objective(p));
      }
    }
  }

  out.iterations = k;
  out.gap = std::max(gap, 0.0);
  out.p_tilde = to_joint(cons.schema, p);
  out.theta = harmonic_sum(out.p_tilde);
  return out;
}

double hgr_bruteforce(const JointDistribution& p) {
  const double py0 = p.prob_y0();
  const double py1 = 1.0 - py0;
  if (!(py0 > 0.0 && py1 > 0.0)) throw Error(ErrorKind::DegeneratePrior, "P(Y = 0) must lie strictly inside (0, 1)");
  Eigen::Matrix2d BtB = Eigen::Matrix2d::Zero();
  const double sy[2] = {std::sqrt(py0), std::sqrt(py1)};
  for (std::size_t c = 0; c < p.num_configurations(); ++c) {
    const double px = p.at(c, 0) + p.at(c, 1);
    if (px <= 0.0) continue;
    Eigen::Vector2d row(p.at(c, 0) / (std::sqrt(px) * sy[0]), p.at(c, 1) / (std::sqrt(px) * sy[1]));
    BtB += row * row.transpose();
  }
  // Eigenvalues are 1 (constant functions) and rho^2.
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(BtB, Eigen::EigenvaluesOnly);
  return std::sqrt(std::clamp(eig.eigenvalues()[0], 0.0, 1.0));
}

DecisionRule map_rule_of(const JointDistribution& p) {
  const double q0 = p.prob_y0();
  const double tie = q0 >= 1.0 - q0 ? 1.0 : 0.0;
  DecisionRule rule;
  rule.q_delta.resize(static_cast<Eigen::Index>(p.num_configurations()));
  for (std::size_t c = 0; c < p.num_configurations(); ++c) {
    const double a = p.at(c, 0);
    const double b = p.at(c, 1);
    rule.q_delta[static_cast<Eigen::Index>(c)] = a > b ? 1.0 : (a < b ? 0.0 : tie);
  }
  return rule;
}

DecisionRule renyi_rule_of(const JointDistribution& p) {
  DecisionRule rule;
  rule.q_delta.resize(static_cast<Eigen::Index>(p.num_configurations()));
  for (std::size_t c = 0; c < p.num_configurations(); ++c) {
    const double a = p.at(c, 0) * p.at(c, 0);
    const double b = p.at(c, 1) * p.at(c, 1);
    rule.q_delta[static_cast<Eigen::Index>(c)] = a + b > 0.0 ? a / (a + b) : 0.5;
  }
  return rule;
}

InstanceMode parse_instance_mode(const std::string& name) {
  if (name == "generic") return InstanceMode::Generic;
  if (name == "separable") return InstanceMode::Separable;
  if (name == "deterministic") return InstanceMode::Deterministic;
  throw Error(ErrorKind::InvalidArgument, "unknown instance mode '" + name + "'");
}

const char* to_string(InstanceMode mode) noexcept {
  switch (mode) {
    case InstanceMode::Generic: return "generic";
    case InstanceMode::Separable: return "separable";
    case InstanceMode::Deterministic: return "deterministic";
  }
  return "unknown";
}

JointDistribution random_instance(std::uint64_t seed, std::size_t d, std::size_t m, InstanceMode mode) {
  if (d > kMaxInstanceFeatures || m > kMaxInstanceCardinality) {
    throw Error(ErrorKind::InstanceTooLarge, "random instances are limited to d <= 3 and m <= 3");
  }
  if (d == 0 || m == 0) throw Error(ErrorKind::InvalidArgument, "random instances need d >= 1 and m >= 1");
  const CategoricalSchema schema = CategoricalSchema::uniform(d, m);
  const ConfigurationIndexer indexer(schema.cardinalities());
  const std::size_t configs = indexer.size();
  std::mt19937_64 rng(seed);
  Eigen::VectorXd p(static_cast<Eigen::Index>(2 * configs));

  switch (mode) {
    case InstanceMode::Generic:
      p = dirichlet_ones(rng, 2 * configs);
      break;
    case InstanceMode::Separable: {
      // Mixing with the uniform keeps every configuration's mass away from 0.
      const Eigen::VectorXd px =
          0.5 * dirichlet_ones(rng, configs) + Eigen::VectorXd::Constant(static_cast<Eigen::Index>(configs), 0.5 / configs);
      std::vector<std::vector<double>> tables(d, std::vector<double>(m));
      for (auto& t : tables) {
        for (auto& v : t) v = next_uniform(rng);
      }
      const double lo = 0.05 + 0.25 * next_uniform(rng);
      const double hi = 0.70 + 0.25 * next_uniform(rng);
      std::vector<double> score(configs, 0.0);
      for (std::size_t c = 0; c < configs; ++c) {
        for (std::size_t i = 0; i < d; ++i) score[c] += tables[i][indexer.digit(c, i) - 1];
      }
      const auto [smin, smax] = std::minmax_element(score.begin(), score.end());
      const double span = *smax - *smin;
      for (std::size_t c = 0; c < configs; ++c) {
        const double eta = span > 0.0 ? lo + (hi - lo) * (score[c] - *smin) / span : 0.5 * (lo + hi);
        const auto k = static_cast<Eigen::Index>(c);
        p[2 * k] = px[k] * (1.0 - eta);
        p[2 * k + 1] = px[k] * eta;
      }
      break;
    }
    case InstanceMode::Deterministic: {
      const Eigen::VectorXd px = dirichlet_ones(rng, configs);
      for (std::size_t c = 0; c < configs; ++c) {
        const auto k = static_cast<Eigen::Index>(c);
        const bool one = indexer.digit(c, 0) == 1;
        p[2 * k] = one ? 0.0 : px[k];
        p[2 * k + 1] = one ? px[k] : 0.0;
      }
      break;
    }
  }
  p /= p.sum();
  return JointDistribution(schema, std::move(p));
}

std::vector<JointDistribution> sample_feasible(const MarginalConstraints& cons, std::size_t count, std::uint64_t seed) {
  const EqualityPolytope polytope(dense(cons), cons.b);
  std::mt19937_64 rng(seed);
  const auto n = static_cast<Eigen::Index>(polytope.num_variables());
  Eigen::VectorXd current = polytope.feasible_point();
  std::vector<JointDistribution> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    Eigen::VectorXd c(n);
    for (Eigen::Index k = 0; k < n; ++k) c[k] = 2.0 * next_uniform(rng) - 1.0;
    const LpSolution vertex = polytope.maximize(c);
    if (vertex.status != LpStatus::Optimal) throw Error(ErrorKind::SingularSystem, "sampling LP is unbounded");
    const double w = next_uniform(rng);
    current = w * vertex.x + (1.0 - w) * current;
    out.push_back(to_joint(cons.schema, current));
  }
  return out;
}

}  // namespace renyi
