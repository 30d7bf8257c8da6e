#include "renyi/renyi_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "renyi/error.hpp"

namespace renyi {

namespace {

double residual_tolerance(const Eigen::VectorXd& d) {
  return 1e-8 * (1.0 + (d.size() ? d.lpNorm<Eigen::Infinity>() : 0.0));
}

/// Symmetric PSD solve with the fallback ladder: plain LDLT, LDLT with
/// diagonal jitter, then conjugate gradients. `residual_of(x)` returns the residual
/// that decides whether a candidate is good enough.
template <class Residual>
Eigen::VectorXd solve_psd(const Eigen::MatrixXd& M, const Eigen::VectorXd& rhs, double tol, Residual&& residual_of,
                          SolverStats& stats) {
  const Eigen::Index n = M.rows();
  {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    if (ldlt.info() == Eigen::Success) {
      const auto pivots = ldlt.vectorD().cwiseAbs();
      const double largest = pivots.size() ? pivots.maxCoeff() : 0.0;
      const bool well_posed = largest > 0.0 && pivots.minCoeff() > 1e-13 * largest;
      if (well_posed) {
        Eigen::VectorXd x = ldlt.solve(rhs);
        const double r = residual_of(x);
        if (x.allFinite() && r <= tol) {
          stats = {"ldlt", 1, r};
          return x;
        }
      }
    }
  }

  const double mean_diag = n > 0 ? std::max(M.diagonal().mean(), std::numeric_limits<double>::min()) : 1.0;
  constexpr std::array<double, 3> kJitter{1e-12, 1e-10, 1e-8};
  for (std::size_t step = 0; step < kJitter.size(); ++step) {
    Eigen::MatrixXd shifted = M;
    shifted.diagonal().array() += kJitter[step] * mean_diag;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(shifted);
    if (ldlt.info() != Eigen::Success) continue;
    Eigen::VectorXd x = ldlt.solve(rhs);
    const double r = residual_of(x);
    if (x.allFinite() && r <= tol) {
      stats = {"ldlt+jitter", step + 2, r};
      return x;
    }
  }

  // Conjugate gradients from zero stays in range(M), so on a consistent
  // singular system it converges to the minimum-norm solution.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = rhs;
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  const double stop = 1e-10 * (1.0 + rhs.norm());
  const std::size_t cap = 50 * static_cast<std::size_t>(std::max<Eigen::Index>(n, 1));
  std::size_t it = 0;
  for (; it < cap && std::sqrt(rr) > stop; ++it) {
    const Eigen::VectorXd Mp = M * p;
    const double curvature = p.dot(Mp);
    if (!(curvature > 0.0)) break;
    const double alpha = rr / curvature;
    x += alpha * p;
    r -= alpha * Mp;
    const double rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  const double res = residual_of(x);
  if (x.allFinite() && res <= tol) {
    stats = {"cg", it, res};
    return x;
  }
  throw Error(ErrorKind::SingularSystem, "normal equations could not be solved (residual " + std::to_string(res) + ")");
}

void fill_diagnostics(QuadSolution& sol, const CategoricalSchema& schema) {
  sol.h_plus = h_value(sol.z, schema);
  sol.h_minus = h_value(-sol.z, schema);
  sol.separable = sol.h_plus <= 0.5 + kSeparabilityTolerance && sol.h_minus <= 0.5 + kSeparabilityTolerance;
  sol.hgr_lower_bound = hgr_bound_from_gamma(sol.gamma, sol.q0);
}

void check_ridge(double ridge_lambda) {
  if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda)) {
    throw Error(ErrorKind::InvalidArgument, "ridge must be a finite non-negative number");
  }
}

}  // namespace

double h_value(const Eigen::VectorXd& z, const CategoricalSchema& schema) {
  if (static_cast<std::size_t>(z.size()) != schema.total_width()) {
    throw Error(ErrorKind::LengthMismatch, "vector length " + std::to_string(z.size()) + " does not match width " +
                                               std::to_string(schema.total_width()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < schema.num_features(); ++i) {
    total += z.segment(static_cast<Eigen::Index>(schema.offset(i)), static_cast<Eigen::Index>(schema.cardinality(i)))
                 .maxCoeff();
  }
  return total;
}

double quadratic_risk(const PairwiseMarginals& marg, const Eigen::VectorXd& z) {
  return z.dot(marg.Q * z) - marg.d.dot(z) + 0.25;
}

double hgr_bound_from_gamma(double gamma, double q0) {
  const double var = q0 * (1.0 - q0);
  if (!(var > 0.0)) return 0.0;
  return std::sqrt(std::max(0.0, 1.0 - gamma / var));
}

QuadSolution solve_population(const PairwiseMarginals& marg, double ridge_lambda) {
  check_ridge(ridge_lambda);
  const Eigen::Index width = marg.Q.rows();
  Eigen::MatrixXd M = 2.0 * marg.Q;
  M.diagonal().array() += 2.0 * ridge_lambda;
  const double tol = residual_tolerance(marg.d);

  QuadSolution sol;
  sol.q0 = marg.q0;
  if (width == 0) {
    sol.z = Eigen::VectorXd();
  } else {
    sol.z = solve_psd(M, marg.d, tol, [&](const Eigen::VectorXd& z) { return (M * z - marg.d).lpNorm<Eigen::Infinity>(); },
                      sol.stats);
  }
  sol.gamma = quadratic_risk(marg, sol.z);
  fill_diagnostics(sol, marg.schema);
  return sol;
}

QuadSolution solve_saa(const Dataset& data, double ridge_lambda, SaaPath path) {
  check_ridge(ridge_lambda);
  if (data.size() == 0) throw Error(ErrorKind::EmptyDataset, "no training rows");
  if (!data.has_labels()) throw Error(ErrorKind::InvalidArgument, "training data has no labels");
  const auto& schema = data.schema();
  const std::size_t n = data.size();
  const std::size_t d = schema.num_features();
  const std::size_t width = schema.total_width();
  if (path == SaaPath::Automatic) path = width <= n ? SaaPath::Normal : SaaPath::Gram;

  QuadSolution sol;
  std::size_t zeros = 0;
  for (auto y : data.labels()) zeros += y == 0 ? 1 : 0;
  sol.q0 = static_cast<double>(zeros) / static_cast<double>(n);

  Eigen::VectorXd c(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) c[static_cast<Eigen::Index>(r)] = data.label(r) == 1 ? 0.5 : -0.5;
  for (auto code : data.codes()) {
    if (code == kUnseenCategory) throw Error(ErrorKind::IndexOutOfAlphabet, "unseen category in training data");
  }

  auto predict = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
      auto row = data.row(r);
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += z[static_cast<Eigen::Index>(schema.offset(i) + row[i] - 1)];
      out[static_cast<Eigen::Index>(r)] = s;
    }
    return out;
  };
  auto transpose_apply = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < n; ++r) {
      auto row = data.row(r);
      const double weight = v[static_cast<Eigen::Index>(r)];
      for (std::size_t i = 0; i < d; ++i) z[static_cast<Eigen::Index>(schema.offset(i) + row[i] - 1)] += weight;
    }
    return z;
  };
  const double inv_n = 1.0 / static_cast<double>(n);
  // d = (2/n) W'c; the optimality residual is (2/n) W'(Wz - c) + 2 ridge z.
  const Eigen::VectorXd dvec = 2.0 * inv_n * transpose_apply(c);
  const double tol = residual_tolerance(dvec);
  auto optimality_residual = [&](const Eigen::VectorXd& z) {
    const Eigen::VectorXd grad = 2.0 * inv_n * transpose_apply(predict(z) - c) + 2.0 * ridge_lambda * z;
    return grad.lpNorm<Eigen::Infinity>();
  };

  if (path == SaaPath::Normal) {
    const PairwiseMarginals marg = estimate(data);
    Eigen::MatrixXd M = 2.0 * marg.Q;
    M.diagonal().array() += 2.0 * ridge_lambda;
    sol.z = solve_psd(M, marg.d, tol, optimality_residual, sol.stats);
  } else {
    // Gram system (W W' + n ridge I) beta = c with z = W' beta; (W W')_ab
    // counts the features on which rows a and b agree.
    Eigen::MatrixXd K(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < n; ++a) {
      const Category* ra = data.row(a).data();
      for (std::size_t b = a; b < n; ++b) {
        const Category* rb = data.row(b).data();
        std::size_t agree = 0;
        for (std::size_t i = 0; i < d; ++i) agree += ra[i] == rb[i] ? 1 : 0;
        K(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = static_cast<double>(agree);
        K(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = static_cast<double>(agree);
      }
    }
    K.diagonal().array() += static_cast<double>(n) * ridge_lambda;
    const Eigen::VectorXd beta =
        solve_psd(K, c, tol, [&](const Eigen::VectorXd& b) { return optimality_residual(transpose_apply(b)); },
                  sol.stats);
    sol.z = transpose_apply(beta);
    sol.stats.residual = optimality_residual(sol.z);
  }

  sol.gamma = (predict(sol.z) - c).squaredNorm() * inv_n;
  fill_diagnostics(sol, schema);
  return sol;
}

double restricted_gamma(const PairwiseMarginals& marg, std::span<const std::size_t> features) {
  std::vector<Eigen::Index> columns;
  for (std::size_t i : features) {
    for (std::size_t k = 0; k < marg.schema.cardinality(i); ++k) {
      columns.push_back(static_cast<Eigen::Index>(marg.schema.offset(i) + k));
    }
  }
  if (columns.empty()) return 0.25;
  const auto w = static_cast<Eigen::Index>(columns.size());
  Eigen::MatrixXd M(w, w);
  Eigen::VectorXd rhs(w);
  for (Eigen::Index a = 0; a < w; ++a) {
    rhs[a] = marg.d[columns[static_cast<std::size_t>(a)]];
    for (Eigen::Index b = 0; b < w; ++b) {
      M(a, b) = 2.0 * marg.Q(columns[static_cast<std::size_t>(a)], columns[static_cast<std::size_t>(b)]);
    }
  }
  SolverStats stats;
  const Eigen::VectorXd zs = solve_psd(M, rhs, residual_tolerance(rhs),
                                       [&](const Eigen::VectorXd& z) { return (M * z - rhs).lpNorm<Eigen::Infinity>(); },
                                       stats);
  return 0.5 * zs.dot(M * zs) - rhs.dot(zs) + 0.25;
}

double hgr_binary(const JointDistribution& p) {
  const double q = p.prob_y0();
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::DegeneratePrior, "P(Y=0) = " + std::to_string(q));
  double harmonic = 0.0;
  for (std::size_t c = 0; c < p.num_configurations(); ++c) {
    const double a = p.at(c, 0);
    const double b = p.at(c, 1);
    if (a + b > 0.0) harmonic += a * b / (a + b);
  }
  return std::sqrt(std::max(0.0, 1.0 - harmonic / (q * (1.0 - q))));
}

HgrBound min_hgr_bound(const PairwiseMarginals& marg, const QuadSolution& sol) {
  if (!(marg.q0 > 0.0 && marg.q0 < 1.0)) {
    throw Error(ErrorKind::DegeneratePrior, "P(Y=0) = " + std::to_string(marg.q0));
  }
  return {hgr_bound_from_gamma(sol.gamma, marg.q0), sol.separable};
}

}  // namespace renyi
