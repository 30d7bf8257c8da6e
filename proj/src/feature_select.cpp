#include "renyi/feature_select.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>

#include "renyi/error.hpp"

namespace renyi {

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "l1 ball radius must be positive");
  if (v.lpNorm<1>() <= radius) return v;
  std::vector<double> mags(static_cast<std::size_t>(v.size()));
  for (Eigen::Index k = 0; k < v.size(); ++k) mags[static_cast<std::size_t>(k)] = std::abs(v[k]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  // Largest rho with mags[rho] > (sum of the top rho+1 magnitudes - radius) / (rho+1).
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumulative += mags[j];
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (mags[j] > candidate) theta = candidate;
  }
  theta = std::max(theta, 0.0);
  Eigen::VectorXd out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double shrunk = std::max(std::abs(v[k]) - theta, 0.0);
    out[k] = v[k] < 0.0 ? -shrunk : shrunk;
  }
  return out;
}

Eigen::VectorXd prox_linf(const Eigen::VectorXd& v, double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "prox parameter must be positive");
  return v - project_l1_ball(v, t);
}

double group_linf_norm(const Eigen::VectorXd& z, const CategoricalSchema& schema) {
  double total = 0.0;
  for (std::size_t i = 0; i < schema.num_features(); ++i) {
    const auto block = z.segment(static_cast<Eigen::Index>(schema.offset(i)),
                                 static_cast<Eigen::Index>(schema.cardinality(i)));
    total += block.lpNorm<Eigen::Infinity>();
  }
  return total;
}

double selection_objective(const PairwiseMarginals& marg, const Eigen::VectorXd& z, double lambda) {
  return z.dot(marg.Q * z) - marg.d.dot(z) + lambda * group_linf_norm(z, marg.schema);
}

namespace {

/// The smooth part z'Qz - d'z and solves with (2Q + rho I).
class SmoothTerm {
 public:
  virtual ~SmoothTerm() = default;
  virtual double value(const Eigen::VectorXd& z) const = 0;
  virtual void factor(double rho) = 0;
  virtual Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const = 0;
  virtual const Eigen::VectorXd& linear() const = 0;
};

class DenseTerm final : public SmoothTerm {
 public:
  explicit DenseTerm(const PairwiseMarginals& marg) : marg_(marg) {}
  double value(const Eigen::VectorXd& z) const override { return z.dot(marg_.Q * z) - marg_.d.dot(z); }
  void factor(double rho) override {
    Eigen::MatrixXd M = 2.0 * marg_.Q;
    M.diagonal().array() += rho;
    llt_.compute(M);
    if (llt_.info() != Eigen::Success) throw Error(ErrorKind::SingularSystem, "2Q + rho I is not positive definite");
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override { return llt_.solve(rhs); }
  const Eigen::VectorXd& linear() const override { return marg_.d; }

 private:
  const PairwiseMarginals& marg_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Q = W'W / n from the indicator rows. (2Q + rho I)^-1 r is
/// (r - W' (rho n / 2 I + W W')^-1 W r) / rho.
class SampleTerm final : public SmoothTerm {
 public:
  explicit SampleTerm(const Dataset& data) : data_(data), n_(data.size()) {
    const auto& schema = data.schema();
    width_ = static_cast<Eigen::Index>(schema.total_width());
    const auto nn = static_cast<Eigen::Index>(n_);
    Eigen::VectorXd c(nn);
    for (std::size_t r = 0; r < n_; ++r) c[static_cast<Eigen::Index>(r)] = data.label(r) == 1 ? 0.5 : -0.5;
    d_ = (2.0 / static_cast<double>(n_)) * transpose_apply(c);
    gram_.resize(nn, nn);
    const std::size_t features = schema.num_features();
    for (std::size_t a = 0; a < n_; ++a) {
      const Category* ra = data.row(a).data();
      for (std::size_t b = a; b < n_; ++b) {
        const Category* rb = data.row(b).data();
        std::size_t agree = 0;
        for (std::size_t i = 0; i < features; ++i) agree += ra[i] == rb[i] ? 1 : 0;
        gram_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = static_cast<double>(agree);
        gram_(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = static_cast<double>(agree);
      }
    }
  }
  double value(const Eigen::VectorXd& z) const override {
    return apply(z).squaredNorm() / static_cast<double>(n_) - d_.dot(z);
  }
  void factor(double rho) override {
    rho_ = rho;
    Eigen::MatrixXd M = gram_;
    M.diagonal().array() += rho * static_cast<double>(n_) / 2.0;
    llt_.compute(M);
    if (llt_.info() != Eigen::Success) throw Error(ErrorKind::SingularSystem, "Gram system is not positive definite");
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override {
    return (rhs - transpose_apply(llt_.solve(apply(rhs)))) / rho_;
  }
  const Eigen::VectorXd& linear() const override { return d_; }

 private:
  Eigen::VectorXd apply(const Eigen::VectorXd& z) const {
    const auto& schema = data_.schema();
    Eigen::VectorXd out(static_cast<Eigen::Index>(n_));
    for (std::size_t r = 0; r < n_; ++r) {
      const auto row = data_.row(r);
      double s = 0.0;
      for (std::size_t i = 0; i < row.size(); ++i) s += z[static_cast<Eigen::Index>(schema.offset(i) + row[i] - 1)];
      out[static_cast<Eigen::Index>(r)] = s;
    }
    return out;
  }
  Eigen::VectorXd transpose_apply(const Eigen::VectorXd& v) const {
    const auto& schema = data_.schema();
    Eigen::VectorXd z = Eigen::VectorXd::Zero(width_);
    for (std::size_t r = 0; r < n_; ++r) {
      const auto row = data_.row(r);
      for (std::size_t i = 0; i < row.size(); ++i) {
        z[static_cast<Eigen::Index>(schema.offset(i) + row[i] - 1)] += v[static_cast<Eigen::Index>(r)];
      }
    }
    return z;
  }

  const Dataset& data_;
  std::size_t n_;
  Eigen::Index width_ = 0;
  Eigen::VectorXd d_;
  Eigen::MatrixXd gram_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double rho_ = 1.0;
};

void check_inputs(double lambda, const AdmmOptions& opts) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::NonPositiveLambda, "lambda must be a positive finite number");
  }
  if (!(opts.rho > 0.0) || !(opts.tol_abs >= 0.0) || !(opts.tol_rel >= 0.0) || opts.max_iter == 0 ||
      !(opts.support_threshold >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "ADMM options out of range");
  }
}

Eigen::VectorXd block_prox(const Eigen::VectorXd& v, double t, const CategoricalSchema& schema) {
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < schema.num_features(); ++i) {
    const auto off = static_cast<Eigen::Index>(schema.offset(i));
    const auto len = static_cast<Eigen::Index>(schema.cardinality(i));
    out.segment(off, len) = prox_linf(v.segment(off, len), t);
  }
  return out;
}

std::vector<std::size_t> support_of(const std::vector<double>& norms, const AdmmOptions& opts) {
  const double largest = norms.empty() ? 0.0 : *std::max_element(norms.begin(), norms.end());
  const double cut = opts.support_threshold * std::max(1.0, largest);
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (norms[i] > cut) chosen.push_back(i);
  }
  if (opts.top_k && chosen.size() > *opts.top_k) {
    std::vector<std::size_t> order = chosen;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
    if (*opts.top_k == 0) return {};
    // Blocks tied with the k-th norm are all kept.
    const double kth = norms[order[*opts.top_k - 1]];
    chosen.clear();
    for (std::size_t i : order) {
      if (norms[i] >= kth) chosen.push_back(i);
    }
    std::sort(chosen.begin(), chosen.end());
  }
  return chosen;
}

SelectionResult run_admm(SmoothTerm& term, const CategoricalSchema& schema, double lambda, const AdmmOptions& opts) {
  const auto width = static_cast<Eigen::Index>(schema.total_width());
  const Eigen::VectorXd& d = term.linear();
  double rho = opts.rho;
  term.factor(rho);

  Eigen::VectorXd z = Eigen::VectorXd::Zero(width);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(width);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(width);
  auto true_objective = [&](const Eigen::VectorXd& v) {
    return term.value(v) + lambda * group_linf_norm(v, schema);
  };

  SelectionResult out;
  out.lambda = lambda;
  Eigen::VectorXd best = u;
  double best_value = true_objective(u);
  AdmmStats& stats = out.admm_stats;

  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    z = term.solve(d + rho * (u - y));
    const Eigen::VectorXd u_prev = u;
    u = block_prox(z + y, lambda / rho, schema);
    y += z - u;

    const double primal = (z - u).lpNorm<Eigen::Infinity>();
    const double dual = rho * (u - u_prev).lpNorm<Eigen::Infinity>();
    stats.iterations = it;
    stats.primal_residual = primal;
    stats.dual_residual = dual;
    if (opts.record_trace) {
      const Eigen::VectorXd gap = z - u;
      stats.objective_trace.push_back(term.value(z) + lambda * group_linf_norm(u, schema) + rho * y.dot(gap) +
                                      0.5 * rho * gap.squaredNorm());
    }
    const double value = true_objective(u);
    if (value < best_value) {
      best_value = value;
      best = u;
    }

    const double primal_tol =
        opts.tol_abs + opts.tol_rel * std::max(z.lpNorm<Eigen::Infinity>(), u.lpNorm<Eigen::Infinity>());
    const double dual_tol = opts.tol_abs + opts.tol_rel * y.lpNorm<Eigen::Infinity>();
    if (primal <= primal_tol && dual <= dual_tol) {
      out.converged = true;
      break;
    }

    if (opts.residual_balancing && stats.rho_adaptations < opts.max_rho_adaptations) {
      double factor = 1.0;
      if (primal > 10.0 * dual) factor = 2.0;
      else if (dual > 10.0 * primal) factor = 0.5;
      if (factor != 1.0) {
        rho *= factor;
        y /= factor;  // the scaled dual is the unscaled one divided by rho
        term.factor(rho);
        ++stats.rho_adaptations;
      }
    }
  }
  stats.final_rho = rho;

  out.z_rfs = out.converged ? u : best;
  out.objective = true_objective(out.z_rfs);
  out.block_norms.resize(schema.num_features());
  for (std::size_t i = 0; i < schema.num_features(); ++i) {
    out.block_norms[i] = out.z_rfs
                             .segment(static_cast<Eigen::Index>(schema.offset(i)),
                                      static_cast<Eigen::Index>(schema.cardinality(i)))
                             .lpNorm<Eigen::Infinity>();
  }
  out.selected = support_of(out.block_norms, opts);
  return out;
}

}  // namespace

SelectionResult select(const PairwiseMarginals& marg, double lambda, const AdmmOptions& opts) {
  check_inputs(lambda, opts);
  DenseTerm term(marg);
  return run_admm(term, marg.schema, lambda, opts);
}

SelectionResult select_saa(const Dataset& data, double lambda, const AdmmOptions& opts) {
  check_inputs(lambda, opts);
  if (data.size() == 0) throw Error(ErrorKind::EmptyDataset, "no training rows");
  if (!data.has_labels()) throw Error(ErrorKind::InvalidArgument, "selection data has no labels");
  if (data.schema().total_width() <= data.size()) {
    const PairwiseMarginals marg = estimate(data);
    DenseTerm term(marg);
    return run_admm(term, marg.schema, lambda, opts);
  }
  for (auto code : data.codes()) {
    if (code == kUnseenCategory) throw Error(ErrorKind::IndexOutOfAlphabet, "unseen category in selection data");
  }
  SampleTerm term(data);
  return run_admm(term, data.schema(), lambda, opts);
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > 0.0) || count == 0) throw Error(ErrorKind::InvalidArgument, "log grid needs lo, hi > 0");
  if (count == 1) return {lo};
  std::vector<double> grid(count);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t k = 0; k < count; ++k) {
    grid[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

}  // namespace renyi
