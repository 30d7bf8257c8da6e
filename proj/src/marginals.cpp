#include "renyi/marginals.hpp"

#include <cmath>

#include "renyi/error.hpp"

namespace renyi {

double PairwiseMarginals::feature_label(std::size_t i, Category k, int y) const {
  const auto idx = static_cast<Eigen::Index>(schema.offset(i) + k - 1);
  return y == 1 ? 0.5 * (Q(idx, idx) + d[idx]) : 0.5 * (Q(idx, idx) - d[idx]);
}

PairwiseMarginals estimate(const Dataset& data, double smoothing_alpha) {
  if (data.size() == 0) throw Error(ErrorKind::EmptyDataset, "cannot estimate marginals from no rows");
  if (!data.has_labels()) throw Error(ErrorKind::InvalidArgument, "marginals need labelled data");
  if (!(smoothing_alpha >= 0.0)) throw Error(ErrorKind::InvalidArgument, "smoothing must be non-negative");
  const auto& schema = data.schema();
  const std::size_t d = schema.num_features();
  const auto width = static_cast<Eigen::Index>(schema.total_width());

  // Integer tallies keep the estimate exact up to the final division.
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(width, width);
  Eigen::VectorXd signed_counts = Eigen::VectorXd::Zero(width);
  std::size_t zeros = 0;
  std::vector<Eigen::Index> active(d);
  for (std::size_t r = 0; r < data.size(); ++r) {
    auto row = data.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      if (row[i] == kUnseenCategory) throw Error(ErrorKind::IndexOutOfAlphabet, "unseen category in training data");
      active[i] = static_cast<Eigen::Index>(schema.offset(i) + row[i] - 1);
    }
    const double sign = data.label(r) == 1 ? 1.0 : -1.0;
    if (data.label(r) == 0) ++zeros;
    for (std::size_t i = 0; i < d; ++i) {
      signed_counts[active[i]] += sign;
      for (std::size_t j = 0; j < d; ++j) counts(active[i], active[j]) += 1.0;
    }
  }

  const double n = static_cast<double>(data.size());
  PairwiseMarginals out;
  out.schema = schema;
  out.n = data.size();
  out.smoothing_alpha = smoothing_alpha;
  if (smoothing_alpha == 0.0) {
    out.Q = counts / n;
    out.d = signed_counts / n;
    out.q0 = static_cast<double>(zeros) / n;
    return out;
  }

  // Uniform joint: P(X_i = k, X_j = l) = 1 / (m_i m_j), P(X_i = k) = 1 / m_i,
  // and Y independent and fair, so its d vanishes.
  const double total = n + smoothing_alpha;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto oi = static_cast<Eigen::Index>(schema.offset(i));
      const auto oj = static_cast<Eigen::Index>(schema.offset(j));
      const auto mi = static_cast<Eigen::Index>(schema.cardinality(i));
      const auto mj = static_cast<Eigen::Index>(schema.cardinality(j));
      if (i == j) {
        for (Eigen::Index k = 0; k < mi; ++k) counts(oi + k, oi + k) += smoothing_alpha / static_cast<double>(mi);
      } else {
        counts.block(oi, oj, mi, mj).array() += smoothing_alpha / static_cast<double>(mi * mj);
      }
    }
  }
  out.Q = counts / total;
  out.d = signed_counts / total;
  out.q0 = (static_cast<double>(zeros) + 0.5 * smoothing_alpha) / total;
  return out;
}

PairwiseMarginals from_joint(const JointDistribution& p) {
  p.validate();
  const auto& schema = p.schema();
  const std::size_t d = schema.num_features();
  const auto width = static_cast<Eigen::Index>(schema.total_width());
  PairwiseMarginals out;
  out.schema = schema;
  out.Q = Eigen::MatrixXd::Zero(width, width);
  out.d = Eigen::VectorXd::Zero(width);
  out.q0 = 0.0;
  out.n = 0;
  const auto& indexer = p.indexer();
  std::vector<Eigen::Index> active(d);
  for (std::size_t c = 0; c < indexer.size(); ++c) {
    const double p0 = p.at(c, 0);
    const double p1 = p.at(c, 1);
    const double mass = p0 + p1;
    out.q0 += p0;
    if (mass == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) {
      active[i] = static_cast<Eigen::Index>(schema.offset(i) + indexer.digit(c, i) - 1);
    }
    for (std::size_t i = 0; i < d; ++i) {
      out.d[active[i]] += p1 - p0;
      for (std::size_t j = 0; j < d; ++j) out.Q(active[i], active[j]) += mass;
    }
  }
  return out;
}

MarginalConstraints build_constraints(const PairwiseMarginals& marg, std::size_t outcome_cap) {
  const auto& schema = marg.schema;
  const std::size_t configs = schema.configuration_count();
  if (configs > outcome_cap / 2) {
    throw Error(ErrorKind::InstanceTooLarge, "joint has more than " + std::to_string(outcome_cap) + " outcomes");
  }
  const std::size_t d = schema.num_features();
  const ConfigurationIndexer indexer(schema.cardinalities());

  // Row numbering: pairwise blocks (i<j) in order, then feature-label rows.
  std::vector<std::size_t> pair_base;  // index into rows for pair (i,j)
  std::size_t rows = 0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      pair_base.push_back(rows);
      rows += schema.cardinality(i) * schema.cardinality(j);
    }
  }
  const std::size_t pairwise_rows = rows;
  std::vector<std::size_t> label_base(d);
  for (std::size_t i = 0; i < d; ++i) {
    label_base[i] = rows;
    rows += 2 * schema.cardinality(i);
  }

  MarginalConstraints out;
  out.schema = schema;
  out.pairwise_rows = pairwise_rows;
  out.feature_label_rows = rows - pairwise_rows;
  out.b.resize(static_cast<Eigen::Index>(rows));

  std::size_t pair = 0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j, ++pair) {
      const std::size_t mj = schema.cardinality(j);
      for (std::size_t k = 0; k < schema.cardinality(i); ++k) {
        for (std::size_t l = 0; l < mj; ++l) {
          out.b[static_cast<Eigen::Index>(pair_base[pair] + k * mj + l)] =
              marg.Q(static_cast<Eigen::Index>(schema.offset(i) + k), static_cast<Eigen::Index>(schema.offset(j) + l));
        }
      }
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < schema.cardinality(i); ++k) {
      for (int y = 0; y < 2; ++y) {
        out.b[static_cast<Eigen::Index>(label_base[i] + 2 * k + static_cast<std::size_t>(y))] =
            marg.feature_label(i, static_cast<Category>(k + 1), y);
      }
    }
  }

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(2 * configs * (d * (d - 1) / 2 + d));
  for (std::size_t c = 0; c < configs; ++c) {
    std::size_t pair_index = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t xi = indexer.digit(c, i) - 1;
      for (std::size_t j = i + 1; j < d; ++j, ++pair_index) {
        const std::size_t xj = indexer.digit(c, j) - 1;
        const auto row = static_cast<int>(pair_base[pair_index] + xi * schema.cardinality(j) + xj);
        entries.emplace_back(row, static_cast<int>(2 * c), 1.0);
        entries.emplace_back(row, static_cast<int>(2 * c + 1), 1.0);
      }
      for (int y = 0; y < 2; ++y) {
        const auto row = static_cast<int>(label_base[i] + 2 * xi + static_cast<std::size_t>(y));
        entries.emplace_back(row, static_cast<int>(2 * c + static_cast<std::size_t>(y)), 1.0);
      }
    }
  }
  out.A.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(2 * configs));
  out.A.setFromTriplets(entries.begin(), entries.end());
  return out;
}

}  // namespace renyi
