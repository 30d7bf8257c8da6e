#include "renyi/joint.hpp"

#include <cmath>

#include "renyi/error.hpp"

namespace renyi {

ConfigurationIndexer::ConfigurationIndexer(std::vector<std::size_t> cardinalities) : cards_(std::move(cardinalities)) {
  strides_.assign(cards_.size(), 1);
  for (std::size_t i = cards_.size(); i-- > 0;) {
    strides_[i] = count_;
    count_ *= cards_[i];
  }
}

std::size_t ConfigurationIndexer::index_of(std::span<const Category> x) const {
  if (x.size() != cards_.size()) throw Error(ErrorKind::LengthMismatch, "configuration length mismatch");
  std::size_t index = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 1 || x[i] > cards_[i]) {
      throw Error(ErrorKind::IndexOutOfAlphabet, "code " + std::to_string(x[i]) + " outside feature " +
                                                     std::to_string(i + 1) + " alphabet");
    }
    index += (x[i] - 1) * strides_[i];
  }
  return index;
}

std::vector<Category> ConfigurationIndexer::decode(std::size_t index) const {
  std::vector<Category> x(cards_.size());
  for (std::size_t i = 0; i < cards_.size(); ++i) x[i] = digit(index, i);
  return x;
}

JointDistribution::JointDistribution(CategoricalSchema schema, Eigen::VectorXd p)
    : schema_(std::move(schema)), indexer_(schema_.cardinalities()), p_(std::move(p)) {
  if (static_cast<std::size_t>(p_.size()) != 2 * indexer_.size()) {
    throw Error(ErrorKind::LengthMismatch, "joint vector has " + std::to_string(p_.size()) + " entries, expected " +
                                               std::to_string(2 * indexer_.size()));
  }
  validate();
}

JointDistribution JointDistribution::zeros(CategoricalSchema schema) {
  JointDistribution out;
  out.indexer_ = ConfigurationIndexer(schema.cardinalities());
  out.p_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * out.indexer_.size()));
  out.schema_ = std::move(schema);
  return out;
}

double JointDistribution::prob_y0() const {
  double q = 0.0;
  for (std::size_t c = 0; c < num_configurations(); ++c) q += at(c, 0);
  return q;
}

void JointDistribution::validate() const {
  double total = 0.0;
  for (Eigen::Index i = 0; i < p_.size(); ++i) {
    if (!std::isfinite(p_[i]) || p_[i] < 0.0) {
      throw Error(ErrorKind::InvalidDistribution, "entry " + std::to_string(i) + " is negative or not finite");
    }
    total += p_[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidDistribution, "entries sum to " + std::to_string(total));
  }
}

}  // namespace renyi
