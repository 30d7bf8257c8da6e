#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "renyi/schema.hpp"

namespace renyi {

/// Mixed-radix numbering of the configurations x = (x_1, ..., x_d); x_1 is
/// the most significant digit, so configurations enumerate lexicographically.
class ConfigurationIndexer {
 public:
  explicit ConfigurationIndexer(std::vector<std::size_t> cardinalities);

  std::size_t size() const noexcept { return count_; }
  std::size_t index_of(std::span<const Category> x) const;
  std::vector<Category> decode(std::size_t index) const;
  /// Code of feature i in configuration `index`, without materialising x.
  Category digit(std::size_t index, std::size_t i) const {
    return static_cast<Category>((index / strides_[i]) % cards_[i] + 1);
  }

 private:
  std::vector<std::size_t> cards_;
  std::vector<std::size_t> strides_;
  std::size_t count_ = 1;
};

/// Explicit probability vector over X^d x {0,1}. Entry (config, y) lives at
/// position 2 * config + y.
class JointDistribution {
 public:
  JointDistribution() = default;
  /// Validates: entries >= 0 and sum within 1e-12 of 1.
  JointDistribution(CategoricalSchema schema, Eigen::VectorXd p);

  /// The distribution with all mass zero; fill with set() and call validate().
  static JointDistribution zeros(CategoricalSchema schema);

  const CategoricalSchema& schema() const noexcept { return schema_; }
  const ConfigurationIndexer& indexer() const noexcept { return indexer_; }
  std::size_t num_configurations() const noexcept { return indexer_.size(); }
  const Eigen::VectorXd& p() const noexcept { return p_; }

  double at(std::size_t config, int y) const { return p_[2 * config + y]; }
  double at(std::span<const Category> x, int y) const { return at(indexer_.index_of(x), y); }
  void set(std::span<const Category> x, int y, double value) { p_[2 * indexer_.index_of(x) + y] = value; }

  double prob_y0() const;
  void validate() const;

 private:
  CategoricalSchema schema_;
  ConfigurationIndexer indexer_{{}};
  Eigen::VectorXd p_;
};

/// Randomised rule: q_delta[config] is the probability of predicting 0.
struct DecisionRule {
  Eigen::VectorXd q_delta;
};

}  // namespace renyi
