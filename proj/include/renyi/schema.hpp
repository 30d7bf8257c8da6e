#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace renyi {

/// Category code of a feature value. Codes are 1-based within each feature;
/// code 0 is reserved for a value that is not part of the alphabet (only
/// produced by permissive ingestion).
using Category = std::uint32_t;
inline constexpr Category kUnseenCategory = 0;

struct Feature {
  std::string name;
  std::vector<std::string> categories;

  bool operator==(const Feature&) const = default;
};

/// Ordered categorical features and the layout of their indicator blocks.
/// Feature i occupies indicator columns [offset(i), offset(i) + cardinality(i)).
class CategoricalSchema {
 public:
  CategoricalSchema() = default;
  explicit CategoricalSchema(std::vector<Feature> features);

  /// d features named x1..xd with categories "1".."m" each.
  static CategoricalSchema uniform(std::size_t d, std::size_t m);
  /// Features named x1..xd with categories "1".."m_i".
  static CategoricalSchema with_cardinalities(std::span<const std::size_t> cardinalities);

  std::size_t num_features() const noexcept { return features_.size(); }
  std::size_t cardinality(std::size_t i) const { return features_.at(i).categories.size(); }
  std::size_t offset(std::size_t i) const { return offsets_.at(i); }
  std::size_t total_width() const noexcept { return total_width_; }
  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
  const Feature& feature(std::size_t i) const { return features_.at(i); }
  const std::vector<Feature>& features() const noexcept { return features_; }
  std::vector<std::size_t> cardinalities() const;

  /// 1-based code of `value` in feature i, if present.
  std::optional<Category> find_category(std::size_t i, const std::string& value) const;
  std::optional<std::size_t> find_feature(const std::string& name) const;

  /// Number of joint configurations prod_i m_i, saturating at SIZE_MAX.
  std::size_t configuration_count() const noexcept;

  bool operator==(const CategoricalSchema& other) const { return features_ == other.features_; }

 private:
  std::vector<Feature> features_;
  std::vector<std::size_t> offsets_;
  std::size_t total_width_ = 0;
  std::vector<std::unordered_map<std::string, Category>> lookup_;
};

/// Rows of category codes with binary labels. Rows are stored row-major in a
/// single buffer. `labels` is either empty (unlabelled data) or has one entry
/// per row.
class Dataset {
 public:
  Dataset() = default;
  Dataset(CategoricalSchema schema, std::vector<Category> codes, std::vector<std::uint8_t> labels,
          bool allow_unseen = false);

  const CategoricalSchema& schema() const noexcept { return schema_; }
  std::size_t size() const noexcept { return n_; }
  std::size_t num_features() const noexcept { return schema_.num_features(); }
  std::span<const Category> row(std::size_t r) const {
    return {codes_.data() + r * schema_.num_features(), schema_.num_features()};
  }
  const std::vector<Category>& codes() const noexcept { return codes_; }
  const std::vector<std::uint8_t>& labels() const noexcept { return labels_; }
  bool has_labels() const noexcept { return !labels_.empty(); }
  std::uint8_t label(std::size_t r) const { return labels_.at(r); }
  bool allows_unseen() const noexcept { return allow_unseen_; }

  /// Human-readable names of label 0 and label 1.
  const std::pair<std::string, std::string>& label_names() const noexcept { return label_names_; }
  void set_label_names(std::pair<std::string, std::string> names) { label_names_ = std::move(names); }

 private:
  CategoricalSchema schema_;
  std::vector<Category> codes_;
  std::vector<std::uint8_t> labels_;
  std::size_t n_ = 0;
  bool allow_unseen_ = false;
  std::pair<std::string, std::string> label_names_{"0", "1"};
};

struct IndicatorRow {
  std::vector<std::uint8_t> w;
  double c = 0.0;  // +1/2 for label 1, -1/2 for label 0
};

/// One-hot encoding of a row: w[offset(i) + x_i - 1] = 1.
IndicatorRow encode_row(const CategoricalSchema& schema, std::span<const Category> row, std::uint8_t label);
/// Inverse of the indicator part of encode_row.
std::vector<Category> decode_row(const CategoricalSchema& schema, std::span<const std::uint8_t> w);

struct IngestOptions {
  std::string label_column;
  /// When set, columns are matched to the schema features by name and every
  /// value must belong to the schema alphabet (unless permissive).
  std::optional<CategoricalSchema> schema_hint;
  /// Map unknown values to kUnseenCategory instead of failing.
  bool permissive = false;
  /// Fixed label names (label 0, label 1), e.g. taken from a trained model.
  std::optional<std::pair<std::string, std::string>> label_names;
  /// Accept a file without the label column (prediction input).
  bool label_optional = false;
};

/// Reads a comma-separated file with a header row. Without a schema hint
/// every non-label column is a feature and categories are registered in
/// first-seen order. Labels "0"/"1" map literally; any other pair of strings
/// maps the lexicographically smaller one to 0.
Dataset ingest_csv(const std::string& path, const IngestOptions& options);

/// Same as ingest_csv but reads from an in-memory buffer.
Dataset parse_csv(const std::string& text, const IngestOptions& options);

/// Replaces the features by pair features X_ij with code (x_i - 1) * m_j + x_j.
/// Feature indices are 0-based. An empty list means all pairs i < j in
/// lexicographic order.
Dataset expand_pairs(const Dataset& data, std::span<const std::pair<std::size_t, std::size_t>> pairs = {});

std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t d);

}  // namespace renyi
