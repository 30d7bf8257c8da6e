#include "renyi/schema.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "renyi/error.hpp"

namespace renyi {

CategoricalSchema::CategoricalSchema(std::vector<Feature> features) : features_(std::move(features)) {
  offsets_.reserve(features_.size());
  lookup_.resize(features_.size());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const auto& f = features_[i];
    if (f.categories.empty()) {
      throw Error(ErrorKind::InvalidArgument, "feature '" + f.name + "' has no categories");
    }
    for (std::size_t k = 0; k < f.categories.size(); ++k) {
      auto [it, inserted] = lookup_[i].emplace(f.categories[k], static_cast<Category>(k + 1));
      if (!inserted) {
        throw Error(ErrorKind::InvalidArgument,
                    "feature '" + f.name + "' lists category '" + f.categories[k] + "' twice");
      }
    }
    offsets_.push_back(offset);
    offset += f.categories.size();
  }
  total_width_ = offset;
}

CategoricalSchema CategoricalSchema::uniform(std::size_t d, std::size_t m) {
  std::vector<std::size_t> cards(d, m);
  return with_cardinalities(cards);
}

CategoricalSchema CategoricalSchema::with_cardinalities(std::span<const std::size_t> cardinalities) {
  std::vector<Feature> features;
  features.reserve(cardinalities.size());
  for (std::size_t i = 0; i < cardinalities.size(); ++i) {
    Feature f{"x" + std::to_string(i + 1), {}};
    for (std::size_t k = 1; k <= cardinalities[i]; ++k) f.categories.push_back(std::to_string(k));
    features.push_back(std::move(f));
  }
  return CategoricalSchema(std::move(features));
}

std::vector<std::size_t> CategoricalSchema::cardinalities() const {
  std::vector<std::size_t> out;
  out.reserve(features_.size());
  for (const auto& f : features_) out.push_back(f.categories.size());
  return out;
}

std::optional<Category> CategoricalSchema::find_category(std::size_t i, const std::string& value) const {
  const auto& table = lookup_.at(i);
  auto it = table.find(value);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> CategoricalSchema::find_feature(const std::string& name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t CategoricalSchema::configuration_count() const noexcept {
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  std::size_t count = 1;
  for (const auto& f : features_) {
    const std::size_t m = f.categories.size();
    if (count > kMax / m) return kMax;
    count *= m;
  }
  return count;
}

Dataset::Dataset(CategoricalSchema schema, std::vector<Category> codes, std::vector<std::uint8_t> labels,
                 bool allow_unseen)
    : schema_(std::move(schema)), codes_(std::move(codes)), labels_(std::move(labels)), allow_unseen_(allow_unseen) {
  const std::size_t d = schema_.num_features();
  if (d == 0) throw Error(ErrorKind::InvalidArgument, "dataset has no features");
  if (codes_.size() % d != 0) {
    throw Error(ErrorKind::LengthMismatch, "code buffer is not a whole number of rows");
  }
  n_ = codes_.size() / d;
  if (n_ == 0) throw Error(ErrorKind::EmptyDataset, "dataset has no rows");
  if (!labels_.empty() && labels_.size() != n_) {
    throw Error(ErrorKind::LengthMismatch, "rows and labels differ in length");
  }
  for (auto y : labels_) {
    if (y > 1) throw Error(ErrorKind::NonBinaryLabel, "label outside {0,1}");
  }
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t i = 0; i < d; ++i) {
      const Category x = codes_[r * d + i];
      if (x == kUnseenCategory && allow_unseen_) continue;
      if (x < 1 || x > schema_.cardinality(i)) {
        throw Error(ErrorKind::IndexOutOfAlphabet, "row " + std::to_string(r + 1) + ", feature '" +
                                                       schema_.feature(i).name + "': code " + std::to_string(x));
      }
    }
  }
}

IndicatorRow encode_row(const CategoricalSchema& schema, std::span<const Category> row, std::uint8_t label) {
  if (row.size() != schema.num_features()) {
    throw Error(ErrorKind::LengthMismatch, "row has " + std::to_string(row.size()) + " values, schema has " +
                                               std::to_string(schema.num_features()) + " features");
  }
  IndicatorRow out;
  out.w.assign(schema.total_width(), 0);
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] < 1 || row[i] > schema.cardinality(i)) {
      throw Error(ErrorKind::IndexOutOfAlphabet,
                  "feature '" + schema.feature(i).name + "' has no category code " + std::to_string(row[i]));
    }
    out.w[schema.offset(i) + row[i] - 1] = 1;
  }
  out.c = label == 1 ? 0.5 : -0.5;
  return out;
}

std::vector<Category> decode_row(const CategoricalSchema& schema, std::span<const std::uint8_t> w) {
  if (w.size() != schema.total_width()) throw Error(ErrorKind::LengthMismatch, "indicator width mismatch");
  std::vector<Category> row(schema.num_features(), kUnseenCategory);
  for (std::size_t i = 0; i < schema.num_features(); ++i) {
    for (std::size_t k = 0; k < schema.cardinality(i); ++k) {
      if (w[schema.offset(i) + k] == 0) continue;
      if (row[i] != kUnseenCategory) {
        throw Error(ErrorKind::IndexOutOfAlphabet, "block of feature '" + schema.feature(i).name + "' is not one-hot");
      }
      row[i] = static_cast<Category>(k + 1);
    }
    if (row[i] == kUnseenCategory) {
      throw Error(ErrorKind::IndexOutOfAlphabet, "block of feature '" + schema.feature(i).name + "' is empty");
    }
  }
  return row;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::pair<std::string, std::string> resolve_label_names(const std::vector<std::string>& raw,
                                                        const IngestOptions& options) {
  if (options.label_names) return *options.label_names;
  std::set<std::string> distinct(raw.begin(), raw.end());
  const bool literal = std::all_of(distinct.begin(), distinct.end(), [](const std::string& s) { return s == "0" || s == "1"; });
  if (literal) return {"0", "1"};
  if (distinct.size() != 2) {
    throw Error(ErrorKind::NonBinaryLabel, "label column '" + options.label_column + "' has " +
                                               std::to_string(distinct.size()) + " distinct values, expected 2");
  }
  return {*distinct.begin(), *std::next(distinct.begin())};
}

}  // namespace

Dataset parse_csv(const std::string& text, const IngestOptions& options) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    header = split_line(line);
    break;
  }
  if (header.empty()) throw Error(ErrorKind::EmptyDataset, "file has no header");
  {
    std::set<std::string> seen;
    for (const auto& h : header) {
      if (!seen.insert(h).second) throw Error(ErrorKind::InvalidArgument, "duplicate column '" + h + "'");
    }
  }

  std::optional<std::size_t> label_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == options.label_column) label_col = c;
  }
  if (!label_col && !options.label_optional) {
    throw Error(ErrorKind::MissingLabelColumn, "header has no column '" + options.label_column + "'");
  }

  // Feature column -> position in the schema.
  std::vector<std::size_t> feature_cols;
  std::vector<Feature> features;
  if (options.schema_hint) {
    const auto& hint = *options.schema_hint;
    for (std::size_t i = 0; i < hint.num_features(); ++i) {
      auto it = std::find(header.begin(), header.end(), hint.feature(i).name);
      if (it == header.end()) {
        throw Error(ErrorKind::MissingColumn, "header has no column '" + hint.feature(i).name + "'");
      }
      feature_cols.push_back(static_cast<std::size_t>(it - header.begin()));
    }
  } else {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (label_col && c == *label_col) continue;
      feature_cols.push_back(c);
      features.push_back({header[c], {}});
    }
    if (features.empty()) throw Error(ErrorKind::InvalidArgument, "no feature columns");
  }

  const std::size_t d = feature_cols.size();
  std::vector<std::unordered_map<std::string, Category>> interned(options.schema_hint ? 0 : d);
  std::vector<Category> codes;
  std::vector<std::string> raw_labels;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row_number;
    auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::RaggedRow, "row " + std::to_string(row_number) + " has " + std::to_string(cells.size()) +
                                            " cells, header has " + std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].empty()) {
        throw Error(ErrorKind::RaggedRow, "row " + std::to_string(row_number) + " has an empty cell in column '" +
                                              header[c] + "'");
      }
    }
    for (std::size_t i = 0; i < d; ++i) {
      const std::string& value = cells[feature_cols[i]];
      if (options.schema_hint) {
        auto code = options.schema_hint->find_category(i, value);
        if (!code) {
          if (!options.permissive) {
            throw Error(ErrorKind::UnknownCategory, "row " + std::to_string(row_number) + ", feature '" +
                                                        options.schema_hint->feature(i).name + "': unknown value '" +
                                                        value + "'");
          }
          codes.push_back(kUnseenCategory);
        } else {
          codes.push_back(*code);
        }
      } else {
        auto [it, inserted] = interned[i].emplace(value, static_cast<Category>(features[i].categories.size() + 1));
        if (inserted) features[i].categories.push_back(value);
        codes.push_back(it->second);
      }
    }
    if (label_col) raw_labels.push_back(cells[*label_col]);
  }
  if (row_number == 0) throw Error(ErrorKind::EmptyDataset, "file has a header but no rows");

  std::vector<std::uint8_t> labels;
  std::pair<std::string, std::string> names{"0", "1"};
  if (label_col) {
    names = resolve_label_names(raw_labels, options);
    labels.reserve(raw_labels.size());
    for (std::size_t r = 0; r < raw_labels.size(); ++r) {
      if (raw_labels[r] == names.first) {
        labels.push_back(0);
      } else if (raw_labels[r] == names.second) {
        labels.push_back(1);
      } else {
        throw Error(ErrorKind::NonBinaryLabel,
                    "row " + std::to_string(r + 1) + ": label '" + raw_labels[r] + "' is neither '" + names.first +
                        "' nor '" + names.second + "'");
      }
    }
  }

  CategoricalSchema schema = options.schema_hint ? *options.schema_hint : CategoricalSchema(std::move(features));
  Dataset out(std::move(schema), std::move(codes), std::move(labels), options.permissive);
  out.set_label_names(std::move(names));
  return out;
}

Dataset ingest_csv(const std::string& path, const IngestOptions& options) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_csv(buffer.str(), options);
}

std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t d) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

Dataset expand_pairs(const Dataset& data, std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  const auto& schema = data.schema();
  const std::size_t d = schema.num_features();
  std::vector<std::pair<std::size_t, std::size_t>> chosen(pairs.begin(), pairs.end());
  if (chosen.empty()) chosen = all_pairs(d);
  if (chosen.empty()) throw Error(ErrorKind::InvalidArgument, "pair expansion needs at least two features");

  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto [i, j] : chosen) {
    if (i >= d || j >= d) throw Error(ErrorKind::InvalidArgument, "pair index out of range");
    if (i == j) throw Error(ErrorKind::SelfPair, "pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    if (!seen.insert({std::min(i, j), std::max(i, j)}).second) {
      throw Error(ErrorKind::DuplicatePair, "pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }

  std::vector<Feature> features;
  features.reserve(chosen.size());
  for (auto [i, j] : chosen) {
    const auto& a = schema.feature(i);
    const auto& b = schema.feature(j);
    Feature f{a.name + ":" + b.name, {}};
    f.categories.reserve(a.categories.size() * b.categories.size());
    for (const auto& ca : a.categories) {
      for (const auto& cb : b.categories) f.categories.push_back(ca + ":" + cb);
    }
    features.push_back(std::move(f));
  }

  std::vector<Category> codes;
  codes.reserve(data.size() * chosen.size());
  for (std::size_t r = 0; r < data.size(); ++r) {
    auto row = data.row(r);
    for (auto [i, j] : chosen) {
      if (row[i] == kUnseenCategory || row[j] == kUnseenCategory) {
        codes.push_back(kUnseenCategory);
      } else {
        codes.push_back(static_cast<Category>((row[i] - 1) * schema.cardinality(j) + row[j]));
      }
    }
  }
  Dataset out(CategoricalSchema(std::move(features)), std::move(codes), data.labels(), data.allows_unseen());
  out.set_label_names(data.label_names());
  return out;
}

}  // namespace renyi
