#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "renyi/joint.hpp"
#include "renyi/renyi_core.hpp"
#include "renyi/schema.hpp"

namespace renyi {

/// Trained classifier: the indicator coefficients z and the diagnostics of
/// the quadratic program they came from.
struct RenyiModel {
  CategoricalSchema schema;
  Eigen::VectorXd z;
  double ridge_lambda = 0.0;
  double gamma = 0.25;
  bool separable = false;
  double h_plus = 0.0;
  double h_minus = 0.0;
  double q0 = 0.5;
  double clip_epsilon = 0.0;
  std::size_t train_n = 0;
  double smoothing_alpha = 0.0;

  // Ingestion metadata, needed to read prediction input the way the
  // training input was read.
  std::string label_column;
  std::pair<std::string, std::string> label_names{"0", "1"};
  /// Set when the model was trained on pair features; `schema` is then the
  /// expanded schema and raw input follows input_schema.
  std::optional<CategoricalSchema> input_schema;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::string created_utc;

  double hgr_lower_bound() const { return hgr_bound_from_gamma(gamma, q0); }
  bool operator==(const RenyiModel&) const;
};

struct TrainOptions {
  double ridge_lambda = 0.0;
  /// Pseudo-count mass mixed into the marginals; > 0 trains from the
  /// smoothed marginals instead of the raw samples.
  double smoothing_alpha = 0.0;
  SaaPath path = SaaPath::Automatic;
};

RenyiModel train(const Dataset& data, const TrainOptions& options);
RenyiModel model_from_solution(const CategoricalSchema& schema, const QuadSolution& sol, double ridge_lambda);

enum class UnseenPolicy { Strict, Permissive };

struct Prediction {
  double score = 0.0;  // sum of z over the indicators of the row
  double p1 = 0.5;
  double p0 = 0.5;
  std::uint8_t map_label = 0;
  double prob_predict_0 = 0.5;
};

/// Probability of predicting 0 under the randomised rule: p0^2 / (p0^2 + p1^2),
/// 1/2 when both are zero. Invariant under scaling of (p0, p1).
double randomized_weight(double p0, double p1);

/// Sum of z over the row's indicators; unseen codes add nothing under the
/// permissive policy.
double score_row(const RenyiModel& model, std::span<const Category> row, UnseenPolicy policy = UnseenPolicy::Strict);

/// Conditional probabilities 1/2 +- score, clamped to [eps, 1 - eps] with
/// p0 = 1 - p1, the MAP label and the randomised weight.
Prediction predict_conditional(const RenyiModel& model, std::span<const Category> row,
                               UnseenPolicy policy = UnseenPolicy::Strict);

/// Sign of the score; |score| <= 1e-12 goes to the class with the larger
/// prior, and to 0 when the priors are equal.
std::uint8_t decide_map(const RenyiModel& model, std::span<const Category> row,
                        UnseenPolicy policy = UnseenPolicy::Strict);

/// Label drawn with P(0) = prob_predict_0 using a uniform that depends only on
/// (seed, row_index).
std::uint8_t decide_randomized(const RenyiModel& model, std::span<const Category> row, std::uint64_t seed,
                               std::uint64_t row_index, UnseenPolicy policy = UnseenPolicy::Strict);

enum class EvalMode { Map, RandomizedAnalytic, RandomizedSampled };

struct Evaluation {
  double error_rate = 0.0;
  std::array<double, 2> per_class{0.0, 0.0};  // error among rows with label 0 / label 1
  std::array<std::size_t, 2> class_counts{0, 0};
};

Evaluation evaluate(const RenyiModel& model, const Dataset& data, EvalMode mode, std::uint64_t seed = 0,
                    UnseenPolicy policy = UnseenPolicy::Strict);

/// 2 gamma: worst-case error bound of the randomised rule over every joint
/// with the training marginals. It is within a factor of two of the best
/// achievable worst-case error only when the model is separable.
double error_upper_bound(const RenyiModel& model);

/// The model's randomised rule tabulated over every configuration of its
/// schema (prob_predict_0 per configuration), for exact worst-case analysis.
DecisionRule tabulate_randomized_rule(const RenyiModel& model);
/// Same for the MAP rule (1 where the MAP label is 0).
DecisionRule tabulate_map_rule(const RenyiModel& model);

inline constexpr const char* kModelFormatVersion = "1";

/// ISO-8601 UTC time; honours SOURCE_DATE_EPOCH.
std::string current_utc_timestamp();

std::string model_to_json(const RenyiModel& model);
RenyiModel model_from_json(const std::string& text);
void save_model(const RenyiModel& model, const std::string& path);
RenyiModel load_model(const std::string& path);

}  // namespace renyi
