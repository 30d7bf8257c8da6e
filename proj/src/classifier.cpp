#include "renyi/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "renyi/error.hpp"
#include "renyi/marginals.hpp"
#include "renyi/rng.hpp"

namespace renyi {

namespace {

constexpr double kScoreTie = 1e-12;

std::uint8_t map_label_for(double score, double q0) {
  if (score > kScoreTie) return 1;
  if (score < -kScoreTie) return 0;
  return (1.0 - q0) > q0 ? 1 : 0;
}

}  // namespace

bool RenyiModel::operator==(const RenyiModel& o) const {
  return schema == o.schema && z.size() == o.z.size() && z == o.z && ridge_lambda == o.ridge_lambda &&
         gamma == o.gamma && separable == o.separable && h_plus == o.h_plus && h_minus == o.h_minus && q0 == o.q0 &&
         clip_epsilon == o.clip_epsilon && train_n == o.train_n && smoothing_alpha == o.smoothing_alpha &&
         label_column == o.label_column && label_names == o.label_names && input_schema == o.input_schema &&
         pairs == o.pairs && created_utc == o.created_utc;
}

RenyiModel model_from_solution(const CategoricalSchema& schema, const QuadSolution& sol, double ridge_lambda) {
  RenyiModel model;
  model.schema = schema;
  model.z = sol.z;
  model.ridge_lambda = ridge_lambda;
  model.gamma = sol.gamma;
  model.separable = sol.separable;
  model.h_plus = sol.h_plus;
  model.h_minus = sol.h_minus;
  model.q0 = sol.q0;
  return model;
}

RenyiModel train(const Dataset& data, const TrainOptions& options) {
  QuadSolution sol = options.smoothing_alpha > 0.0
                         ? solve_population(estimate(data, options.smoothing_alpha), options.ridge_lambda)
                         : solve_saa(data, options.ridge_lambda, options.path);
  RenyiModel model = model_from_solution(data.schema(), sol, options.ridge_lambda);
  model.train_n = data.size();
  model.smoothing_alpha = options.smoothing_alpha;
  model.label_names = data.label_names();
  model.created_utc = current_utc_timestamp();
  return model;
}

double randomized_weight(double p0, double p1) {
  const double a = p0 * p0;
  const double b = p1 * p1;
  if (a + b == 0.0) return 0.5;
  return a / (a + b);
}

double score_row(const RenyiModel& model, std::span<const Category> row, UnseenPolicy policy) {
  const auto& schema = model.schema;
  if (row.size() != schema.num_features()) {
    throw Error(ErrorKind::LengthMismatch, "row has " + std::to_string(row.size()) + " values, model expects " +
                                               std::to_string(schema.num_features()));
  }
  double score = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    const Category x = row[i];
    if (x == kUnseenCategory && policy == UnseenPolicy::Permissive) continue;
    if (x < 1 || x > schema.cardinality(i)) {
      throw Error(ErrorKind::IndexOutOfAlphabet,
                  "feature '" + schema.feature(i).name + "' has no category code " + std::to_string(x));
    }
    score += model.z[static_cast<Eigen::Index>(schema.offset(i) + x - 1)];
  }
  return score;
}

Prediction predict_conditional(const RenyiModel& model, std::span<const Category> row, UnseenPolicy policy) {
  Prediction out;
  out.score = score_row(model, row, policy);
  const double eps = model.clip_epsilon;
  out.p1 = std::clamp(0.5 + out.score, eps, 1.0 - eps);
  out.p0 = 1.0 - out.p1;
  out.map_label = map_label_for(out.score, model.q0);
  out.prob_predict_0 = randomized_weight(out.p0, out.p1);
  return out;
}

std::uint8_t decide_map(const RenyiModel& model, std::span<const Category> row, UnseenPolicy policy) {
  return map_label_for(score_row(model, row, policy), model.q0);
}

std::uint8_t decide_randomized(const RenyiModel& model, std::span<const Category> row, std::uint64_t seed,
                               std::uint64_t row_index, UnseenPolicy policy) {
  const double prob0 = predict_conditional(model, row, policy).prob_predict_0;
  return counter_uniform(seed, row_index) < prob0 ? 0 : 1;
}

Evaluation evaluate(const RenyiModel& model, const Dataset& data, EvalMode mode, std::uint64_t seed,
                    UnseenPolicy policy) {
  if (data.size() == 0) throw Error(ErrorKind::EmptyDataset, "nothing to evaluate");
  if (!data.has_labels()) throw Error(ErrorKind::InvalidArgument, "evaluation data has no labels");
  std::array<double, 2> errors{0.0, 0.0};
  Evaluation out;
  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto row = data.row(r);
    const std::uint8_t y = data.label(r);
    double err = 0.0;
    switch (mode) {
      case EvalMode::Map:
        err = decide_map(model, row, policy) != y ? 1.0 : 0.0;
        break;
      case EvalMode::RandomizedAnalytic: {
        const double prob0 = predict_conditional(model, row, policy).prob_predict_0;
        err = y == 1 ? prob0 : 1.0 - prob0;
        break;
      }
      case EvalMode::RandomizedSampled:
        err = decide_randomized(model, row, seed, r, policy) != y ? 1.0 : 0.0;
        break;
    }
    errors[y] += err;
    ++out.class_counts[y];
  }
  out.error_rate = (errors[0] + errors[1]) / static_cast<double>(data.size());
  for (int y = 0; y < 2; ++y) {
    out.per_class[y] = out.class_counts[y] ? errors[y] / static_cast<double>(out.class_counts[y]) : 0.0;
  }
  return out;
}

double error_upper_bound(const RenyiModel& model) { return 2.0 * model.gamma; }

namespace {

template <class PerRow>
DecisionRule tabulate(const RenyiModel& model, PerRow&& per_row) {
  const ConfigurationIndexer indexer(model.schema.cardinalities());
  if (indexer.size() > 10'000'000) throw Error(ErrorKind::InstanceTooLarge, "too many configurations to tabulate");
  DecisionRule rule;
  rule.q_delta.resize(static_cast<Eigen::Index>(indexer.size()));
  for (std::size_t c = 0; c < indexer.size(); ++c) {
    const auto x = indexer.decode(c);
    rule.q_delta[static_cast<Eigen::Index>(c)] = per_row(std::span<const Category>(x));
  }
  return rule;
}

}  // namespace

DecisionRule tabulate_randomized_rule(const RenyiModel& model) {
  return tabulate(model, [&](std::span<const Category> x) { return predict_conditional(model, x).prob_predict_0; });
}

DecisionRule tabulate_map_rule(const RenyiModel& model) {
  return tabulate(model, [&](std::span<const Category> x) { return decide_map(model, x) == 0 ? 1.0 : 0.0; });
}

}  // namespace renyi
