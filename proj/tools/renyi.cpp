// Command-line front end: train, predict, evaluate, select, oracle, experiment-synthetic.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "renyi/classifier.hpp"
#include "renyi/error.hpp"
#include "renyi/feature_select.hpp"
#include "renyi/format.hpp"
#include "renyi/instance_io.hpp"
#include "renyi/marginals.hpp"
#include "renyi/oracle.hpp"
#include "renyi/renyi_core.hpp"
#include "renyi/schema.hpp"
#include "renyi/synthetic.hpp"

namespace {

using namespace renyi;

enum Exit : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kData = 3, kNumerical = 4 };

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveLambda:
    case ErrorKind::InvalidArgument:
      return kUsage;
    case ErrorKind::SingularSystem:
    case ErrorKind::MaxIterationsExceeded:
      return kNumerical;
    default:
      return kData;  // including Infeasible: the marginals themselves are inconsistent
  }
}

void put(const std::string& key, double value) { std::cout << key << '=' << format_real(value) << '\n'; }
void put(const std::string& key, const std::string& value) { std::cout << key << '=' << value << '\n'; }
void put(const std::string& key, std::size_t value) { std::cout << key << '=' << value << '\n'; }
void put(const std::string& key, bool value) { std::cout << key << '=' << (value ? "true" : "false") << '\n'; }

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  std::string label;
  double ridge = 0.0;
  double smoothing = 0.0;
  bool pairs = false;
  std::string out;
  std::string path = "auto";
};

SaaPath parse_path(const std::string& name) {
  if (name == "normal") return SaaPath::Normal;
  if (name == "gram") return SaaPath::Gram;
  return SaaPath::Automatic;
}

int cmd_train(const TrainArgs& a) {
  IngestOptions ingest;
  ingest.label_column = a.label;
  const Dataset raw = ingest_csv(a.data, ingest);
  std::optional<Dataset> expanded;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (a.pairs) {
    pairs = all_pairs(raw.num_features());
    expanded = expand_pairs(raw, pairs);
  }
  const Dataset& data = expanded ? *expanded : raw;

  TrainOptions opts;
  opts.ridge_lambda = a.ridge;
  opts.smoothing_alpha = a.smoothing;
  opts.path = parse_path(a.path);
  RenyiModel model = train(data, opts);
  model.label_column = a.label;
  if (a.pairs) {
    model.input_schema = raw.schema();
    model.pairs = pairs;
  }
  if (!a.out.empty()) save_model(model, a.out);

  put("n", data.size());
  put("features", data.num_features());
  put("width", data.schema().total_width());
  put("q0", model.q0);
  put("gamma", model.gamma);
  put("error_bound", error_upper_bound(model));
  put("separable", model.separable);
  put("h_plus", model.h_plus);
  put("h_minus", model.h_minus);
  put("hgr_lower_bound", model.hgr_lower_bound());
  return kOk;
}

// ---------------------------------------------------------- predict/evaluate

struct ApplyArgs {
  std::string model;
  std::string data;
  std::string mode = "map";
  std::uint64_t seed = 0;
  bool strict = false;
  std::string out;
};

EvalMode parse_mode(const std::string& name) {
  if (name == "randomized-analytic") return EvalMode::RandomizedAnalytic;
  if (name == "randomized-sampled") return EvalMode::RandomizedSampled;
  return EvalMode::Map;
}

/// Reads rows the way the model's training input was read, expanding pair
/// features when the model uses them.
Dataset load_for_model(const RenyiModel& model, const std::string& path, bool strict, bool need_labels) {
  IngestOptions ingest;
  ingest.label_column = model.label_column;
  ingest.schema_hint = model.input_schema ? *model.input_schema : model.schema;
  ingest.permissive = !strict;
  ingest.label_names = model.label_names;
  ingest.label_optional = !need_labels;
  Dataset data = ingest_csv(path, ingest);
  if (model.input_schema) data = expand_pairs(data, model.pairs);
  return data;
}

int cmd_predict(const ApplyArgs& a) {
  const RenyiModel model = load_model(a.model);
  const Dataset data = load_for_model(model, a.data, a.strict, false);
  const UnseenPolicy policy = a.strict ? UnseenPolicy::Strict : UnseenPolicy::Permissive;
  const EvalMode mode = parse_mode(a.mode);
  std::ostringstream out;
  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto row = data.row(r);
    switch (mode) {
      case EvalMode::Map: {
        const auto y = decide_map(model, row, policy);
        out << (y == 0 ? model.label_names.first : model.label_names.second) << '\n';
        break;
      }
      case EvalMode::RandomizedSampled: {
        const auto y = decide_randomized(model, row, a.seed, r, policy);
        out << (y == 0 ? model.label_names.first : model.label_names.second) << '\n';
        break;
      }
      case EvalMode::RandomizedAnalytic:
        out << format_real(predict_conditional(model, row, policy).prob_predict_0) << '\n';
        break;
    }
  }
  if (a.out.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream file(a.out, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorKind::Io, "cannot write '" + a.out + "'");
    file << out.str();
  }
  return kOk;
}

int cmd_evaluate(const ApplyArgs& a) {
  const RenyiModel model = load_model(a.model);
  const Dataset data = load_for_model(model, a.data, a.strict, true);
  const UnseenPolicy policy = a.strict ? UnseenPolicy::Strict : UnseenPolicy::Permissive;
  const Evaluation e = evaluate(model, data, parse_mode(a.mode), a.seed, policy);
  put("mode", a.mode);
  put("n", data.size());
  put("error_rate", e.error_rate);
  put("error_rate_label0", e.per_class[0]);
  put("error_rate_label1", e.per_class[1]);
  put("count_label0", e.class_counts[0]);
  put("count_label1", e.class_counts[1]);
  return kOk;
}

// --------------------------------------------------------------- select

struct SelectArgs {
  std::string data;
  std::string label;
  std::optional<double> lambda;
  std::string path;
  double rho = 1.0;
  double tol_abs = 1e-6;
  double tol_rel = 1e-4;
  std::size_t max_iter = 10'000;
  std::optional<std::size_t> top_k;
  bool balance = false;
  bool pairs = false;
};

std::string selected_names(const SelectionResult& r, const CategoricalSchema& schema) {
  if (r.selected.empty()) return "(none)";
  std::string names;
  for (std::size_t i : r.selected) {
    if (!names.empty()) names += ',';
    names += schema.feature(i).name;
  }
  return names;
}

int cmd_select(const SelectArgs& a) {
  if (!a.lambda && a.path.empty()) throw Error(ErrorKind::InvalidArgument, "give --lambda or --path");
  if (a.lambda && !a.path.empty()) throw Error(ErrorKind::InvalidArgument, "--lambda and --path are exclusive");
  IngestOptions ingest;
  ingest.label_column = a.label;
  Dataset data = ingest_csv(a.data, ingest);
  if (a.pairs) data = expand_pairs(data);
  const auto& schema = data.schema();

  AdmmOptions opts;
  opts.rho = a.rho;
  opts.tol_abs = a.tol_abs;
  opts.tol_rel = a.tol_rel;
  opts.max_iter = a.max_iter;
  opts.residual_balancing = a.balance;
  opts.top_k = a.top_k;
  opts.record_trace = false;

  if (a.lambda) {
    const SelectionResult r = select_saa(data, *a.lambda, opts);
    put("lambda", r.lambda);
    put("converged", r.converged);
    put("iterations", r.admm_stats.iterations);
    put("primal_residual", r.admm_stats.primal_residual);
    put("dual_residual", r.admm_stats.dual_residual);
    put("final_rho", r.admm_stats.final_rho);
    put("objective", r.objective);
    put("selected_count", r.selected.size());
    for (std::size_t i = 0; i < schema.num_features(); ++i) put("block_norm." + schema.feature(i).name, r.block_norms[i]);
    std::cout << "selected: " << selected_names(r, schema) << '\n';
    return r.converged ? kOk : kNumerical;
  }

  // L1:L2:N
  std::vector<std::string> parts;
  std::stringstream ss(a.path);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() != 3) throw Error(ErrorKind::InvalidArgument, "--path expects L1:L2:N");
  double lo = 0.0;
  double hi = 0.0;
  long long count = 0;
  try {
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
    count = std::stoll(parts[2]);
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, "--path expects L1:L2:N");
  }
  if (!(lo > 0.0) || !(hi > 0.0)) throw Error(ErrorKind::NonPositiveLambda, "path endpoints must be positive");
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "path needs at least one point");
  bool all_converged = true;
  for (double lambda : log_grid(lo, hi, static_cast<std::size_t>(count))) {
    const SelectionResult r = select_saa(data, lambda, opts);
    all_converged = all_converged && r.converged;
    std::cout << "lambda=" << format_real(lambda) << " selected_count=" << r.selected.size()
              << " converged=" << (r.converged ? "true" : "false") << " objective=" << format_real(r.objective)
              << " selected=" << selected_names(r, schema) << '\n';
  }
  return all_converged ? kOk : kNumerical;
}

// --------------------------------------------------------------- oracle

struct OracleArgs {
  std::string instance;
  std::string random;
  double tol = 1e-7;
  std::string rule = "renyi";
  std::string model;
  std::string model_mode = "randomized";
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::size_t d = 2;
  std::size_t m = 2;
  std::string mode = "generic";
  double slack = 1e-6;
};

JointDistribution load_instance(const OracleArgs& a) {
  if (a.instance.empty() == a.random.empty()) {
    throw Error(ErrorKind::InvalidArgument, "give exactly one of --instance and --random");
  }
  if (!a.instance.empty()) return read_instance_file(a.instance);
  const RandomSpec spec = parse_random_spec(a.random);
  return random_instance(spec.seed, spec.d, spec.m, spec.mode);
}

MarginalConstraints constraints_of(const JointDistribution& p) { return build_constraints(from_joint(p)); }

int cmd_estar(const OracleArgs& a) {
  const auto cons = constraints_of(load_instance(a));
  put("e_star", solve_estar(cons).e_star);
  return kOk;
}

int cmd_theta(const OracleArgs& a) {
  const auto cons = constraints_of(load_instance(a));
  ThetaOptions opts;
  opts.tol = a.tol;
  const ThetaResult t = solve_theta(cons, opts);
  put("theta", t.theta);
  put("gap", t.gap);
  put("iterations", t.iterations);
  put("polished", t.polished);
  return kOk;
}

int cmd_worst_case(const OracleArgs& a) {
  const JointDistribution p = load_instance(a);
  const auto cons = constraints_of(p);
  DecisionRule rule;
  std::string label;
  if (!a.model.empty()) {
    const RenyiModel model = load_model(a.model);
    if (model.schema.cardinalities() != p.schema().cardinalities()) {
      throw Error(ErrorKind::DimensionMismatch, "model schema does not match the instance");
    }
    rule = a.model_mode == "map" ? tabulate_map_rule(model) : tabulate_randomized_rule(model);
    label = "model-" + a.model_mode;
  } else if (a.rule == "uniform") {
    rule.q_delta = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(p.num_configurations()), 0.5);
    label = a.rule;
  } else {
    ThetaOptions opts;
    opts.tol = a.tol;
    const ThetaResult t = solve_theta(cons, opts);
    rule = a.rule == "map" ? map_rule_of(t.p_tilde) : renyi_rule_of(t.p_tilde);
    label = a.rule;
  }
  put("rule", label);
  put("worst_case_error", worst_case_error(cons, rule));
  return kOk;
}

int cmd_hgr(const OracleArgs& a) {
  const JointDistribution p = load_instance(a);
  const PairwiseMarginals marg = from_joint(p);
  const QuadSolution sol = solve_population(marg, 0.0);
  const HgrBound bound = min_hgr_bound(marg, sol);
  put("hgr_binary", hgr_binary(p));
  put("hgr_bruteforce", hgr_bruteforce(p));
  put("gamma", sol.gamma);
  put("hgr_lower_bound", bound.bound);
  put("certified_tight", bound.certified_tight);
  return kOk;
}

struct Check {
  const char* name;
  double lhs;
  double rhs;  // holds when lhs <= rhs + slack
  double slack;
};

int cmd_verify(const OracleArgs& a) {
  const InstanceMode mode = parse_instance_mode(a.mode);
  ThetaOptions opts;
  opts.tol = a.tol;
  std::size_t violations = 0;
  // Largest lhs - rhs over the sandwich links (those checked against --slack).
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < a.trials; ++t) {
    const JointDistribution p = random_instance(a.seed + t, a.d, a.m, mode);
    const auto cons = constraints_of(p);
    const double e_star = solve_estar(cons).e_star;
    const ThetaResult th = solve_theta(cons, opts);
    const double e_tilde = worst_case_error(cons, renyi_rule_of(th.p_tilde));
    const double e_map = worst_case_error(cons, map_rule_of(th.p_tilde));
    std::vector<Check> checks{
        {"theta<=e_tilde", th.theta, e_tilde, a.slack},
        {"e_tilde<=2theta", e_tilde, 2.0 * th.theta, a.slack},
        {"2theta<=2e_star", 2.0 * th.theta, 2.0 * e_star, a.slack},
        {"e_star<=e_map", e_star, e_map, a.slack},
        {"e_map<=4e_star", e_map, 4.0 * e_star, a.slack},
    };
    const double q0 = p.prob_y0();
    if (q0 > 0.0 && q0 < 1.0) {
      const double gap = std::abs(hgr_bruteforce(p) - hgr_binary(p));
      checks.push_back({"hgr_bruteforce==hgr_binary", gap, 0.0, 1e-8});
      checks.push_back({"hgr(p_tilde)<=hgr(p)", hgr_binary(th.p_tilde), hgr_binary(p), 1e-5});
    }
    std::mt19937_64 rng(a.seed + t);
    for (int k = 0; k < 3; ++k) {
      DecisionRule rule;
      rule.q_delta.resize(static_cast<Eigen::Index>(p.num_configurations()));
      for (Eigen::Index x = 0; x < rule.q_delta.size(); ++x) {
        rule.q_delta[x] = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      }
      checks.push_back({"e_star<=worst_case(random rule)", e_star, worst_case_error(cons, rule), a.slack});
    }
    bool failed = false;
    for (const auto& c : checks) {
      if (c.slack == a.slack) worst = std::max(worst, c.lhs - c.rhs);
      if (c.lhs > c.rhs + c.slack) {
        failed = true;
        std::cout << "violation: trial=" << t << " check=" << c.name << " lhs=" << format_real(c.lhs)
                  << " rhs=" << format_real(c.rhs) << '\n';
      }
    }
    if (failed) {
      ++violations;
      std::cout << write_instance(p);
    }
  }
  put("trials", a.trials);
  put("violations", violations);
  put("worst_excess", worst);
  return violations == 0 ? kOk : kCheckFailed;
}

// ------------------------------------------------------- experiment-synthetic

int cmd_synthetic(const SyntheticConfig& config, bool per_run) {
  const SyntheticReport report = run_synthetic(config);
  put("runs", config.runs);
  put("mean_error", report.mean_error);
  if (per_run) {
    for (std::size_t r = 0; r < report.errors.size(); ++r) put("error." + std::to_string(r), report.errors[r]);
  }
  // Wall-clock numbers vary run to run, so they stay off standard output.
  std::cerr << "mean_train_seconds=" << format_real(report.mean_seconds) << '\n';
  return kOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Robust classification and feature selection from pairwise marginals"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Fit the classifier on a labelled CSV file");
  train_cmd->add_option("--data", train_args.data, "CSV file with a header row")->required();
  train_cmd->add_option("--label", train_args.label, "Label column name")->required();
  train_cmd->add_option("--ridge", train_args.ridge, "Ridge penalty (>= 0)")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--smoothing", train_args.smoothing, "Pseudo-count smoothing (>= 0)")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_flag("--pairs", train_args.pairs, "Train on all pair features (X_i, X_j)");
  train_cmd->add_option("--out", train_args.out, "Model file to write");
  train_cmd->add_option("--path", train_args.path, "Linear system: auto, normal or gram")
      ->check(CLI::IsMember({"auto", "normal", "gram"}));

  ApplyArgs predict_args;
  ApplyArgs evaluate_args;
  auto add_apply = [](CLI::App* cmd, ApplyArgs& a) {
    cmd->add_option("--model", a.model, "Model file")->required();
    cmd->add_option("--data", a.data, "CSV file")->required();
    cmd->add_option("--mode", a.mode, "map, randomized-analytic or randomized-sampled")
        ->check(CLI::IsMember({"map", "randomized-analytic", "randomized-sampled"}));
    cmd->add_option("--seed", a.seed, "Seed for randomized-sampled");
    cmd->add_flag("--strict", a.strict, "Fail on categories the model has not seen");
  };
  auto* predict_cmd = app.add_subcommand("predict", "One prediction per row");
  add_apply(predict_cmd, predict_args);
  predict_cmd->add_option("--out", predict_args.out, "Write predictions here instead of standard output");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Error rate on a labelled CSV file");
  add_apply(evaluate_cmd, evaluate_args);

  SelectArgs select_args;
  auto* select_cmd = app.add_subcommand("select", "Group-lasso feature selection");
  select_cmd->add_option("--data", select_args.data, "CSV file")->required();
  select_cmd->add_option("--label", select_args.label, "Label column name")->required();
  select_cmd->add_option("--lambda", select_args.lambda, "Regularisation weight (> 0)")->check(CLI::PositiveNumber);
  select_cmd->add_option("--path", select_args.path, "Log-spaced sweep L1:L2:N");
  select_cmd->add_option("--rho", select_args.rho, "ADMM penalty")->check(CLI::PositiveNumber);
  select_cmd->add_option("--tol-abs", select_args.tol_abs)->check(CLI::NonNegativeNumber);
  select_cmd->add_option("--tol-rel", select_args.tol_rel)->check(CLI::NonNegativeNumber);
  select_cmd->add_option("--max-iter", select_args.max_iter)->check(CLI::PositiveNumber);
  select_cmd->add_option("--top-k", select_args.top_k, "Keep the k largest blocks");
  select_cmd->add_flag("--balance", select_args.balance, "Residual balancing of rho");
  select_cmd->add_flag("--pairs", select_args.pairs, "Select among pair features");

  OracleArgs oracle_args;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact computations on enumerable instances");
  oracle_cmd->require_subcommand(1);
  auto add_source = [&](CLI::App* cmd) {
    cmd->add_option("--instance", oracle_args.instance, "Instance dump file");
    cmd->add_option("--random", oracle_args.random, "seed,d,m,mode");
  };
  auto* estar_cmd = oracle_cmd->add_subcommand("estar", "Minimax error e*");
  add_source(estar_cmd);
  auto* theta_cmd = oracle_cmd->add_subcommand("theta", "Harmonic surrogate theta");
  add_source(theta_cmd);
  theta_cmd->add_option("--tol", oracle_args.tol, "Frank-Wolfe gap")->check(CLI::PositiveNumber);
  auto* worst_cmd = oracle_cmd->add_subcommand("worst-case", "Worst-case error of a rule");
  add_source(worst_cmd);
  worst_cmd->add_option("--rule", oracle_args.rule, "renyi, map or uniform")
      ->check(CLI::IsMember({"renyi", "map", "uniform"}));
  worst_cmd->add_option("--model", oracle_args.model, "Use a trained model's rule instead");
  worst_cmd->add_option("--model-mode", oracle_args.model_mode, "randomized or map")
      ->check(CLI::IsMember({"randomized", "map"}));
  worst_cmd->add_option("--tol", oracle_args.tol, "Frank-Wolfe gap")->check(CLI::PositiveNumber);
  auto* hgr_cmd = oracle_cmd->add_subcommand("hgr", "Maximal correlation and its marginal bound");
  add_source(hgr_cmd);
  auto* verify_cmd = oracle_cmd->add_subcommand("verify", "Check the error sandwiches on random instances");
  verify_cmd->add_option("--trials", oracle_args.trials)->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", oracle_args.seed);
  verify_cmd->add_option("--d", oracle_args.d)->check(CLI::Range(1, 3));
  verify_cmd->add_option("--m", oracle_args.m)->check(CLI::Range(1, 3));
  verify_cmd->add_option("--mode", oracle_args.mode)->check(CLI::IsMember({"generic", "separable", "deterministic"}));
  verify_cmd->add_option("--tol", oracle_args.tol, "Frank-Wolfe gap")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--slack", oracle_args.slack, "Allowed violation")->check(CLI::NonNegativeNumber);

  SyntheticConfig synth;
  bool per_run = false;
  auto* synth_cmd = app.add_subcommand("experiment-synthetic", "Monte-Carlo run on Bernoulli features");
  synth_cmd->add_option("--d", synth.d)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--n", synth.n)->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  synth_cmd->add_option("--bern", synth.bern)->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--nonzero-frac", synth.nonzero_frac)->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--ridge", synth.ridge)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--runs", synth.runs)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--train-frac", synth.train_frac)->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--threads", synth.threads, "Worker threads (0: automatic)");
  synth_cmd->add_flag("--per-run", per_run, "Print every run's test error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train_args);
    if (*predict_cmd) return cmd_predict(predict_args);
    if (*evaluate_cmd) return cmd_evaluate(evaluate_args);
    if (*select_cmd) return cmd_select(select_args);
    if (*estar_cmd) return cmd_estar(oracle_args);
    if (*theta_cmd) return cmd_theta(oracle_args);
    if (*worst_cmd) return cmd_worst_case(oracle_args);
    if (*hgr_cmd) return cmd_hgr(oracle_args);
    if (*verify_cmd) return cmd_verify(oracle_args);
    if (*synth_cmd) return cmd_synthetic(synth, per_run);
  } catch (const Error& e) {
    std::cout.flush();
    std::cerr << "renyi: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cout.flush();
    std::cerr << "renyi: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
