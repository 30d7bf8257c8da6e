#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace renyi {

/// Binary features X_i ~ Bernoulli(bern), a sparse standard-normal weight
/// vector alpha and labels 1{alpha'x + noise >= 0}; the classifier is trained
/// on the first train_frac of the rows and scored (MAP) on the rest.
struct SyntheticConfig {
  std::size_t d = 10'000;
  std::size_t n = 200;
  double bern = 0.7;
  double nonzero_frac = 0.3;
  double ridge = 1e4;
  std::size_t runs = 1'000;
  double train_frac = 0.85;
  std::uint64_t seed = 0;
  /// Worker threads; 0 means hardware concurrency capped by RENYI_THREADS.
  std::size_t threads = 0;
};

struct SyntheticRun {
  double test_error = 0.0;
  double train_seconds = 0.0;
};

struct SyntheticReport {
  std::vector<double> errors;  // per run, in run order
  std::vector<double> seconds;
  double mean_error = 0.0;
  double mean_seconds = 0.0;
};

/// Run `run_index` uses the generator seeded with seed + run_index, so the
/// result does not depend on scheduling.
SyntheticRun synthetic_run(const SyntheticConfig& config, std::size_t run_index);

SyntheticReport run_synthetic(const SyntheticConfig& config);

/// min(requested or hardware concurrency, RENYI_THREADS if set), at least 1.
std::size_t worker_count(std::size_t requested = 0);

}  // namespace renyi
