#include "renyi/synthetic.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <thread>

#include "renyi/classifier.hpp"
#include "renyi/error.hpp"
#include "renyi/schema.hpp"

namespace renyi {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Box-Muller; spelled out so draws match across standard libraries.
double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

void check_config(const SyntheticConfig& c) {
  if (c.d == 0 || c.n < 2) throw Error(ErrorKind::InvalidArgument, "need d >= 1 and n >= 2");
  if (!(c.bern >= 0.0 && c.bern <= 1.0)) throw Error(ErrorKind::InvalidArgument, "bern must lie in [0, 1]");
  if (!(c.nonzero_frac >= 0.0 && c.nonzero_frac <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "nonzero-frac must lie in [0, 1]");
  }
  if (!(c.ridge > 0.0) || !std::isfinite(c.ridge)) throw Error(ErrorKind::InvalidArgument, "ridge must be positive");
  if (!(c.train_frac > 0.0 && c.train_frac < 1.0)) throw Error(ErrorKind::InvalidArgument, "train-frac must lie in (0, 1)");
  const auto train = static_cast<std::size_t>(std::llround(c.train_frac * static_cast<double>(c.n)));
  if (train == 0 || train >= c.n) throw Error(ErrorKind::InvalidArgument, "train-frac leaves an empty split");
}

}  // namespace

SyntheticRun synthetic_run(const SyntheticConfig& config, std::size_t run_index) {
  check_config(config);
  std::mt19937_64 rng(config.seed + run_index);
  const std::size_t d = config.d;
  const std::size_t n = config.n;

  std::vector<Category> codes(n * d);
  for (auto& code : codes) code = uniform01(rng) < config.bern ? 2 : 1;  // value 1 -> code 2

  // Exactly round(nonzero_frac * d) nonzero weights at random positions.
  const auto nonzero = static_cast<std::size_t>(std::llround(config.nonzero_frac * static_cast<double>(d)));
  std::vector<std::size_t> positions(d);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  for (std::size_t k = 0; k < nonzero; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(d - k));
    std::swap(positions[k], positions[std::min(j, d - 1)]);
  }
  std::vector<double> alpha(d, 0.0);
  for (std::size_t k = 0; k < nonzero; ++k) alpha[positions[k]] = standard_normal(rng);

  std::vector<std::uint8_t> labels(n);
  for (std::size_t r = 0; r < n; ++r) {
    double s = standard_normal(rng);
    for (std::size_t i = 0; i < d; ++i) s += codes[r * d + i] == 2 ? alpha[i] : 0.0;
    labels[r] = s >= 0.0 ? 1 : 0;  // sign 0 maps to label 1
  }

  const auto n_train = static_cast<std::size_t>(std::llround(config.train_frac * static_cast<double>(n)));
  const CategoricalSchema schema = CategoricalSchema::uniform(d, 2);
  Dataset train_set(schema, std::vector<Category>(codes.begin(), codes.begin() + static_cast<std::ptrdiff_t>(n_train * d)),
                    std::vector<std::uint8_t>(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_train)));
  Dataset test_set(schema, std::vector<Category>(codes.begin() + static_cast<std::ptrdiff_t>(n_train * d), codes.end()),
                   std::vector<std::uint8_t>(labels.begin() + static_cast<std::ptrdiff_t>(n_train), labels.end()));

  TrainOptions opts;
  opts.ridge_lambda = config.ridge;
  opts.path = SaaPath::Gram;
  const auto start = std::chrono::steady_clock::now();
  const RenyiModel model = train(train_set, opts);
  const auto stop = std::chrono::steady_clock::now();

  SyntheticRun out;
  out.train_seconds = std::chrono::duration<double>(stop - start).count();
  out.test_error = evaluate(model, test_set, EvalMode::Map).error_rate;
  return out;
}

std::size_t worker_count(std::size_t requested) {
  std::size_t count = requested ? requested : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("RENYI_THREADS")) {
    const long long v = std::atoll(cap);
    if (v > 0) count = std::min(count, static_cast<std::size_t>(v));
  }
  return std::max<std::size_t>(count, 1);
}

SyntheticReport run_synthetic(const SyntheticConfig& config) {
  check_config(config);
  SyntheticReport report;
  report.errors.assign(config.runs, 0.0);
  report.seconds.assign(config.runs, 0.0);
  const std::size_t workers = std::min(worker_count(config.threads), std::max<std::size_t>(config.runs, 1));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t r = next++; r < config.runs && !failed; r = next++) {
      try {
        const SyntheticRun run = synthetic_run(config, r);
        report.errors[r] = run.test_error;
        report.seconds[r] = run.train_seconds;
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  if (config.runs > 0) {
    report.mean_error = std::accumulate(report.errors.begin(), report.errors.end(), 0.0) / static_cast<double>(config.runs);
    report.mean_seconds =
        std::accumulate(report.seconds.begin(), report.seconds.end(), 0.0) / static_cast<double>(config.runs);
  }
  return report;
}

}  // namespace renyi
