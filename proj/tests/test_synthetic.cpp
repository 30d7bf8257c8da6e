#include <doctest.h>

#include "oracles.hpp"
#include "renyi/error.hpp"
#include "renyi/synthetic.hpp"

using namespace renyi;
using oracle_ref::error_kind;

namespace {

SyntheticConfig small_config() {
  SyntheticConfig c;
  c.d = 500;
  c.n = 100;
  c.runs = 20;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("synthetic runs do not depend on scheduling") {
  SyntheticConfig one = small_config();
  one.threads = 1;
  SyntheticConfig many = small_config();
  many.threads = 4;
  const SyntheticReport a = run_synthetic(one);
  const SyntheticReport b = run_synthetic(many);
  CHECK(a.errors == b.errors);
  CHECK(synthetic_run(one, 5).test_error == a.errors[5]);
  CHECK(a.mean_error >= 0.0);
  CHECK(a.mean_error <= 1.0);
}

TEST_CASE("pure-noise labels give chance-level error") {
  SyntheticConfig c;
  c.d = 2000;
  c.runs = 100;
  c.nonzero_frac = 0.0;
  const double mean = run_synthetic(c).mean_error;
  CHECK(mean >= 0.47);
  CHECK(mean <= 0.53);
}

TEST_CASE("synthetic configuration checks") {
  SyntheticConfig c = small_config();
  c.train_frac = 1.0;
  CHECK(error_kind([&] { run_synthetic(c); }) == ErrorKind::InvalidArgument);
  c = small_config();
  c.ridge = 0.0;
  CHECK(error_kind([&] { run_synthetic(c); }) == ErrorKind::InvalidArgument);
  c = small_config();
  c.bern = 1.5;
  CHECK(error_kind([&] { run_synthetic(c); }) == ErrorKind::InvalidArgument);
}
