#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "renyi/error.hpp"
#include "renyi/feature_select.hpp"
#include "renyi/marginals.hpp"
#include "renyi/oracle.hpp"
#include "renyi/renyi_core.hpp"

using namespace renyi;
using oracle_ref::error_kind;

namespace {

JointDistribution random_joint(std::mt19937_64& rng, const std::vector<std::size_t>& cards) {
  std::exponential_distribution<double> expo;
  const auto schema = CategoricalSchema::with_cardinalities(cards);
  Eigen::VectorXd v(static_cast<Eigen::Index>(2 * schema.configuration_count()));
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = expo(rng);
  return JointDistribution(schema, v / v.sum());
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index k = 0; k < n; ++k) v[k] = scale * normal(rng);
  return v;
}

}  // namespace

TEST_CASE("prox of the max norm on worked inputs") {
  CHECK((prox_linf(Eigen::Vector2d(3.0, 1.0), 1.0) - Eigen::Vector2d(2.0, 1.0)).norm() < 1e-14);
  CHECK(prox_linf(Eigen::Vector3d(0.2, -0.3, 0.1), 1.0).norm() == 0.0);
  CHECK(prox_linf(Eigen::Vector2d::Zero(), 0.5).norm() == 0.0);
  CHECK(error_kind([] { prox_linf(Eigen::Vector2d(1.0, 0.0), 0.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("l1-ball projection on worked inputs") {
  CHECK((project_l1_ball(Eigen::Vector2d(3.0, 1.0), 1.0) - Eigen::Vector2d(1.0, 0.0)).norm() < 1e-14);
  CHECK((project_l1_ball(Eigen::Vector2d(0.2, -0.1), 1.0) - Eigen::Vector2d(0.2, -0.1)).norm() == 0.0);
  CHECK((project_l1_ball(Eigen::Vector2d(2.0, 2.0), 2.0) - Eigen::Vector2d(1.0, 1.0)).norm() < 1e-14);
}

TEST_CASE("prox matches a one-dimensional search") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::VectorXd v = random_vector(rng, 1 + static_cast<Eigen::Index>(rng() % 3), 2.0);
    const double t = u(rng);
    const Eigen::VectorXd got = prox_linf(v, t);
    const Eigen::VectorXd ref = oracle_ref::prox_linf_reference(v, t);
    CHECK(oracle_ref::prox_value(got, v, t) <= oracle_ref::prox_value(ref, v, t) + 1e-8);
    CHECK((got - ref).lpNorm<Eigen::Infinity>() < 1e-8);
  }
}

TEST_CASE("projection is feasible, idempotent and matches bisection") {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::VectorXd v = random_vector(rng, 1 + static_cast<Eigen::Index>(rng() % 6), 2.0);
    const double r = u(rng);
    const Eigen::VectorXd p = project_l1_ball(v, r);
    CHECK(p.lpNorm<1>() <= r + 1e-12);
    CHECK((project_l1_ball(p, r) - p).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((p - oracle_ref::project_l1_reference(v, r)).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("block max norm") {
  const auto s = CategoricalSchema::uniform(2, 2);
  CHECK(group_linf_norm(Eigen::Vector4d(1, -2, 0.5, 0), s) == 2.5);
}

TEST_CASE("selection extremes on the single-feature instance") {
  const PairwiseMarginals m = from_joint(JointDistribution(CategoricalSchema::uniform(1, 2), Eigen::Vector4d(0.1, 0.4, 0.4, 0.1)));
  const SelectionResult big = select(m, m.d.lpNorm<1>() * 1.01);
  CHECK(big.z_rfs.norm() == 0.0);
  CHECK(big.selected.empty());

  AdmmOptions tight;
  tight.tol_abs = 1e-10;
  tight.tol_rel = 1e-10;
  const SelectionResult tiny = select(m, 1e-8, tight);
  CHECK((tiny.z_rfs - Eigen::Vector2d(0.3, -0.3)).lpNorm<Eigen::Infinity>() < 1e-6);
  CHECK(tiny.selected == std::vector<std::size_t>{0});
  CHECK(error_kind([&] { select(m, 0.0); }) == ErrorKind::NonPositiveLambda);
  CHECK(error_kind([&] { select(m, -1.0); }) == ErrorKind::NonPositiveLambda);
}

TEST_CASE("an independent feature is never selected") {
  // P(x1, x2, y) = P(x1, y) P(x2) with P(Y = 0) = 1/2, so the second block of d
  // vanishes and Q's cross block is a product.
  const Eigen::Vector4d base(0.15, 0.35, 0.35, 0.15);  // P(x1, y)
  const Eigen::Vector3d px2(0.2, 0.5, 0.3);
  const auto schema = CategoricalSchema::with_cardinalities(std::vector<std::size_t>{2, 3});
  Eigen::VectorXd v(12);
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 3; ++x2)
      for (int y = 0; y < 2; ++y) v[2 * (3 * x1 + x2) + y] = base[2 * x1 + y] * px2[x2];
  const PairwiseMarginals m = from_joint(JointDistribution(schema, v));
  REQUIRE(m.d.tail(3).norm() < 1e-15);
  bool first_seen = false;
  for (double lambda : log_grid(1e-4, 1.0, 20)) {
    const SelectionResult r = select(m, lambda);
    for (std::size_t f : r.selected) CHECK(f == 0);
    first_seen = first_seen || !r.selected.empty();
  }
  CHECK(first_seen);
}

TEST_CASE("ADMM reaches the exact group-lasso minimum") {
  std::mt19937_64 rng(103);
  const std::vector<std::vector<std::size_t>> shapes{{2, 2}, {4}, {3}, {2}, {1, 3}, {3, 1}};
  std::uniform_real_distribution<double> lam(-3.0, 0.0);
  for (int k = 0; k < 20; ++k) {
    const auto& cards = shapes[static_cast<std::size_t>(k) % shapes.size()];
    const PairwiseMarginals m = from_joint(random_joint(rng, cards));
    const double lambda = std::pow(10.0, lam(rng));
    const SelectionResult r = select(m, lambda);
    const auto best = oracle_ref::exhaustive_group_lasso(m.Q, m.d, cards, lambda);
    const double got = selection_objective(m, r.z_rfs, lambda);
    CHECK(r.converged);
    CHECK(got == doctest::Approx(r.objective).epsilon(1e-12));
    CHECK(got <= best.value + 1e-6);
    CHECK(got >= best.value - 1e-9);
  }
}

TEST_CASE("selected count shrinks along the regularisation path") {
  std::mt19937_64 rng(104);
  for (int path = 0; path < 5; ++path) {
    const PairwiseMarginals m = from_joint(random_joint(rng, {2, 3, 2}));
    const auto grid = log_grid(1e-4, 1.0, 20);
    std::size_t previous = std::numeric_limits<std::size_t>::max();
    int violations = 0;
    for (double lambda : grid) {
      const std::size_t count = select(m, lambda).selected.size();
      if (count > previous) {
        ++violations;
        MESSAGE("path " << path << ": " << count << " selected at lambda " << lambda << " after " << previous);
      }
      previous = count;
    }
    CHECK(violations <= 1);
  }
}

TEST_CASE("restricted gamma bounds the restricted worst-case error up to a factor two") {
  std::mt19937_64 rng(105);
  for (int trial = 0; trial < 10; ++trial) {
    const PairwiseMarginals m = from_joint(random_joint(rng, {2, 2, 3}));
    const MarginalConstraints c = build_constraints(m);
    for (unsigned mask = 0; mask < 8; ++mask) {
      std::vector<std::size_t> subset;
      for (std::size_t i = 0; i < 3; ++i) {
        if (mask & (1u << i)) subset.push_back(i);
      }
      const double F = restricted_worst_case_error(c, subset);
      CHECK(F <= 2.0 * restricted_gamma(m, subset) + 1e-6);
    }
  }
}

TEST_CASE("restricted gamma alone can sit below the restricted worst-case error") {
  // Independent label with an even prior: gamma = 1/4 while no rule beats 1/2.
  const JointDistribution p(CategoricalSchema::uniform(2, 2), Eigen::VectorXd::Constant(8, 0.125));
  const PairwiseMarginals m = from_joint(p);
  const std::vector<std::size_t> all{0, 1};
  CHECK(restricted_gamma(m, all) == doctest::Approx(0.25));
  CHECK(restricted_worst_case_error(build_constraints(m), all) == doctest::Approx(0.5));
}

TEST_CASE("sample selection") {
  const Dataset ten = oracle_ref::ten_sample_dataset();
  AdmmOptions tight;
  tight.tol_abs = 1e-10;
  tight.tol_rel = 1e-10;
  const SelectionResult r = select_saa(ten, 1e-8, tight);
  CHECK(r.selected == std::vector<std::size_t>{0});
  CHECK((r.z_rfs - select(estimate(ten), 1e-8, tight).z_rfs).lpNorm<Eigen::Infinity>() < 1e-8);
  CHECK(error_kind([&] { select_saa(ten, 0.0); }) == ErrorKind::NonPositiveLambda);
}

TEST_CASE("sample selection through the row-count system") {
  // Width 20 with 8 rows takes the Woodbury z-update.
  std::mt19937_64 rng(106);
  AdmmOptions tight;
  tight.tol_abs = 1e-10;
  tight.tol_rel = 1e-10;
  for (int trial = 0; trial < 5; ++trial) {
    const Dataset data = oracle_ref::random_dataset(rng, 8, {5, 5, 5, 5});
    const SelectionResult a = select_saa(data, 0.02, tight);
    const SelectionResult b = select(estimate(data), 0.02, tight);
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-7));
    CHECK(a.selected == b.selected);
  }
}

TEST_CASE("pure-noise labels select nothing at a moderate penalty") {
  // Under independence each entry of d has standard deviation about
  // sqrt(P(x = k) / n), so with three balanced categories ||d_block||_1 stays
  // below 2 * 3 * sqrt(1 / (3 n)) with high probability.
  const std::size_t n = 200;
  const double lambda = 2.0 * 3.0 * std::sqrt(1.0 / (3.0 * static_cast<double>(n)));
  std::mt19937_64 rng(107);
  const Dataset base = oracle_ref::random_dataset(rng, n, {3, 3, 3});
  int empty = 0;
  const int shuffles = 50;
  for (int s = 0; s < shuffles; ++s) {
    std::vector<std::uint8_t> y = base.labels();
    std::shuffle(y.begin(), y.end(), rng);
    const Dataset shuffled(base.schema(), base.codes(), y);
    empty += select_saa(shuffled, lambda).selected.empty();
  }
  CHECK(empty >= static_cast<int>(0.9 * shuffles));
}

TEST_CASE("top-k keeps the largest blocks") {
  std::mt19937_64 rng(108);
  const PairwiseMarginals m = from_joint(random_joint(rng, {2, 2, 2}));
  AdmmOptions opts;
  opts.top_k = 1;
  const SelectionResult all = select(m, 1e-4);
  const SelectionResult one = select(m, 1e-4, opts);
  REQUIRE(all.selected.size() >= 1);
  CHECK(one.selected.size() == 1);
  const auto it = std::max_element(all.block_norms.begin(), all.block_norms.end());
  CHECK(one.selected[0] == static_cast<std::size_t>(it - all.block_norms.begin()));
}

TEST_CASE("residual balancing reaches the same minimum") {
  std::mt19937_64 rng(109);
  const PairwiseMarginals m = from_joint(random_joint(rng, {2, 2}));
  AdmmOptions opts;
  opts.residual_balancing = true;
  opts.rho = 50.0;
  const SelectionResult r = select(m, 0.01, opts);
  const auto best = oracle_ref::exhaustive_group_lasso(m.Q, m.d, {2, 2}, 0.01);
  CHECK(r.objective <= best.value + 1e-6);
}

TEST_CASE("log-spaced grid") {
  const auto g = log_grid(1e-3, 1.0, 4);
  REQUIRE(g.size() == 4);
  CHECK(g[0] == doctest::Approx(1e-3));
  CHECK(g[1] == doctest::Approx(1e-2));
  CHECK(g[3] == doctest::Approx(1.0));
}
