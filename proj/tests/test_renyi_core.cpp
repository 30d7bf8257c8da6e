#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "renyi/marginals.hpp"
#include "renyi/oracle.hpp"
#include "renyi/renyi_core.hpp"

using namespace renyi;

namespace {

JointDistribution joint_d1() { return JointDistribution(CategoricalSchema::uniform(1, 2), Eigen::Vector4d(0.1, 0.4, 0.4, 0.1)); }

JointDistribution random_joint(std::mt19937_64& rng, std::size_t d, std::size_t m) {
  std::exponential_distribution<double> expo;
  const auto schema = CategoricalSchema::uniform(d, m);
  Eigen::VectorXd v(static_cast<Eigen::Index>(2 * schema.configuration_count()));
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = expo(rng);
  return JointDistribution(schema, v / v.sum());
}

double residual_norm(const PairwiseMarginals& m, const Eigen::VectorXd& z, double ridge) {
  return (2.0 * m.Q * z + 2.0 * ridge * z - m.d).lpNorm<Eigen::Infinity>();
}

}  // namespace

TEST_CASE("population solution on the single-feature joint") {
  const PairwiseMarginals m = from_joint(joint_d1());
  const QuadSolution s = solve_population(m, 0.0);
  CHECK((s.z - Eigen::Vector2d(0.3, -0.3)).norm() < 1e-12);
  CHECK(s.gamma == doctest::Approx(0.16).epsilon(1e-12));
  CHECK(s.h_plus == doctest::Approx(0.3));
  CHECK(s.h_minus == doctest::Approx(0.3));
  CHECK(s.separable);
  CHECK(s.hgr_lower_bound == doctest::Approx(0.6).epsilon(1e-12));
  // The gradient of z'Qz - d'z vanishes there.
  CHECK(residual_norm(m, s.z, 0.0) < 1e-12);
}

TEST_CASE("population solution on an independent label") {
  const JointDistribution p(CategoricalSchema::uniform(2, 3), Eigen::VectorXd::Constant(18, 1.0 / 18.0));
  const QuadSolution s = solve_population(from_joint(p), 0.0);
  CHECK(s.z.norm() < 1e-12);
  CHECK(s.gamma == doctest::Approx(0.25));
  CHECK(s.hgr_lower_bound == doctest::Approx(0.0));
}

TEST_CASE("population solution on a deterministic label") {
  // Y = 1{X1 = 1}.
  const JointDistribution p(CategoricalSchema::uniform(1, 2), Eigen::Vector4d(0.0, 0.5, 0.5, 0.0));
  const QuadSolution s = solve_population(from_joint(p), 0.0);
  CHECK((s.z - Eigen::Vector2d(0.5, -0.5)).norm() < 1e-12);
  CHECK(std::abs(s.gamma) < 1e-12);
  CHECK(s.hgr_lower_bound == doctest::Approx(1.0));
}

TEST_CASE("sample solution matches the population one on the ten samples") {
  const QuadSolution s = solve_saa(oracle_ref::ten_sample_dataset(), 0.0);
  CHECK((s.z - Eigen::Vector2d(0.3, -0.3)).norm() < 1e-10);
}

TEST_CASE("heavy ridge shrinks the solution") {
  std::mt19937_64 rng(2);
  const Dataset data = oracle_ref::random_dataset(rng, 30, {3, 2});
  const PairwiseMarginals m = estimate(data);
  for (double ridge : {1.0, 1e2, 1e4, 1e6}) {
    const QuadSolution s = solve_saa(data, ridge);
    CHECK(s.z.norm() <= m.d.norm() / (2.0 * ridge) * (1.0 + 1e-9));
  }
}

TEST_CASE("Gram and normal-equation paths agree") {
  const Dataset data = oracle_ref::make_dataset({3, 3}, {{1, 2}, {3, 1}}, {1, 0});
  REQUIRE(data.schema().total_width() == 6);
  for (double ridge : {1e-3, 0.1, 10.0}) {
    const QuadSolution g = solve_saa(data, ridge, SaaPath::Gram);
    const QuadSolution n = solve_saa(data, ridge, SaaPath::Normal);
    const QuadSolution a = solve_saa(data, ridge);
    CHECK((g.z - n.z).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK((a.z - g.z).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset wide = oracle_ref::random_dataset(rng, 8, {4, 5, 3, 6});
    const QuadSolution g = solve_saa(wide, 0.05, SaaPath::Gram);
    const QuadSolution n = solve_saa(wide, 0.05, SaaPath::Normal);
    CHECK((g.z - n.z).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK(g.gamma == doctest::Approx(n.gamma).epsilon(1e-8));
  }
}

TEST_CASE("block maximum sum") {
  const auto one = CategoricalSchema::uniform(1, 2);
  CHECK(h_value(Eigen::Vector2d(0.3, -0.3), one) == doctest::Approx(0.3));
  const auto two = CategoricalSchema::uniform(2, 2);
  CHECK(h_value(Eigen::Vector4d(1, 2, -5, 0), two) == 2.0);
  CHECK(h_value(Eigen::Vector4d::Zero(), two) == 0.0);
}

TEST_CASE("closed-form maximal correlation") {
  CHECK(hgr_binary(joint_d1()) == doctest::Approx(0.6).epsilon(1e-12));
  // Product of P(X) = (0.3, 0.7) and P(Y = 0) = 0.4.
  Eigen::Vector4d prod(0.3 * 0.4, 0.3 * 0.6, 0.7 * 0.4, 0.7 * 0.6);
  CHECK(hgr_binary(JointDistribution(CategoricalSchema::uniform(1, 2), prod)) < 1e-7);
  Eigen::VectorXd det(6);
  det << 0.2, 0.0, 0.0, 0.5, 0.3, 0.0;
  CHECK(hgr_binary(JointDistribution(CategoricalSchema::uniform(1, 3), det)) == doctest::Approx(1.0));
}

TEST_CASE("marginal bound on the maximal correlation") {
  SUBCASE("single feature") {
    const PairwiseMarginals m = from_joint(joint_d1());
    const HgrBound b = min_hgr_bound(m, solve_population(m, 0.0));
    CHECK(b.bound == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(b.certified_tight);
    CHECK(b.bound == doctest::Approx(hgr_binary(joint_d1())).epsilon(1e-12));
  }
  SUBCASE("independent") {
    const JointDistribution p(CategoricalSchema::uniform(1, 2), Eigen::VectorXd::Constant(4, 0.25));
    const PairwiseMarginals m = from_joint(p);
    const HgrBound b = min_hgr_bound(m, solve_population(m, 0.0));
    CHECK(b.bound == doctest::Approx(0.0));
    CHECK(b.certified_tight);
  }
  SUBCASE("two copies of the label") {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(8);
    v[1] = 0.5;
    v[6] = 0.5;
    const PairwiseMarginals m = from_joint(JointDistribution(CategoricalSchema::uniform(2, 2), v));
    const QuadSolution s = solve_population(m, 0.0);
    CHECK((s.z - Eigen::Vector4d(0.25, -0.25, 0.25, -0.25)).norm() < 1e-9);
    CHECK(s.h_plus == doctest::Approx(0.5).epsilon(1e-9));
    const HgrBound b = min_hgr_bound(m, s);
    CHECK(b.bound == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(b.certified_tight);
  }
}

TEST_CASE("solutions satisfy the optimality conditions") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const Dataset data = oracle_ref::random_dataset(rng, 3 + rng() % 30, {2, 1 + rng() % 4, 3});
    const PairwiseMarginals m = estimate(data);
    for (double ridge : {0.0, 0.01, 1.0}) {
      const QuadSolution s = solve_population(m, ridge);
      CHECK(residual_norm(m, s.z, ridge) <= 1e-8 * (1.0 + m.d.lpNorm<Eigen::Infinity>()));
    }
  }
}

TEST_CASE("gamma at the unregularised minimiser is the smallest") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 5; ++trial) {
    const Dataset data = oracle_ref::random_dataset(rng, 25, {3, 2, 2});
    const PairwiseMarginals m = estimate(data);
    const double base = solve_population(m, 0.0).gamma;
    double previous = base;
    for (double ridge : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
      const double g = quadratic_risk(m, solve_population(m, ridge).z);
      CHECK(g >= previous - 1e-12);
      previous = g;
    }
    for (int k = 0; k < 1000; ++k) {
      Eigen::VectorXd z(m.d.size());
      for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = 0.5 * normal(rng);
      CHECK(base <= quadratic_risk(m, z) + 1e-12);
    }
  }
}

TEST_CASE("restricted gamma over feature subsets") {
  std::mt19937_64 rng(13);
  const JointDistribution p = random_joint(rng, 3, 2);
  const PairwiseMarginals m = from_joint(p);
  const std::vector<std::size_t> all{0, 1, 2};
  const std::vector<std::size_t> none{};
  const std::vector<std::size_t> first{0};
  CHECK(restricted_gamma(m, all) == doctest::Approx(solve_population(m, 0.0).gamma).epsilon(1e-10));
  CHECK(restricted_gamma(m, none) == doctest::Approx(0.25));
  CHECK(restricted_gamma(m, first) >= restricted_gamma(m, all) - 1e-12);
}

TEST_CASE("the marginal bound never exceeds the correlation of a feasible joint") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const JointDistribution p = random_joint(rng, 2, 1 + trial % 3 + 1);
    const PairwiseMarginals m = from_joint(p);
    const HgrBound b = min_hgr_bound(m, solve_population(m, 0.0));
    for (const auto& q : sample_feasible(build_constraints(m), 10, 100 + trial)) {
      CHECK(hgr_binary(q) >= b.bound - 1e-6);
    }
  }
}
