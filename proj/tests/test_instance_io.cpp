#include <doctest.h>

#include "oracles.hpp"
#include "renyi/error.hpp"
#include "renyi/instance_io.hpp"
#include "renyi/oracle.hpp"

using namespace renyi;
using oracle_ref::error_kind;

TEST_CASE("instance dumps round-trip exactly") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const JointDistribution p = random_instance(seed, 1 + seed % 3, 2 + seed % 2, InstanceMode::Generic);
    const JointDistribution back = parse_instance(write_instance(p));
    CHECK(back.schema().cardinalities() == p.schema().cardinalities());
    CHECK(back.p() == p.p());
  }
  const JointDistribution p = random_instance(7, 2, 3, InstanceMode::Separable);
  const std::string path = oracle_ref::temp_path("instance.csv");
  write_instance_file(p, path);
  CHECK(read_instance_file(path).p() == p.p());
}

TEST_CASE("instance dump layout") {
  const JointDistribution p(CategoricalSchema::uniform(1, 2), Eigen::Vector4d(0.1, 0.4, 0.4, 0.1));
  CHECK(write_instance(p) == "schema,2\n1,0,0.10000000000000001\n1,1,0.40000000000000002\n2,0,0.40000000000000002\n2,1,0.10000000000000001\n");
  // Outcomes may come in any order and missing ones are zero.
  const JointDistribution q = parse_instance("schema,2\n2,0,0.5\n1,1,0.5\n");
  CHECK(q.p() == Eigen::Vector4d(0.0, 0.5, 0.5, 0.0));
}

TEST_CASE("malformed instance dumps") {
  CHECK(error_kind([] { parse_instance("1,0,0.5\n"); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([] { parse_instance(""); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([] { parse_instance("schema,2\n3,0,1\n"); }) == ErrorKind::IndexOutOfAlphabet);
  CHECK(error_kind([] { parse_instance("schema,2\n1,2,1\n"); }) == ErrorKind::NonBinaryLabel);
  CHECK(error_kind([] { parse_instance("schema,2\n1,0,0.5\n1,0,0.5\n"); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([] { parse_instance("schema,2\n1,0\n"); }) == ErrorKind::RaggedRow);
  CHECK(error_kind([] { parse_instance("schema,2\n1,0,abc\n"); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([] { parse_instance("schema,2\n1,0,0.7\n"); }) == ErrorKind::InvalidDistribution);
  CHECK(error_kind([] { parse_instance("schema,100,100\n"); }) == ErrorKind::InstanceTooLarge);
  CHECK(error_kind([] { read_instance_file(oracle_ref::temp_path("does_not_exist.csv")); }) == ErrorKind::Io);
}

TEST_CASE("random instance specifications") {
  const RandomSpec s = parse_random_spec("7,2,3,separable");
  CHECK(s.seed == 7);
  CHECK(s.d == 2);
  CHECK(s.m == 3);
  CHECK(s.mode == InstanceMode::Separable);
  CHECK(error_kind([] { parse_random_spec("7,2,3"); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([] { parse_random_spec("x,2,3,generic"); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([] { parse_random_spec("1,2,3,other"); }) == ErrorKind::InvalidArgument);
}
