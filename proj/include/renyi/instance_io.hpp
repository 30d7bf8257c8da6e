#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "renyi/joint.hpp"
#include "renyi/oracle.hpp"

namespace renyi {

/// Text dump of a joint: a header "schema,m_1,...,m_d", then one line
/// "x_1,...,x_d,y,prob" per outcome in index order with 17-digit reals.
std::string write_instance(const JointDistribution& p);

/// Inverse of write_instance. Outcomes may appear in any order; missing
/// outcomes have probability zero.
JointDistribution parse_instance(const std::string& text);

JointDistribution read_instance_file(const std::string& path);
void write_instance_file(const JointDistribution& p, const std::string& path);

struct RandomSpec {
  std::uint64_t seed = 0;
  std::size_t d = 2;
  std::size_t m = 2;
  InstanceMode mode = InstanceMode::Generic;
};

/// "seed,d,m,mode", e.g. "7,2,3,separable".
RandomSpec parse_random_spec(const std::string& text);

}  // namespace renyi
