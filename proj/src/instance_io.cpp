#include "renyi/instance_io.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

#include "renyi/error.hpp"
#include "renyi/format.hpp"
#include "renyi/lp.hpp"

namespace renyi {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& what) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw Error(ErrorKind::InvalidArgument, what + " '" + text + "' is not a non-negative integer");
  }
  errno = 0;
  const unsigned long long v = std::strtoull(text.c_str(), nullptr, 10);
  if (errno == ERANGE) throw Error(ErrorKind::InvalidArgument, what + " '" + text + "' is out of range");
  return v;
}

double parse_real(const std::string& text, const std::string& what) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
    throw Error(ErrorKind::InvalidArgument, what + " '" + text + "' is not a number");
  }
  return v;
}

}  // namespace

std::string write_instance(const JointDistribution& p) {
  const auto& schema = p.schema();
  std::string out = "schema";
  for (std::size_t i = 0; i < schema.num_features(); ++i) out += "," + std::to_string(schema.cardinality(i));
  out += "\n";
  const auto& indexer = p.indexer();
  for (std::size_t c = 0; c < p.num_configurations(); ++c) {
    std::string prefix;
    for (std::size_t i = 0; i < schema.num_features(); ++i) prefix += std::to_string(indexer.digit(c, i)) + ",";
    for (int y = 0; y < 2; ++y) out += prefix + std::to_string(y) + "," + format_real(p.at(c, y)) + "\n";
  }
  return out;
}

JointDistribution parse_instance(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::size_t> cards;
  bool have_header = false;
  Eigen::VectorXd p;
  std::vector<bool> seen;
  std::unique_ptr<ConfigurationIndexer> indexer;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    const std::string where = "instance line " + std::to_string(line_no);
    if (!have_header) {
      if (cells.empty() || cells[0] != "schema" || cells.size() < 2) {
        throw Error(ErrorKind::InvalidArgument, where + ": expected 'schema,m_1,...,m_d'");
      }
      for (std::size_t k = 1; k < cells.size(); ++k) {
        const auto m = parse_unsigned(cells[k], "cardinality");
        if (m == 0) throw Error(ErrorKind::InvalidArgument, where + ": cardinality must be positive");
        cards.push_back(static_cast<std::size_t>(m));
      }
      const CategoricalSchema probe = CategoricalSchema::with_cardinalities(cards);
      if (probe.configuration_count() > kMaxLpVariables / 2) {
        throw Error(ErrorKind::InstanceTooLarge, where + ": too many configurations");
      }
      indexer = std::make_unique<ConfigurationIndexer>(cards);
      p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * indexer->size()));
      seen.assign(2 * indexer->size(), false);
      have_header = true;
      continue;
    }
    const std::size_t d = cards.size();
    if (cells.size() != d + 2) {
      throw Error(ErrorKind::RaggedRow, where + ": expected " + std::to_string(d + 2) + " fields");
    }
    std::vector<Category> x(d);
    for (std::size_t i = 0; i < d; ++i) {
      const auto code = parse_unsigned(cells[i], "category code");
      if (code < 1 || code > cards[i]) {
        throw Error(ErrorKind::IndexOutOfAlphabet, where + ": code " + cells[i] + " outside 1.." + std::to_string(cards[i]));
      }
      x[i] = static_cast<Category>(code);
    }
    const auto y = parse_unsigned(cells[d], "label");
    if (y > 1) throw Error(ErrorKind::NonBinaryLabel, where + ": label must be 0 or 1");
    const double prob = parse_real(cells[d + 1], "probability");
    const std::size_t slot = 2 * indexer->index_of(x) + y;
    if (seen[slot]) throw Error(ErrorKind::InvalidArgument, where + ": outcome listed twice");
    seen[slot] = true;
    p[static_cast<Eigen::Index>(slot)] = prob;
  }
  if (!have_header) throw Error(ErrorKind::InvalidArgument, "instance has no schema line");
  return JointDistribution(CategoricalSchema::with_cardinalities(cards), std::move(p));
}

JointDistribution read_instance_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_instance(buffer.str());
}

void write_instance_file(const JointDistribution& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << write_instance(p);
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

RandomSpec parse_random_spec(const std::string& text) {
  const auto cells = split_commas(text);
  if (cells.size() != 4) throw Error(ErrorKind::InvalidArgument, "expected 'seed,d,m,mode', got '" + text + "'");
  RandomSpec spec;
  spec.seed = parse_unsigned(cells[0], "seed");
  spec.d = static_cast<std::size_t>(parse_unsigned(cells[1], "d"));
  spec.m = static_cast<std::size_t>(parse_unsigned(cells[2], "m"));
  spec.mode = parse_instance_mode(cells[3]);
  return spec;
}

}  // namespace renyi
