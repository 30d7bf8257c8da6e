#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "renyi/error.hpp"
#include "renyi/schema.hpp"

using namespace renyi;
using oracle_ref::error_kind;

TEST_CASE("csv ingestion assigns codes in first-seen order") {
  const Dataset data = parse_csv("color,size,y\nred,S,1\nblue,L,0\nred,L,1\n", {.label_column = "y"});
  CHECK(data.num_features() == 2);
  CHECK(data.size() == 3);
  CHECK(data.schema().feature(0).categories == std::vector<std::string>{"red", "blue"});
  CHECK(data.schema().feature(1).categories == std::vector<std::string>{"S", "L"});
  CHECK(data.row(1)[0] == 2);
  CHECK(data.row(1)[1] == 2);
  CHECK(data.labels() == std::vector<std::uint8_t>{1, 0, 1});
}

TEST_CASE("csv ingestion with a schema hint rejects unknown categories") {
  const Dataset base = parse_csv("color,y\nred,1\nblue,0\n", {.label_column = "y"});
  IngestOptions opts{.label_column = "y", .schema_hint = base.schema()};
  CHECK(error_kind([&] { parse_csv("color,y\nred,1\ngreen,0\n", opts); }) == ErrorKind::UnknownCategory);
  opts.permissive = true;
  const Dataset loose = parse_csv("color,y\nred,1\ngreen,0\n", opts);
  CHECK(loose.row(1)[0] == kUnseenCategory);
}

TEST_CASE("csv ingestion rejects a label column with three values") {
  CHECK(error_kind([] { parse_csv("a,y\n1,0\n2,1\n1,2\n", {.label_column = "y"}); }) == ErrorKind::NonBinaryLabel);
}

TEST_CASE("csv ingestion maps two string labels lexicographically") {
  const Dataset data = parse_csv("a,y\n1,yes\n2,no\n", {.label_column = "y"});
  CHECK(data.labels() == std::vector<std::uint8_t>{1, 0});
  CHECK(data.label_names() == std::pair<std::string, std::string>{"no", "yes"});
}

TEST_CASE("csv ingestion reports structural problems") {
  CHECK(error_kind([] { parse_csv("a,b\n1,0\n", {.label_column = "y"}); }) == ErrorKind::MissingLabelColumn);
  CHECK(error_kind([] { parse_csv("a,y\n1,0,3\n", {.label_column = "y"}); }) == ErrorKind::RaggedRow);
  CHECK(error_kind([] { parse_csv("a,y\n", {.label_column = "y"}); }) == ErrorKind::EmptyDataset);
}

TEST_CASE("indicator encoding of a row") {
  const auto s = CategoricalSchema::with_cardinalities(std::vector<std::size_t>{2, 3});
  const std::vector<Category> row{2, 3};
  const IndicatorRow enc = encode_row(s, row, 1);
  CHECK(enc.w == std::vector<std::uint8_t>{0, 1, 0, 0, 1});
  CHECK(enc.c == 0.5);

  const auto s1 = CategoricalSchema::uniform(1, 2);
  const std::vector<Category> one{1};
  const IndicatorRow enc1 = encode_row(s1, one, 0);
  CHECK(enc1.w == std::vector<std::uint8_t>{1, 0});
  CHECK(enc1.c == -0.5);

  const std::vector<Category> bad{3};
  CHECK(error_kind([&] { encode_row(s1, bad, 0); }) == ErrorKind::IndexOutOfAlphabet);
}

TEST_CASE("encoding round-trips and is one-hot per block") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> cards;
    const std::size_t d = 1 + rng() % 5;
    for (std::size_t i = 0; i < d; ++i) cards.push_back(1 + rng() % 6);
    const auto s = CategoricalSchema::with_cardinalities(cards);
    std::vector<Category> row;
    for (std::size_t m : cards) row.push_back(static_cast<Category>(1 + rng() % m));
    const IndicatorRow enc = encode_row(s, row, static_cast<std::uint8_t>(rng() % 2));
    CHECK(decode_row(s, enc.w) == row);
    std::size_t ones = 0;
    for (std::size_t i = 0; i < d; ++i) {
      std::size_t block = 0;
      for (std::size_t k = 0; k < cards[i]; ++k) block += enc.w[s.offset(i) + k];
      CHECK(block == 1);
      ones += block;
    }
    CHECK(ones == d);
  }
}

TEST_CASE("pair expansion counts and codes") {
  const auto data3 = oracle_ref::make_dataset({2, 3, 4}, {{1, 2, 3}, {2, 3, 4}}, {0, 1});
  const Dataset pairs3 = expand_pairs(data3);
  REQUIRE(pairs3.num_features() == 3);
  CHECK(pairs3.schema().cardinality(0) == 6);
  CHECK(pairs3.schema().cardinality(1) == 8);
  CHECK(pairs3.schema().cardinality(2) == 12);
  // (x1 - 1) * m2 + x2 with 1-based codes on both sides.
  CHECK(pairs3.row(0)[0] == 2);
  CHECK(pairs3.row(1)[2] == 12);

  const auto data2 = oracle_ref::make_dataset({2, 2}, {{2, 1}}, {1});
  CHECK(expand_pairs(data2).row(0)[0] == 3);

  const std::vector<std::pair<std::size_t, std::size_t>> self{{1, 1}};
  CHECK(error_kind([&] { expand_pairs(data3, self); }) == ErrorKind::SelfPair);
  const std::vector<std::pair<std::size_t, std::size_t>> dup{{0, 1}, {0, 1}};
  CHECK(error_kind([&] { expand_pairs(data3, dup); }) == ErrorKind::DuplicatePair);
}

TEST_CASE("pair expansion is deterministic") {
  std::mt19937_64 rng(3);
  const Dataset data = oracle_ref::random_dataset(rng, 40, {3, 2, 4});
  const Dataset a = expand_pairs(data);
  const Dataset b = expand_pairs(data);
  CHECK(a.schema() == b.schema());
  CHECK(a.codes() == b.codes());
  CHECK(a.labels() == b.labels());
}
