#include <algorithm>
#include <random>

#include <doctest.h>

#include "audit/csv.hpp"
#include "audit/errors.hpp"
#include "audit/tensor.hpp"
#include "test_util.hpp"

using namespace audit;

TEST_CASE("csv parser handles quoting and rejects ragged rows") {
  const auto t = csv::parse_string("a,b\n1,\"x,\"\"y\"\"\"\n2,plain\n");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "x,\"y\"");
  CHECK(t.column("b") == 1);
  CHECK_THROWS_AS(csv::parse_string("a,b\n1\n"), InputError);
  CHECK(csv::escape("x,y") == "\"x,y\"");
}

TEST_CASE("csv join/parse round-trips arbitrary field content") {
  std::mt19937_64 rng(99);
  const std::string alphabet = "ab,\"\n\r x";
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<std::string>> rows;
    const std::size_t n_cols = 1 + rng() % 4;
    std::string text;
    {
      std::vector<std::string> header;
      for (std::size_t c = 0; c < n_cols; ++c) header.push_back("h" + std::to_string(c));
      text = csv::join(header) + "\n";
    }
    for (std::size_t r = 0; r < 1 + rng() % 5; ++r) {
      std::vector<std::string> row;
      for (std::size_t c = 0; c < n_cols; ++c) {
        std::string field;
        for (std::size_t i = 0; i < rng() % 8; ++i) {
          field.push_back(alphabet[rng() % alphabet.size()]);
        }
        row.push_back(std::move(field));
      }
      text += csv::join(row) + "\n";
      rows.push_back(std::move(row));
    }
    const auto parsed = csv::parse_string(text);
    REQUIRE(parsed.rows.size() == rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      CHECK(parsed.rows[r] == rows[r]);
    }
  }
}

TEST_CASE("build_tensor materializes a dense 2x2x2 grid") {
  const Schema schema = testutil::toy_schema();
  std::vector<LongRow> rows;
  for (const auto& u : {"s1", "s2"}) {
    for (const auto& a : {"a1", "a2"}) {
      for (const auto& q : {"q1", "q2"}) {
        rows.push_back({u, a, q, 1});
      }
    }
  }
  const auto built = build_tensor(rows, schema);
  CHECK(built.tensor.unit_count() == 2);
  CHECK(built.tensor.annotator_count() == 2);
  CHECK(built.tensor.criterion_count() == 2);
  CHECK(built.drops.count() == 0);
}

TEST_CASE("a unit with a missing cell is dropped and reported") {
  const Schema schema = testutil::toy_schema();
  std::vector<LongRow> rows;
  for (const auto& u : {"s1", "s2"}) {
    for (const auto& a : {"a1", "a2"}) {
      for (const auto& q : {"q1", "q2"}) {
        if (std::string(u) == "s2" && std::string(a) == "a2" && std::string(q) == "q2") {
          continue;  // the absent cell
        }
        rows.push_back({u, a, q, 0});
      }
    }
  }
  const auto built = build_tensor(rows, schema);
  CHECK(built.tensor.unit_count() == 1);
  CHECK(built.tensor.unit_ids()[0] == "s1");
  REQUIRE(built.drops.count() == 1);
  CHECK(built.drops.dropped_units[0] == "s2");
}

TEST_CASE("conflicting duplicate cells are an error, identical ones collapse") {
  const Schema schema = testutil::toy_schema();
  std::vector<LongRow> rows = {{"s1", "a1", "q1", 1}, {"s1", "a1", "q1", 0}};
  CHECK_THROWS_AS(build_tensor(rows, schema), InputError);
  rows[1].value = 1;
  rows.push_back({"s1", "a1", "q2", 0});
  rows.push_back({"s1", "a2", "q1", 0});
  rows.push_back({"s1", "a2", "q2", 0});
  CHECK(build_tensor(rows, schema).tensor.unit_count() == 1);
}

TEST_CASE("unknown criterion ids are rejected") {
  const Schema schema = testutil::toy_schema();
  std::vector<LongRow> rows = {{"s1", "a1", "qX", 1}};
  CHECK_THROWS_AS(build_tensor(rows, schema), InputError);
}

TEST_CASE("vote_counts reproduces the worked micro-corpus by direct summation") {
  const ResponseTensor tensor = testutil::t1_tensor();
  const VoteTable votes = vote_counts(tensor);
  CHECK(votes.panel_size() == 2);
  REQUIRE(votes.unit_count() == 3);

  // Independent oracle: sum the tensor cells directly.
  for (std::size_t s = 0; s < tensor.unit_count(); ++s) {
    for (std::size_t q = 0; q < tensor.criterion_count(); ++q) {
      int expect = 0;
      for (std::size_t a = 0; a < tensor.annotator_count(); ++a) {
        expect += tensor.at(s, a, q);
      }
      CHECK(votes.at(s, q) == expect);
    }
  }
  // Frozen expected arrays: q1 = [2,1,0], q2 = [1,1,2].
  CHECK(votes.at(0, 0) == 2);
  CHECK(votes.at(1, 0) == 1);
  CHECK(votes.at(2, 0) == 0);
  CHECK(votes.at(0, 1) == 1);
  CHECK(votes.at(1, 1) == 1);
  CHECK(votes.at(2, 1) == 2);
}

TEST_CASE("all-zero and all-one tensors hit the count extremes") {
  const Schema schema = testutil::toy_schema();
  for (int fill : {0, 1}) {
    std::vector<LongRow> rows;
    for (const auto& a : {"a1", "a2", "a3"}) {
      for (const auto& q : {"q1", "q2"}) {
        rows.push_back({"s1", a, q, fill});
      }
    }
    const VoteTable votes = vote_counts(build_tensor(rows, schema).tensor);
    CHECK(votes.at(0, 0) == fill * 3);
    CHECK(votes.at(0, 1) == fill * 3);
  }
}

TEST_CASE("focus sets match the worked examples and t=0 recovers the corpus") {
  const VoteTable votes = vote_counts(testutil::t1_tensor());
  CHECK(focus_set(votes, "q1", 1).members == std::vector<std::size_t>{0, 1});
  CHECK(focus_set(votes, "q1", 0).members == std::vector<std::size_t>{0, 1, 2});
  CHECK(focus_set(votes, "q1", 2).members == std::vector<std::size_t>{0});
  CHECK_THROWS_AS(focus_set(votes, "q1", 3), InputError);
  CHECK_THROWS_AS(focus_set(votes, "q1", -1), InputError);
  CHECK_THROWS_AS(focus_set(votes, "qX", 1), InputError);
}

TEST_CASE("focus sets are nested in t and full at t=0") {
  std::mt19937_64 rng(7);
  const Schema schema = testutil::toy_schema();
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<LongRow> rows;
    const int n_units = 1 + static_cast<int>(rng() % 12);
    for (int s = 0; s < n_units; ++s) {
      for (const auto& a : {"a1", "a2", "a3"}) {
        for (const auto& q : {"q1", "q2"}) {
          rows.push_back({"s" + std::to_string(s), a, q, static_cast<int>(rng() % 2)});
        }
      }
    }
    const VoteTable votes = vote_counts(build_tensor(rows, schema).tensor);
    for (const auto& q : {"q1", "q2"}) {
      CHECK(focus_set(votes, q, 0).size() == votes.unit_count());
      for (int t = 0; t < votes.panel_size(); ++t) {
        const auto wide = focus_set(votes, q, t).members;
        const auto narrow = focus_set(votes, q, t + 1).members;
        CHECK(std::includes(wide.begin(), wide.end(), narrow.begin(), narrow.end()));
      }
    }
  }
}

TEST_CASE("vote counts are invariant to annotator permutation") {
  const ResponseTensor tensor = testutil::t1_tensor();
  const VoteTable votes = vote_counts(tensor);
  const VoteTable permuted = vote_counts(tensor.select_annotators({"a2", "a1"}));
  for (std::size_t s = 0; s < votes.unit_count(); ++s) {
    for (std::size_t q = 0; q < votes.criterion_count(); ++q) {
      CHECK(votes.at(s, q) == permuted.at(s, q));
    }
  }
}
