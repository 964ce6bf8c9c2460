#include <doctest.h>

#include "audit/errors.hpp"
#include "audit/normalize.hpp"
#include "test_util.hpp"

using namespace audit;

TEST_CASE("default rule table maps the observed surface forms") {
  CHECK(normalize_response("Oui") == Decision::Yes);
  CHECK(normalize_response("Oui.") == Decision::Yes);
  CHECK(normalize_response("**Oui**") == Decision::Yes);
  CHECK(normalize_response("**Oui") == Decision::Yes);
  CHECK(normalize_response("O") == Decision::Yes);
  CHECK(normalize_response("Non") == Decision::No);
  CHECK(normalize_response("Non.") == Decision::No);
  CHECK(normalize_response("**Non**") == Decision::No);
  CHECK(normalize_response("Peut-être") == Decision::Malformed);
  CHECK(normalize_response("") == Decision::Malformed);
  CHECK(normalize_response("   ") == Decision::Malformed);
}

TEST_CASE("case folding applies except for single-letter forms") {
  CHECK(normalize_response("OUI") == Decision::Yes);
  CHECK(normalize_response("non") == Decision::No);
  CHECK(normalize_response(" Oui ") == Decision::Yes);  // trimmed
  // Truncated-positive rule is case-sensitive: a stray lowercase letter
  // is not a vote.
  CHECK(normalize_response("o") == Decision::Malformed);
}

TEST_CASE("rule tables load from file and reject yes/no collisions") {
  const RuleTable rules = load_rule_table(testutil::repo_data("normalization_rules.json"));
  CHECK(rules.match("**Oui") == Decision::Yes);
  CHECK_THROWS_AS(RuleTable({"Yes"}, {"yes"}), InputError);
}

TEST_CASE("normalization is idempotent on canonical outputs") {
  for (const char* form : {"Oui", "Non"}) {
    const Decision first = normalize_response(form);
    CHECK(normalize_response(form) == first);
  }
}

TEST_CASE("clean_grid tallies missing and malformed against the full grid") {
  // 2 units x 2 annotators x 2 criteria = 8 expected tuples;
  // one combination absent, three malformed.
  std::vector<RawRow> raw;
  int malformed_budget = 3;
  for (const auto& u : {"s1", "s2"}) {
    for (const auto& a : {"m1", "m2"}) {
      for (const auto& q : {"q1", "q2"}) {
        if (std::string(u) == "s2" && std::string(a) == "m2" && std::string(q) == "q2") {
          continue;  // missing
        }
        if (malformed_budget > 0 && std::string(a) == "m2") {
          raw.push_back({u, a, q, "???"});
          --malformed_budget;
          continue;
        }
        raw.push_back({u, a, q, "Oui"});
      }
    }
  }
  const CleanResult result = clean_grid(raw);
  CHECK(result.report.total == 8);
  CHECK(result.report.missing == 1);
  CHECK(result.report.malformed == 3);
  CHECK(result.report.valid == 4);
  CHECK(result.report.missing + result.report.malformed + result.report.valid ==
        result.report.total);
  CHECK(result.rows.size() == 4);
  CHECK(result.report.per_annotator.at("m2").malformed == 3);
  CHECK(result.report.per_annotator.at("m2").missing == 1);
  CHECK(result.report.per_annotator.at("m1").raw_form_counts.at("Oui") == 4);
}

TEST_CASE("an all-valid grid reports zero missing and malformed") {
  std::vector<RawRow> raw = {{"s1", "m1", "q1", "Oui"}, {"s1", "m1", "q2", "Non"}};
  const CleanResult result = clean_grid(raw);
  CHECK(result.report.missing == 0);
  CHECK(result.report.malformed == 0);
  CHECK(result.report.valid == 2);
  REQUIRE(result.rows.size() == 2);
  // Valid tuples survive bit-exactly.
  for (const auto& row : result.rows) {
    CHECK(row.value == (row.criterion_id == "q1" ? 1 : 0));
  }
}

TEST_CASE("whitespace-only responses are malformed and counted separately") {
  std::vector<RawRow> raw = {{"s1", "m1", "q1", "  "}, {"s1", "m1", "q2", "Oui"}};
  const CleanResult result = clean_grid(raw);
  CHECK(result.report.malformed == 1);
  CHECK(result.report.whitespace_only == 1);
}

TEST_CASE("a malformed cell drops the whole unit downstream") {
  const Schema schema = testutil::toy_schema();
  std::vector<RawRow> raw;
  for (const auto& u : {"s1", "s2"}) {
    for (const auto& a : {"m1", "m2"}) {
      for (const auto& q : {"q1", "q2"}) {
        const bool poison =
            std::string(u) == "s2" && std::string(a) == "m1" && std::string(q) == "q1";
        raw.push_back({u, a, q, poison ? "Maybe" : "Non"});
      }
    }
  }
  const CleanResult cleaned = clean_grid(raw);
  const auto built = build_tensor(cleaned.rows, schema);
  CHECK(built.tensor.unit_count() == 1);
  REQUIRE(built.drops.count() == 1);
  CHECK(built.drops.dropped_units[0] == "s2");
}

TEST_CASE("conflicting duplicate raw cells are an error") {
  std::vector<RawRow> raw = {{"s1", "m1", "q1", "Oui"}, {"s1", "m1", "q1", "Non"}};
  CHECK_THROWS_AS(clean_grid(raw), InputError);
}
