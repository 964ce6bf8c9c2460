#include <cmath>
#include <random>

#include <doctest.h>

#include "audit/errors.hpp"
#include "audit/robustness.hpp"
#include "test_util.hpp"

using namespace audit;

TEST_CASE("default thresholds are {1, 2, ceil(A/2)}") {
  CHECK(default_thresholds(5) == std::vector<int>{1, 2, 3});
  CHECK(default_thresholds(6) == std::vector<int>{1, 2, 3});
  CHECK(default_thresholds(2) == std::vector<int>{1, 2});
  CHECK(default_thresholds(3) == std::vector<int>{1, 2});
}

TEST_CASE("threshold sweep at t=1 is bit-identical to direct calls") {
  const Schema schema = testutil::toy_schema();
  const VoteTable votes = vote_counts(testutil::t1_tensor());
  const auto sweep = threshold_sweep(votes, schema, {1, 2});
  REQUIRE(sweep.size() == 2);
  const auto direct_rows = stability_table(votes, schema, 1);
  const auto direct_sum = overlap_summary(votes, schema, 1);
  REQUIRE(sweep[0].stability.size() == direct_rows.size());
  for (std::size_t i = 0; i < direct_rows.size(); ++i) {
    CHECK(sweep[0].stability[i].activation == direct_rows[i].activation);
    CHECK(sweep[0].stability[i].near_tie == direct_rows[i].near_tie);
    CHECK(sweep[0].stability[i].asymmetric == direct_rows[i].asymmetric);
    CHECK(sweep[0].stability[i].unanimous == direct_rows[i].unanimous);
  }
  CHECK(sweep[0].overlap.covered_count == direct_sum.covered_count);
  CHECK(sweep[0].overlap.overlap_cat_given_cov == direct_sum.overlap_cat_given_cov);
  CHECK(sweep[0].overlap.mean_gamma == direct_sum.mean_gamma);
}

TEST_CASE("sweep at t=0 activates everything") {
  const Schema schema = testutil::toy_schema();
  const VoteTable votes = vote_counts(testutil::t1_tensor());
  const auto sweep = threshold_sweep(votes, schema, {0});
  for (const auto& row : sweep[0].stability) {
    CHECK(row.activation == 1.0);
  }
}

namespace {

ResponseTensor pool_tensor(const std::vector<std::string>& annotators) {
  std::vector<std::string> units{"s1", "s2"};
  std::vector<std::string> criteria{"q1", "q2"};
  std::vector<std::uint8_t> values(units.size() * annotators.size() * criteria.size(), 1);
  return ResponseTensor(units, annotators, criteria, values);
}

}  // namespace

TEST_CASE("loo panels: pool of 6 at size 5 gives six drop-one variants") {
  const auto tensor = pool_tensor({"m1", "m2", "m3", "m4", "m5", "m6"});
  const auto variants = loo_panels(tensor, tensor.annotator_ids(), 5);
  REQUIRE(variants.size() == 6);
  CHECK(variants[0].name == "drop:m1");
  CHECK(variants[5].name == "drop:m6");
  for (const auto& v : variants) {
    CHECK(v.annotator_ids.size() == 5);
  }
  // Lexicographic over dropped id even if the pool is unordered.
  const auto shuffled =
      loo_panels(tensor, {"m3", "m1", "m2", "m6", "m5", "m4"}, 5);
  CHECK(shuffled[0].name == "drop:m1");
  CHECK(shuffled[1].name == "drop:m2");
}

TEST_CASE("loo panels: identity and error cases") {
  const auto tensor = pool_tensor({"m1", "m2", "m3", "m4", "m5"});
  const auto identity = loo_panels(tensor, tensor.annotator_ids(), 5);
  REQUIRE(identity.size() == 1);
  CHECK(identity[0].name == "full");
  CHECK(identity[0].annotator_ids.size() == 5);

  const auto three = pool_tensor({"m1", "m2", "m3"});
  CHECK(loo_panels(three, three.annotator_ids(), 2).size() == 3);

  CHECK_THROWS_AS(loo_panels(three, three.annotator_ids(), 4), InputError);
  CHECK_THROWS_AS(loo_panels(three, three.annotator_ids(), 1), InputError);  // drop 2
  CHECK_THROWS_AS(loo_panels(three, {"m1", "m1", "m2"}, 2), InputError);
}

TEST_CASE("rank stability counts top-k membership across variants") {
  // Three synthetic variants over four criteria with hand-set values.
  std::vector<MetricByVariant> variants = {
      {"v1", {{"q1", 0.9}, {"q2", 0.5}, {"q3", 0.1}, {"q4", 0.7}}},
      {"v2", {{"q1", 0.8}, {"q2", 0.6}, {"q3", 0.2}, {"q4", 0.3}}},
      {"v3", {{"q1", 0.7}, {"q2", 0.9}, {"q3", 0.3}, {"q4", 0.1}}},
  };
  const RankStability rs =
      rank_stability(variants, {"q1", "q2", "q3", "q4"}, 2, "metric");
  REQUIRE(rs.criteria.size() == 4);
  // Hand count: q1 ranks 1,1,2 -> top-2 3/3; q2 ranks 3,2,1 -> 2/3;
  // q3 ranks 4,4,3 -> 0/3; q4 ranks 2,3,4 -> 1/3.
  CHECK(rs.criteria[0].top_k_count == 3);
  CHECK(rs.criteria[1].top_k_count == 2);
  CHECK(rs.criteria[2].top_k_count == 0);
  CHECK(rs.criteria[3].top_k_count == 1);
  CHECK(*rs.criteria[0].best_rank == 1);
  CHECK(*rs.criteria[0].worst_rank == 2);
  CHECK(*rs.criteria[0].min_value == 0.7);
  CHECK(*rs.criteria[0].max_value == 0.9);
}

TEST_CASE("identical values across variants give rank range width zero") {
  std::vector<MetricByVariant> variants = {
      {"v1", {{"q1", 0.4}, {"q2", 0.2}}},
      {"v2", {{"q1", 0.4}, {"q2", 0.2}}},
  };
  const RankStability rs = rank_stability(variants, {"q1", "q2"}, 1, "metric");
  for (const auto& row : rs.criteria) {
    CHECK(*row.best_rank == *row.worst_rank);
    CHECK(*row.min_value == *row.max_value);
  }
}

TEST_CASE("rank stability rejects mismatched criterion sets") {
  std::vector<MetricByVariant> variants = {
      {"v1", {{"q1", 0.4}}},
      {"v2", {{"q1", 0.4}, {"q2", 0.2}}},
  };
  CHECK_THROWS_AS(rank_stability(variants, {"q1", "q2"}, 1, "m"), InputError);
}

TEST_CASE("annotator profiles are plain column means") {
  const Schema schema = testutil::toy_schema();
  const ResponseTensor tensor = testutil::t1_tensor();
  const AnnotatorProfiles p = annotator_profiles(tensor, schema);
  // a1 on q1 voted yes on s1, s2 of 3 units; a2 only on s1.
  CHECK(p.at(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(p.at(1, 0) == doctest::Approx(1.0 / 3.0));
  // q2: a1 yes on s1, s3; a2 yes on s2, s3.
  CHECK(p.at(0, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(p.at(1, 1) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("an always-yes annotator profiles at 1.0 everywhere") {
  const auto tensor = pool_tensor({"m1", "m2"});
  const Schema schema = testutil::toy_schema();
  const AnnotatorProfiles p = annotator_profiles(tensor, schema);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t q = 0; q < 2; ++q) {
      CHECK(p.at(a, q) == 1.0);
    }
  }
}

namespace {

// Two annotators with prescribed binary vectors on one criterion, padded
// with a second criterion so the toy schema fits.
ResponseTensor two_annotator_tensor(const std::vector<int>& a1,
                                    const std::vector<int>& a2) {
  std::vector<std::string> units;
  std::vector<std::uint8_t> values;
  for (std::size_t s = 0; s < a1.size(); ++s) {
    units.push_back("s" + std::to_string(s + 1));
    values.push_back(static_cast<std::uint8_t>(a1[s]));
    values.push_back(1);  // q2 keeps the focus set full
    values.push_back(static_cast<std::uint8_t>(a2[s]));
    values.push_back(1);
  }
  return ResponseTensor(units, {"a1", "a2"}, {"q1", "q2"}, values);
}

}  // namespace

TEST_CASE("identical annotators correlate at 1, complementary at -1") {
  // Identical annotators never vary on an engaged focus set (every
  // member is unanimous), so exercise the full corpus at t=0.
  const auto same = two_annotator_tensor({1, 0, 1, 0}, {1, 0, 1, 0});
  const CorrelationMatrix m1 = annotator_correlations(same, "q1", 0);
  CHECK(*m1.at(0, 1) == doctest::Approx(1.0));
  CHECK(*m1.at(0, 0) == doctest::Approx(1.0));

  const auto flipped = two_annotator_tensor({1, 0, 1, 0}, {0, 1, 0, 1});
  const CorrelationMatrix m2 = annotator_correlations(flipped, "q1", 1);
  CHECK(*m2.at(0, 1) == doctest::Approx(-1.0));
}

TEST_CASE("correlation matches a hand-computed Pearson value") {
  // 20-unit focus set with a frozen pair of vectors.
  const std::vector<int> x = {1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 1, 0, 1};
  const std::vector<int> y = {1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1};
  // Textbook Pearson, computed independently here.
  const double n = 20;
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    sx += x[i];
    sy += y[i];
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
  }
  const double expected =
      (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));

  const auto tensor = two_annotator_tensor(x, y);
  const CorrelationMatrix m = annotator_correlations(tensor, "q1", 0);
  CHECK(*m.at(0, 1) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(*m.at(1, 0) == *m.at(0, 1));
}

TEST_CASE("constant vote vectors yield absent correlations") {
  const auto tensor = two_annotator_tensor({1, 1, 1, 1}, {1, 0, 1, 0});
  const CorrelationMatrix m = annotator_correlations(tensor, "q1", 0);
  CHECK_FALSE(m.at(0, 1).has_value());
  CHECK_FALSE(m.at(0, 0).has_value());  // self-correlation of a constant
  CHECK(m.at(1, 1).has_value());
}

TEST_CASE("correlations require a focus set of at least two units") {
  const auto tensor = two_annotator_tensor({1}, {0});
  CHECK_THROWS_AS(annotator_correlations(tensor, "q1", 1), InputError);
}
