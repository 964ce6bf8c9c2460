#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "audit/schema.hpp"
#include "audit/tensor.hpp"

namespace audit {

/// Criteria simultaneously engaged on one unit at a threshold.
struct EngagedSet {
  std::size_t unit = 0;
  int threshold = 0;
  std::vector<std::string> criteria;  // schema order
};

/// Directed conditional overlap for every ordered criterion pair:
/// entry(q, q') = |focus(q) ∩ focus(q')| / |focus(q)|, or absent when
/// criterion q is never engaged. Masking of within-category blocks is a
/// rendering concern: the flag travels with the data, the values stay.
struct OverlapMatrix {
  int threshold = 0;
  std::vector<std::string> criterion_ids;
  std::vector<std::optional<double>> entries;   // row-major Q x Q
  std::vector<std::uint8_t> within_category;    // row-major Q x Q
  bool mask_within_category = false;

  std::optional<double> at(std::size_t q, std::size_t q_prime) const {
    return entries[q * criterion_ids.size() + q_prime];
  }
  bool is_within_category(std::size_t q, std::size_t q_prime) const {
    return within_category[q * criterion_ids.size() + q_prime] != 0;
  }
};

/// Category-level engagement for one unit: a substantive category is
/// active when at least one of its supporting criteria is engaged.
struct CategoryActivation {
  std::size_t unit = 0;
  int threshold = 0;
  std::vector<std::string> category_ids;  // substantive categories, schema order
  std::vector<bool> active;
  int active_count = 0;  // m: number of simultaneously active categories
};

/// Corpus-level coverage and overlap rates at one threshold.
struct OverlapSummary {
  int threshold = 0;
  std::size_t unit_count = 0;
  std::size_t covered_count = 0;                   // units with m >= 1
  std::size_t multi_category_count = 0;            // units with m >= 2
  std::size_t multi_criterion_count = 0;           // units with |Γ| >= 2 (all units)
  double coverage_rate = 0.0;                      // covered / |S|
  std::optional<double> overlap_cat_given_cov;     // m>=2 among covered
  double overlap_cat = 0.0;                        // m>=2 among all units
  double overlap_crit = 0.0;                       // |Γ|>=2 among all units
  std::map<std::size_t, std::size_t> gamma_histogram;  // |Γ| -> covered-unit count
  std::size_t gamma_1 = 0, gamma_2 = 0, gamma_3 = 0, gamma_4_plus = 0;
  std::optional<double> mean_gamma;                // mean |Γ| over covered units
};

EngagedSet engaged_criteria(const VoteTable& votes, std::size_t unit, int threshold);

/// Absent when q's focus set is empty (never 0: an empty antecedent is a
/// different claim than disjointness).
std::optional<double> conditional_overlap(const VoteTable& votes, const std::string& q,
                                          const std::string& q_prime, int threshold);

CategoryActivation category_activation(const VoteTable& votes, const Schema& schema,
                                       std::size_t unit, int threshold);

OverlapSummary overlap_summary(const VoteTable& votes, const Schema& schema, int threshold);

OverlapMatrix leakage_matrix(const VoteTable& votes, const Schema& schema, int threshold,
                             bool mask_within);

}  // namespace audit
