#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "audit/schema.hpp"
#include "audit/tensor.hpp"

namespace audit {

/// One single-label expert assignment. Experts may label a unit once per
/// pass; pass 2 exists only for repeated items.
struct LabelRecord {
  std::string unit_id;
  std::string expert_id;
  int pass = 1;  // 1 or 2
  std::string category_id;  // any schema category, including the non-target one
};

/// Validated expert labels: (unit, expert, pass) unique, categories known
/// to the schema. Reliability statistics use pass-1 labels; repeats feed
/// test-retest only.
class HumanLabels {
 public:
  HumanLabels(std::vector<LabelRecord> records, const Schema& schema);

  const std::vector<LabelRecord>& records() const { return records_; }
  const std::vector<std::string>& expert_ids() const { return expert_ids_; }

  /// Pass-1 labels grouped by unit: unit -> (expert, category) pairs in
  /// input order.
  const std::map<std::string, std::vector<std::pair<std::string, std::string>>>&
  pass1_by_unit() const {
    return pass1_by_unit_;
  }

 private:
  std::vector<LabelRecord> records_;
  std::vector<std::string> expert_ids_;  // first appearance order
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> pass1_by_unit_;
};

HumanLabels load_human_labels(const std::string& path, const Schema& schema);
HumanLabels parse_human_labels(const std::string& csv_text, const Schema& schema,
                               const std::string& source_name = "<string>");

/// Fraction of co-annotated units with identical category, per expert
/// pair; absent for pairs that share no units.
struct PairwiseAgreement {
  std::vector<std::string> expert_ids;
  std::vector<std::optional<double>> entries;  // row-major E x E

  std::optional<double> at(std::size_t a, std::size_t b) const {
    return entries[a * expert_ids.size() + b];
  }
};

PairwiseAgreement pairwise_agreement(const HumanLabels& labels);

struct FleissResult {
  std::optional<double> kappa;  // absent when expected agreement is 1
  int raters_per_unit = 0;
  std::size_t included_units = 0;
  std::vector<std::string> dropped_units;  // rated by fewer than raters_per_unit
  double observed_agreement = 0.0;
  double expected_agreement = 0.0;
};

/// Standard Fleiss' kappa over the full category set (non-target
/// included). Units rated by fewer experts than the fullest panel are
/// dropped and reported.
FleissResult fleiss_kappa(const HumanLabels& labels, const Schema& schema);

struct TestRetestRow {
  std::string expert_id;
  std::size_t repeats = 0;
  std::size_t matches = 0;
  std::optional<double> consistency;  // matches / repeats; absent with no repeats
};

/// Per-expert fraction of repeated items labeled identically both passes.
std::vector<TestRetestRow> test_retest(const HumanLabels& labels);

struct BoundaryAlignmentRow {
  std::string category_a;
  std::string category_b;
  double human_split = 0.0;   // covered units where experts assign both categories
  double diag_coact = 0.0;    // covered units where both categories are active
  std::size_t covered_count = 0;  // shared denominator
};

/// Alignment between diagnostic co-activation and expert label splits on
/// covered labeled units, one row per unordered substantive pair.
std::vector<BoundaryAlignmentRow> boundary_alignment(const HumanLabels& labels,
                                                     const VoteTable& votes,
                                                     const Schema& schema, int threshold);

struct DisagreementByOverlap {
  int threshold = 0;
  std::size_t single_category_units = 0;  // m == 1
  std::size_t multi_category_units = 0;   // m >= 2
  std::optional<double> disagreement_single;  // experts not unanimous, m == 1
  std::optional<double> disagreement_multi;   // experts not unanimous, m >= 2
};

/// Expert disagreement rate stratified by diagnostic co-activation.
DisagreementByOverlap split_by_overlap(const HumanLabels& labels, const VoteTable& votes,
                                       const Schema& schema, int threshold);

}  // namespace audit
