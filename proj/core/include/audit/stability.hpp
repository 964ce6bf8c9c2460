#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "audit/schema.hpp"
#include "audit/tensor.hpp"

namespace audit {

/// Distribution of positive-vote counts among engaged units: for each
/// k in {threshold..panel_size}, the fraction of focus-set units with
/// exactly k positive votes. Empty (no mass) when the focus set is empty.
struct VoteDistribution {
  std::string criterion_id;
  int threshold = 0;
  int panel_size = 0;
  std::size_t focus_size = 0;
  std::map<int, double> mass;  // k -> fraction; keys ascending, zeros included

  bool empty() const { return focus_size == 0; }
};

/// Agreement-zone masses over a vote distribution:
///   unanimous  — all annotators voted yes (k = panel size A)
///   near_tie   — votes within one of an even split (|2k - A| <= 1, 0 < k < A)
///   asymmetric — every other engaged level below unanimity
/// For A = 5 this is exactly UY = {5}, NT = {2,3}, AS = {1,4}.
struct ZoneRates {
  double unanimous = 0.0;
  double asymmetric = 0.0;
  double near_tie = 0.0;
};

struct StabilityRow {
  std::string criterion_id;
  double activation = 0.0;
  std::size_t focus_size = 0;
  // Absent (not zero) for empty focus sets: a never-engaged criterion has
  // no agreement behavior to report.
  std::optional<double> near_tie;
  std::optional<double> asymmetric;
  std::optional<double> unanimous;
  std::optional<double> ambiguity;
};

/// |focus set| / |corpus|. Throws on an empty corpus or out-of-range t.
double activation_rate(const VoteTable& votes, const std::string& criterion_id, int threshold);

VoteDistribution vote_distribution(const VoteTable& votes, const std::string& criterion_id,
                                   int threshold);

/// Throws InputError on an empty distribution.
ZoneRates zone_rates(const VoteDistribution& dist);

/// Near-tie mass among engaged units; identical to zone_rates().near_tie
/// by construction (the two names coexist in reports).
double ambiguity_rate(const VoteDistribution& dist);

/// One row per schema criterion, in schema order. The vote table's
/// criterion axis must match the schema exactly.
std::vector<StabilityRow> stability_table(const VoteTable& votes, const Schema& schema,
                                          int threshold);

}  // namespace audit
