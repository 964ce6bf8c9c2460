#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "audit/separability.hpp"
#include "audit/stability.hpp"

namespace audit {

struct ThresholdSweepEntry {
  int threshold = 0;
  std::vector<StabilityRow> stability;
  OverlapSummary overlap;
};

/// The default sweep {1, 2, ceil(A/2)}, deduplicated and ascending.
std::vector<int> default_thresholds(int panel_size);

/// Recomputes the stability table and overlap summary at each threshold.
/// The t = 1 entry is bit-identical to direct calls at t = 1.
std::vector<ThresholdSweepEntry> threshold_sweep(const VoteTable& votes,
                                                 const Schema& schema,
                                                 const std::vector<int>& thresholds);

/// One fixed-size sub-panel of the annotator pool.
struct PanelVariant {
  std::string name;
  std::vector<std::string> annotator_ids;
};

/// Remove-one panels at fixed size: for a pool of panel_size + 1
/// annotators, one variant per dropped annotator ("drop:<id>"), ordered
/// lexicographically by dropped id; for a pool equal to panel_size, the
/// single identity variant ("full"). Larger gaps are rejected — holding
/// the panel size fixed is the point of the design.
std::vector<PanelVariant> loo_panels(const ResponseTensor& tensor,
                                     const std::vector<std::string>& pool,
                                     std::size_t panel_size);

/// Per-variant values of one metric for a shared criterion set.
struct MetricByVariant {
  std::string variant;
  std::map<std::string, std::optional<double>> values;  // criterion -> value
};

struct CriterionRank {
  std::string criterion_id;
  std::map<std::string, std::optional<double>> values;  // variant -> value
  std::optional<double> min_value;
  std::optional<double> max_value;
  std::optional<int> best_rank;   // smallest rank attained (1 = largest value)
  std::optional<int> worst_rank;  // largest rank attained
  int top_k_count = 0;            // variants where rank <= k
  int defined_count = 0;          // variants where the metric is defined
};

struct RankStability {
  std::string metric_name;
  int top_k = 0;
  std::vector<std::string> variant_names;
  std::vector<CriterionRank> criteria;
};

/// Ranks use 1 + (count of strictly larger values), so ties share a rank.
/// Criteria with an absent metric in a variant are unranked there.
RankStability rank_stability(const std::vector<MetricByVariant>& variants,
                             const std::vector<std::string>& criterion_order,
                             int top_k, const std::string& metric_name);

/// Corpus-level per-annotator activation rates: fraction of all units the
/// annotator marked positive, per criterion.
struct AnnotatorProfiles {
  std::vector<std::string> annotator_ids;
  std::vector<std::string> criterion_ids;
  std::vector<double> rates;  // row-major annotators x criteria

  double at(std::size_t a, std::size_t q) const {
    return rates[a * criterion_ids.size() + q];
  }
};

AnnotatorProfiles annotator_profiles(const ResponseTensor& tensor, const Schema& schema);

/// Pairwise Pearson correlations of annotator vote vectors restricted to
/// one criterion's focus set. Constant vectors yield absent cells rather
/// than 0 — undefined variance is not independence.
struct CorrelationMatrix {
  std::string criterion_id;
  int threshold = 0;
  std::vector<std::string> annotator_ids;
  std::vector<std::optional<double>> entries;  // row-major A x A

  std::optional<double> at(std::size_t a, std::size_t b) const {
    return entries[a * annotator_ids.size() + b];
  }
};

/// Throws InputError when the focus set has fewer than two units.
CorrelationMatrix annotator_correlations(const ResponseTensor& tensor,
                                         const std::string& criterion_id, int threshold);

}  // namespace audit
