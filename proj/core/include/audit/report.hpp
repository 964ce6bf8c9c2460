#pragma once

#include <optional>
#include <string>
#include <vector>

#include "audit/human_validation.hpp"
#include "audit/robustness.hpp"
#include "audit/schema.hpp"
#include "audit/separability.hpp"
#include "audit/stability.hpp"
#include "audit/tensor.hpp"

namespace audit {

struct RunOptions {
  std::vector<int> thresholds;  // empty -> {1, 2, ceil(A/2)}
  /// Restrict the analysis panel to these annotators (e.g. a core panel
  /// within a larger collected grid). Empty means all.
  std::vector<std::string> annotators;
  bool mask_within = true;

  bool run_robustness = false;
  std::vector<std::string> loo_pool;          // empty -> all tensor annotators
  std::optional<std::size_t> loo_panel_size;  // default: |pool| - 1
  int top_k = 3;

  std::optional<std::string> labels_path;
  int validation_threshold = 1;
};

struct RobustnessResults {
  std::vector<int> thresholds;
  std::vector<ThresholdSweepEntry> sweep;
  RankStability ambiguity_across_thresholds;  // variants = thresholds

  // Per-annotator behavior on the analysis panel: corpus-level activation
  // profiles plus pairwise correlations on each criterion's t=1 focus set
  // (criteria whose focus set is too small are skipped).
  AnnotatorProfiles profiles;
  std::vector<CorrelationMatrix> correlations;

  struct LooResults {
    std::size_t panel_size = 0;
    std::vector<PanelVariant> variants;
    std::vector<std::pair<std::string, std::vector<StabilityRow>>> stability_per_variant;
    RankStability near_tie_across_panels;
    // Main-panel near-tie values, present when the analysis panel has the
    // same fixed size as the ablated panels.
    std::optional<std::vector<StabilityRow>> main_panel;
  };
  std::optional<LooResults> loo;
};

struct ValidationResults {
  int threshold = 1;
  PairwiseAgreement pairwise;
  FleissResult fleiss;
  std::vector<TestRetestRow> retest;
  std::vector<BoundaryAlignmentRow> alignment;
  DisagreementByOverlap split;
};

/// Everything one audit run produces, serializable as a bundle. Two runs
/// over identical inputs differ only in generated_at.
struct AuditReport {
  std::string tool_version;
  std::string generated_at;

  std::string schema_fingerprint;
  std::string schema_version;
  std::size_t category_count = 0;
  std::size_t criterion_count = 0;

  std::string tensor_source;
  DropReport drops;
  std::size_t unit_count = 0;
  std::vector<std::string> pool_annotators;      // full collected panel
  std::vector<std::string> analysis_annotators;  // panel the headline numbers use

  std::vector<int> thresholds;
  std::vector<ThresholdSweepEntry> sweeps;
  std::vector<OverlapMatrix> matrices;  // one per threshold
  bool mask_within = true;

  std::optional<RobustnessResults> robustness;
  std::optional<ValidationResults> validation;
};

/// Runs the audit over an already-built tensor. The schema must match the
/// tensor's criterion axis.
AuditReport run_audit(const Schema& schema, const ResponseTensor& tensor,
                      const std::string& tensor_source, const RunOptions& options);

/// JSON text of the report (full precision; stable key order).
std::string report_to_json(const AuditReport& report);

/// Table renderers. Percentages are printed with one decimal to line up
/// with published tables; JSON carries full precision.
std::string stability_csv(const std::vector<StabilityRow>& rows, const Schema& schema);
std::string overlap_csv(const OverlapSummary& summary);
std::string condov_csv(const OverlapMatrix& matrix);
std::string alignment_csv(const std::vector<BoundaryAlignmentRow>& rows);
std::string annotator_profiles_csv(const AnnotatorProfiles& profiles);
std::string threshold_robustness_csv(const RobustnessResults& results);
std::string loo_csv(const RobustnessResults::LooResults& loo,
                    const std::optional<std::vector<StabilityRow>>& main_panel);

/// Writes report.json, per-threshold CSVs and SVGs, and the optional
/// alignment/robustness tables into out_dir. Returns the file names
/// written, in write order.
std::vector<std::string> write_bundle(const AuditReport& report, const Schema& schema,
                                      const std::string& out_dir);

}  // namespace audit
