#pragma once

#include <map>
#include <string>
#include <vector>

#include "audit/tensor.hpp"

namespace audit {

enum class Decision { Yes, No, Malformed };

/// Surface-form lookup table mapping raw annotator text to binary
/// decisions. Matching: trim, then case-fold, then exact comparison —
/// except single-character forms (such as a truncated positive "O"),
/// which are matched case-sensitively so a stray lowercase letter does
/// not count as a vote. Yes- and no-sets must be disjoint.
class RuleTable {
 public:
  RuleTable(std::vector<std::string> yes_forms, std::vector<std::string> no_forms);

  /// The shipped default: Oui/Non variants with punctuation, markdown
  /// emphasis, and the truncated positive "O".
  static const RuleTable& defaults();

  Decision match(const std::string& raw) const;

  const std::vector<std::string>& yes_forms() const { return yes_forms_; }
  const std::vector<std::string>& no_forms() const { return no_forms_; }

 private:
  std::vector<std::string> yes_forms_;
  std::vector<std::string> no_forms_;
  std::map<std::string, Decision> folded_;          // case-folded multi-char forms
  std::map<std::string, Decision> case_sensitive_;  // single-char forms
};

/// Rule table file: JSON {"yes": [...], "no": [...]}.
RuleTable load_rule_table(const std::string& path);

/// Maps one raw response to yes/no/malformed. Deterministic; malformed is
/// a value, not an error.
Decision normalize_response(const std::string& raw, const RuleTable& rules = RuleTable::defaults());

/// One raw grid cell prior to normalization.
struct RawRow {
  std::string unit_id;
  std::string annotator_id;
  std::string criterion_id;
  std::string raw_text;
};

/// Tuple-quality accounting in the style of a per-annotator raw-form
/// census: missing + malformed + valid = total over the inferred full
/// grid (observed units x annotators x criteria).
struct CleaningReport {
  struct AnnotatorStats {
    std::map<std::string, std::size_t> raw_form_counts;  // trimmed raw form -> count
    std::size_t missing = 0;
    std::size_t malformed = 0;
    std::size_t valid = 0;
  };
  std::map<std::string, AnnotatorStats> per_annotator;
  std::size_t total = 0;
  std::size_t missing = 0;
  std::size_t malformed = 0;
  std::size_t whitespace_only = 0;  // subset of malformed, tallied separately
  std::size_t valid = 0;
};

struct CleanResult {
  std::vector<LongRow> rows;  // valid tuples only, bit-exact values
  CleaningReport report;
};

/// Normalizes a raw grid into binary rows, excluding malformed cells and
/// counting absent (unit, annotator, criterion) combinations as missing.
/// Duplicate keys with different raw text are an error.
CleanResult clean_grid(const std::vector<RawRow>& raw_rows,
                       const RuleTable& rules = RuleTable::defaults());

/// Raw-form CSV with header unit_id,annotator_id,criterion_id,raw_text.
std::vector<RawRow> read_raw_csv(const std::string& path);
std::vector<RawRow> parse_raw_csv(const std::string& text,
                                  const std::string& source_name = "<string>");

/// JSON text of a cleaning report (per-annotator raw-form census plus the
/// tuple-quality totals).
std::string cleaning_report_to_json(const CleaningReport& report);

}  // namespace audit
