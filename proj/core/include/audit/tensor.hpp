#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "audit/schema.hpp"

namespace audit {

/// One long-form annotation record: a single binary judgment.
struct LongRow {
  std::string unit_id;
  std::string annotator_id;
  std::string criterion_id;
  int value = 0;  // 0 or 1
};

/// Dense, fully observed binary response tensor of shape
/// units x annotators x criteria. Every cell is 0 or 1; units with any
/// missing cell never survive construction. Immutable after build.
class ResponseTensor {
 public:
  ResponseTensor(std::vector<std::string> unit_ids,
                 std::vector<std::string> annotator_ids,
                 std::vector<std::string> criterion_ids,
                 std::vector<std::uint8_t> values);

  std::size_t unit_count() const { return unit_ids_.size(); }
  std::size_t annotator_count() const { return annotator_ids_.size(); }
  std::size_t criterion_count() const { return criterion_ids_.size(); }

  const std::vector<std::string>& unit_ids() const { return unit_ids_; }
  const std::vector<std::string>& annotator_ids() const { return annotator_ids_; }
  const std::vector<std::string>& criterion_ids() const { return criterion_ids_; }

  std::uint8_t at(std::size_t unit, std::size_t annotator, std::size_t criterion) const {
    return values_[(unit * annotator_ids_.size() + annotator) * criterion_ids_.size() +
                   criterion];
  }

  std::size_t annotator_index(const std::string& id) const;  // throws if unknown
  std::size_t unit_index(const std::string& id) const;       // throws if unknown

  /// Sub-panel view as a new tensor (same units and criteria, annotators
  /// restricted to `ids` in the given order). Throws on unknown ids.
  ResponseTensor select_annotators(const std::vector<std::string>& ids) const;

 private:
  std::vector<std::string> unit_ids_;
  std::vector<std::string> annotator_ids_;
  std::vector<std::string> criterion_ids_;
  std::vector<std::uint8_t> values_;
};

/// Units removed by the whole-unit drop policy: any unit missing at least
/// one (annotator, criterion) cell is excluded and listed here. This
/// report is a mandatory output of ingestion.
struct DropReport {
  std::vector<std::string> dropped_units;
  std::size_t count() const { return dropped_units.size(); }
};

struct BuildResult {
  ResponseTensor tensor;
  DropReport drops;
};

/// Materializes the dense tensor from long-form records.
///  - criterion axis: the full schema criterion list, in schema order
///  - unit and annotator axes: first appearance in the input
///  - conflicting duplicate cells (same key, different value) are an error;
///    identical duplicates collapse
///  - units missing any cell are dropped and reported
BuildResult build_tensor(const std::vector<LongRow>& rows, const Schema& schema);

/// Reads long-form CSV with header unit_id,annotator_id,criterion_id,value.
std::vector<LongRow> read_long_csv(const std::string& path);
std::vector<LongRow> parse_long_csv(const std::string& text,
                                    const std::string& source_name = "<string>");

/// Per (unit, criterion) positive-vote counts in {0..panel_size}, plus the
/// axis ids needed for id-based lookups downstream.
class VoteTable {
 public:
  VoteTable(std::vector<std::string> unit_ids, std::vector<std::string> criterion_ids,
            std::vector<int> counts, int panel_size);

  std::size_t unit_count() const { return unit_ids_.size(); }
  std::size_t criterion_count() const { return criterion_ids_.size(); }
  int panel_size() const { return panel_size_; }

  const std::vector<std::string>& unit_ids() const { return unit_ids_; }
  const std::vector<std::string>& criterion_ids() const { return criterion_ids_; }

  int at(std::size_t unit, std::size_t criterion) const {
    return counts_[unit * criterion_ids_.size() + criterion];
  }

  std::size_t criterion_index(const std::string& id) const;  // throws if unknown

 private:
  std::vector<std::string> unit_ids_;
  std::vector<std::string> criterion_ids_;
  std::vector<int> counts_;
  int panel_size_;
};

VoteTable vote_counts(const ResponseTensor& tensor);

/// Units where a criterion received at least `threshold` positive votes.
/// Members are unit indices into the vote table's unit axis, ascending.
struct FocusSet {
  std::string criterion_id;
  int threshold = 0;
  std::vector<std::size_t> members;

  std::size_t size() const { return members.size(); }
};

/// Throws InputError when threshold is outside {0..panel_size} or the
/// criterion is unknown. threshold 0 recovers the full corpus.
FocusSet focus_set(const VoteTable& votes, const std::string& criterion_id, int threshold);

}  // namespace audit
