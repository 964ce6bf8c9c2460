#include "audit/tensor.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "audit/csv.hpp"
#include "audit/errors.hpp"

namespace audit {

ResponseTensor::ResponseTensor(std::vector<std::string> unit_ids,
                               std::vector<std::string> annotator_ids,
                               std::vector<std::string> criterion_ids,
                               std::vector<std::uint8_t> values)
    : unit_ids_(std::move(unit_ids)),
      annotator_ids_(std::move(annotator_ids)),
      criterion_ids_(std::move(criterion_ids)),
      values_(std::move(values)) {
  auto check_unique = [](const std::vector<std::string>& ids, const char* axis) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
      if (!seen.insert(id).second) {
        throw InvariantError(std::string("duplicate ") + axis + " id '" + id + "'");
      }
    }
  };
  check_unique(unit_ids_, "unit");
  check_unique(annotator_ids_, "annotator");
  check_unique(criterion_ids_, "criterion");
  if (values_.size() != unit_ids_.size() * annotator_ids_.size() * criterion_ids_.size()) {
    throw InvariantError("tensor value buffer does not match axis sizes");
  }
  for (auto v : values_) {
    if (v > 1) throw InvariantError("tensor cell outside {0,1}");
  }
}

std::size_t ResponseTensor::annotator_index(const std::string& id) const {
  for (std::size_t i = 0; i < annotator_ids_.size(); ++i) {
    if (annotator_ids_[i] == id) return i;
  }
  throw InputError("unknown annotator id '" + id + "'");
}

std::size_t ResponseTensor::unit_index(const std::string& id) const {
  for (std::size_t i = 0; i < unit_ids_.size(); ++i) {
    if (unit_ids_[i] == id) return i;
  }
  throw InputError("unknown unit id '" + id + "'");
}

ResponseTensor ResponseTensor::select_annotators(const std::vector<std::string>& ids) const {
  std::vector<std::size_t> picks;
  picks.reserve(ids.size());
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw InputError("duplicate annotator id '" + id + "' in panel selection");
    }
    picks.push_back(annotator_index(id));
  }
  std::vector<std::uint8_t> values;
  values.reserve(unit_count() * ids.size() * criterion_count());
  for (std::size_t s = 0; s < unit_count(); ++s) {
    for (std::size_t a : picks) {
      for (std::size_t q = 0; q < criterion_count(); ++q) {
        values.push_back(at(s, a, q));
      }
    }
  }
  return ResponseTensor(unit_ids_, ids, criterion_ids_, std::move(values));
}

BuildResult build_tensor(const std::vector<LongRow>& rows, const Schema& schema) {
  const auto& criteria = schema.criteria();
  std::unordered_map<std::string, std::size_t> criterion_index;
  for (std::size_t q = 0; q < criteria.size(); ++q) {
    criterion_index.emplace(criteria[q].id, q);
  }

  std::vector<std::string> unit_order;
  std::unordered_map<std::string, std::size_t> unit_index;
  std::vector<std::string> annotator_order;
  std::unordered_map<std::string, std::size_t> annotator_index;

  for (const auto& r : rows) {
    if (!criterion_index.count(r.criterion_id)) {
      throw InputError("unknown criterion id '" + r.criterion_id + "'");
    }
    if (!unit_index.count(r.unit_id)) {
      unit_index.emplace(r.unit_id, unit_order.size());
      unit_order.push_back(r.unit_id);
    }
    if (!annotator_index.count(r.annotator_id)) {
      annotator_index.emplace(r.annotator_id, annotator_order.size());
      annotator_order.push_back(r.annotator_id);
    }
  }

  const std::size_t n_units = unit_order.size();
  const std::size_t n_annotators = annotator_order.size();
  const std::size_t n_criteria = criteria.size();

  // -1 marks a missing cell until a row fills it.
  std::vector<std::int8_t> cells(n_units * n_annotators * n_criteria, -1);
  auto idx = [&](std::size_t s, std::size_t a, std::size_t q) {
    return (s * n_annotators + a) * n_criteria + q;
  };
  for (const auto& r : rows) {
    if (r.value != 0 && r.value != 1) {
      throw InputError("cell (" + r.unit_id + ", " + r.annotator_id + ", " +
                       r.criterion_id + ") has value outside {0,1}");
    }
    auto& cell = cells[idx(unit_index[r.unit_id], annotator_index[r.annotator_id],
                           criterion_index[r.criterion_id])];
    if (cell == -1) {
      cell = static_cast<std::int8_t>(r.value);
    } else if (cell != r.value) {
      throw InputError("conflicting duplicate cell (" + r.unit_id + ", " +
                       r.annotator_id + ", " + r.criterion_id + ")");
    }
  }

  // Whole-unit drop policy: a unit with any unfilled cell is removed.
  std::vector<std::string> kept_units;
  DropReport drops;
  std::vector<std::uint8_t> values;
  for (std::size_t s = 0; s < n_units; ++s) {
    bool complete = true;
    for (std::size_t a = 0; a < n_annotators && complete; ++a) {
      for (std::size_t q = 0; q < n_criteria; ++q) {
        if (cells[idx(s, a, q)] == -1) {
          complete = false;
          break;
        }
      }
    }
    if (!complete) {
      drops.dropped_units.push_back(unit_order[s]);
      continue;
    }
    kept_units.push_back(unit_order[s]);
    for (std::size_t a = 0; a < n_annotators; ++a) {
      for (std::size_t q = 0; q < n_criteria; ++q) {
        values.push_back(static_cast<std::uint8_t>(cells[idx(s, a, q)]));
      }
    }
  }

  std::vector<std::string> criterion_ids;
  criterion_ids.reserve(n_criteria);
  for (const auto& q : criteria) criterion_ids.push_back(q.id);

  return BuildResult{
      ResponseTensor(std::move(kept_units), std::move(annotator_order),
                     std::move(criterion_ids), std::move(values)),
      std::move(drops)};
}

namespace {

std::vector<LongRow> rows_from_table(const csv::Table& t, const std::string& source) {
  const auto c_unit = t.column("unit_id");
  const auto c_annotator = t.column("annotator_id");
  const auto c_criterion = t.column("criterion_id");
  const auto c_value = t.column("value");
  std::vector<LongRow> rows;
  rows.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    LongRow row;
    row.unit_id = r[c_unit];
    row.annotator_id = r[c_annotator];
    row.criterion_id = r[c_criterion];
    const std::string& v = r[c_value];
    if (v == "0") row.value = 0;
    else if (v == "1") row.value = 1;
    else throw InputError(source + ": value '" + v + "' is not 0 or 1");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<LongRow> read_long_csv(const std::string& path) {
  return rows_from_table(csv::read_file(path), path);
}

std::vector<LongRow> parse_long_csv(const std::string& text, const std::string& source_name) {
  return rows_from_table(csv::parse_string(text, source_name), source_name);
}

VoteTable::VoteTable(std::vector<std::string> unit_ids,
                     std::vector<std::string> criterion_ids, std::vector<int> counts,
                     int panel_size)
    : unit_ids_(std::move(unit_ids)),
      criterion_ids_(std::move(criterion_ids)),
      counts_(std::move(counts)),
      panel_size_(panel_size) {
  if (counts_.size() != unit_ids_.size() * criterion_ids_.size()) {
    throw InvariantError("vote table buffer does not match axis sizes");
  }
  for (int c : counts_) {
    if (c < 0 || c > panel_size_) {
      throw InvariantError("vote count outside {0..panel_size}");
    }
  }
}

std::size_t VoteTable::criterion_index(const std::string& id) const {
  for (std::size_t i = 0; i < criterion_ids_.size(); ++i) {
    if (criterion_ids_[i] == id) return i;
  }
  throw InputError("unknown criterion id '" + id + "'");
}

VoteTable vote_counts(const ResponseTensor& tensor) {
  const std::size_t n_units = tensor.unit_count();
  const std::size_t n_annotators = tensor.annotator_count();
  const std::size_t n_criteria = tensor.criterion_count();
  std::vector<int> counts(n_units * n_criteria, 0);
  for (std::size_t s = 0; s < n_units; ++s) {
    for (std::size_t a = 0; a < n_annotators; ++a) {
      for (std::size_t q = 0; q < n_criteria; ++q) {
        counts[s * n_criteria + q] += tensor.at(s, a, q);
      }
    }
  }
  return VoteTable(tensor.unit_ids(), tensor.criterion_ids(), std::move(counts),
                   static_cast<int>(n_annotators));
}

FocusSet focus_set(const VoteTable& votes, const std::string& criterion_id, int threshold) {
  if (threshold < 0 || threshold > votes.panel_size()) {
    throw InputError("threshold " + std::to_string(threshold) +
                     " outside {0.." + std::to_string(votes.panel_size()) + "}");
  }
  const std::size_t q = votes.criterion_index(criterion_id);
  FocusSet fs;
  fs.criterion_id = criterion_id;
  fs.threshold = threshold;
  for (std::size_t s = 0; s < votes.unit_count(); ++s) {
    if (votes.at(s, q) >= threshold) fs.members.push_back(s);
  }
  return fs;
}

}  // namespace audit
