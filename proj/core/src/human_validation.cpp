#include "audit/human_validation.hpp"

#include <algorithm>
#include <set>

#include "audit/csv.hpp"
#include "audit/errors.hpp"
#include "audit/separability.hpp"

namespace audit {

HumanLabels::HumanLabels(std::vector<LabelRecord> records, const Schema& schema)
    : records_(std::move(records)) {
  std::set<std::string> seen_keys;
  std::set<std::string> seen_experts;
  for (const auto& r : records_) {
    if (r.pass != 1 && r.pass != 2) {
      throw InputError("label pass must be 1 or 2, got " + std::to_string(r.pass));
    }
    if (!schema.has_category(r.category_id)) {
      throw InputError("label references unknown category '" + r.category_id + "'");
    }
    const std::string key =
        r.unit_id + "\x1f" + r.expert_id + "\x1f" + std::to_string(r.pass);
    if (!seen_keys.insert(key).second) {
      throw InputError("duplicate label for (" + r.unit_id + ", " + r.expert_id +
                       ", pass " + std::to_string(r.pass) + ")");
    }
    if (seen_experts.insert(r.expert_id).second) {
      expert_ids_.push_back(r.expert_id);
    }
    if (r.pass == 1) {
      pass1_by_unit_[r.unit_id].emplace_back(r.expert_id, r.category_id);
    }
  }
}

namespace {

std::vector<LabelRecord> label_rows_from_table(const csv::Table& t,
                                               const std::string& source) {
  const auto c_unit = t.column("unit_id");
  const auto c_expert = t.column("expert_id");
  const auto c_pass = t.column("pass");
  const auto c_category = t.column("category_id");
  std::vector<LabelRecord> rows;
  rows.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    LabelRecord rec;
    rec.unit_id = r[c_unit];
    rec.expert_id = r[c_expert];
    try {
      rec.pass = std::stoi(r[c_pass]);
    } catch (const std::exception&) {
      throw InputError(source + ": pass '" + r[c_pass] + "' is not an integer");
    }
    rec.category_id = r[c_category];
    rows.push_back(std::move(rec));
  }
  return rows;
}

}  // namespace

HumanLabels load_human_labels(const std::string& path, const Schema& schema) {
  return HumanLabels(label_rows_from_table(csv::read_file(path), path), schema);
}

HumanLabels parse_human_labels(const std::string& csv_text, const Schema& schema,
                               const std::string& source_name) {
  return HumanLabels(label_rows_from_table(csv::parse_string(csv_text, source_name),
                                           source_name),
                     schema);
}

PairwiseAgreement pairwise_agreement(const HumanLabels& labels) {
  const auto& experts = labels.expert_ids();
  if (experts.size() < 2) {
    throw InputError("pairwise agreement needs at least two experts");
  }
  const std::size_t n_e = experts.size();
  std::map<std::string, std::size_t> expert_pos;
  for (std::size_t i = 0; i < n_e; ++i) expert_pos[experts[i]] = i;

  std::vector<std::size_t> shared(n_e * n_e, 0);
  std::vector<std::size_t> agreed(n_e * n_e, 0);
  for (const auto& [unit, assignments] : labels.pass1_by_unit()) {
    for (std::size_t i = 0; i < assignments.size(); ++i) {
      for (std::size_t j = i + 1; j < assignments.size(); ++j) {
        const std::size_t a = expert_pos[assignments[i].first];
        const std::size_t b = expert_pos[assignments[j].first];
        ++shared[a * n_e + b];
        ++shared[b * n_e + a];
        if (assignments[i].second == assignments[j].second) {
          ++agreed[a * n_e + b];
          ++agreed[b * n_e + a];
        }
      }
    }
  }

  bool any_shared = false;
  PairwiseAgreement m;
  m.expert_ids = experts;
  m.entries.assign(n_e * n_e, std::nullopt);
  for (std::size_t a = 0; a < n_e; ++a) {
    m.entries[a * n_e + a] = 1.0;
    for (std::size_t b = 0; b < n_e; ++b) {
      if (a != b && shared[a * n_e + b] > 0) {
        any_shared = true;
        m.entries[a * n_e + b] = static_cast<double>(agreed[a * n_e + b]) /
                                 static_cast<double>(shared[a * n_e + b]);
      }
    }
  }
  if (!any_shared) {
    throw InputError("no pair of experts shares any pass-1 unit");
  }
  return m;
}

FleissResult fleiss_kappa(const HumanLabels& labels, const Schema& schema) {
  std::vector<std::string> categories;
  for (const auto& c : schema.categories()) categories.push_back(c.id);
  std::map<std::string, std::size_t> cat_pos;
  for (std::size_t i = 0; i < categories.size(); ++i) cat_pos[categories[i]] = i;

  // The fullest panel defines n; units rated by fewer experts are dropped.
  std::size_t n = 0;
  for (const auto& [unit, assignments] : labels.pass1_by_unit()) {
    n = std::max(n, assignments.size());
  }
  if (n < 2) {
    throw InputError("Fleiss' kappa needs units rated by at least two experts");
  }

  FleissResult result;
  result.raters_per_unit = static_cast<int>(n);

  std::vector<std::size_t> category_totals(categories.size(), 0);
  double sum_p_i = 0.0;
  for (const auto& [unit, assignments] : labels.pass1_by_unit()) {
    if (assignments.size() != n) {
      result.dropped_units.push_back(unit);
      continue;
    }
    ++result.included_units;
    std::vector<std::size_t> counts(categories.size(), 0);
    for (const auto& [expert, category] : assignments) {
      ++counts[cat_pos[category]];
    }
    std::size_t pairs_agree = 0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
      pairs_agree += counts[j] * (counts[j] - 1);
      category_totals[j] += counts[j];
    }
    sum_p_i += static_cast<double>(pairs_agree) / static_cast<double>(n * (n - 1));
  }
  if (result.included_units == 0) {
    throw InputError("no unit is rated by the full expert panel");
  }

  const double total_ratings = static_cast<double>(result.included_units * n);
  double p_e = 0.0;
  for (std::size_t j = 0; j < categories.size(); ++j) {
    const double p_j = static_cast<double>(category_totals[j]) / total_ratings;
    p_e += p_j * p_j;
  }
  result.observed_agreement = sum_p_i / static_cast<double>(result.included_units);
  result.expected_agreement = p_e;
  if (p_e < 1.0) {
    result.kappa = (result.observed_agreement - p_e) / (1.0 - p_e);
  }
  return result;
}

std::vector<TestRetestRow> test_retest(const HumanLabels& labels) {
  // (expert, unit) -> per-pass category.
  std::map<std::string, std::map<std::string, std::map<int, std::string>>> grid;
  for (const auto& r : labels.records()) {
    grid[r.expert_id][r.unit_id][r.pass] = r.category_id;
  }
  std::vector<TestRetestRow> rows;
  for (const auto& expert : labels.expert_ids()) {
    TestRetestRow row;
    row.expert_id = expert;
    for (const auto& [unit, passes] : grid[expert]) {
      auto p1 = passes.find(1);
      auto p2 = passes.find(2);
      if (p1 != passes.end() && p2 != passes.end()) {
        ++row.repeats;
        if (p1->second == p2->second) ++row.matches;
      }
    }
    if (row.repeats > 0) {
      row.consistency =
          static_cast<double>(row.matches) / static_cast<double>(row.repeats);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

struct CoveredLabeledUnit {
  std::size_t tensor_index;
  const std::vector<std::pair<std::string, std::string>>* assignments;
  CategoryActivation activation;
};

std::vector<CoveredLabeledUnit> covered_labeled_units(const HumanLabels& labels,
                                                      const VoteTable& votes,
                                                      const Schema& schema,
                                                      int threshold) {
  std::map<std::string, std::size_t> unit_pos;
  for (std::size_t s = 0; s < votes.unit_count(); ++s) {
    unit_pos[votes.unit_ids()[s]] = s;
  }
  std::vector<CoveredLabeledUnit> out;
  for (const auto& [unit, assignments] : labels.pass1_by_unit()) {
    auto it = unit_pos.find(unit);
    if (it == unit_pos.end()) continue;
    CategoryActivation act = category_activation(votes, schema, it->second, threshold);
    if (act.active_count >= 1) {
      out.push_back({it->second, &assignments, std::move(act)});
    }
  }
  return out;
}

}  // namespace

std::vector<BoundaryAlignmentRow> boundary_alignment(const HumanLabels& labels,
                                                     const VoteTable& votes,
                                                     const Schema& schema, int threshold) {
  const auto covered = covered_labeled_units(labels, votes, schema, threshold);
  if (covered.empty()) {
    throw InputError("no covered unit carries expert labels at t=" +
                     std::to_string(threshold));
  }
  const auto substantive = schema.substantive_categories();

  std::vector<BoundaryAlignmentRow> rows;
  for (std::size_t a = 0; a < substantive.size(); ++a) {
    for (std::size_t b = a + 1; b < substantive.size(); ++b) {
      BoundaryAlignmentRow row;
      row.category_a = substantive[a].id;
      row.category_b = substantive[b].id;
      row.covered_count = covered.size();
      std::size_t split = 0;
      std::size_t coact = 0;
      for (const auto& u : covered) {
        bool has_a = false;
        bool has_b = false;
        for (const auto& [expert, category] : *u.assignments) {
          has_a = has_a || category == row.category_a;
          has_b = has_b || category == row.category_b;
        }
        if (has_a && has_b) ++split;
        if (u.activation.active[a] && u.activation.active[b]) ++coact;
      }
      row.human_split = static_cast<double>(split) / static_cast<double>(covered.size());
      row.diag_coact = static_cast<double>(coact) / static_cast<double>(covered.size());
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

DisagreementByOverlap split_by_overlap(const HumanLabels& labels, const VoteTable& votes,
                                       const Schema& schema, int threshold) {
  const auto covered = covered_labeled_units(labels, votes, schema, threshold);
  if (covered.empty()) {
    throw InputError("no covered unit carries expert labels at t=" +
                     std::to_string(threshold));
  }
  DisagreementByOverlap out;
  out.threshold = threshold;
  std::size_t split_single = 0;
  std::size_t split_multi = 0;
  for (const auto& u : covered) {
    bool unanimous = true;
    for (std::size_t i = 1; i < u.assignments->size(); ++i) {
      if ((*u.assignments)[i].second != (*u.assignments)[0].second) {
        unanimous = false;
        break;
      }
    }
    if (u.activation.active_count >= 2) {
      ++out.multi_category_units;
      if (!unanimous) ++split_multi;
    } else {
      ++out.single_category_units;
      if (!unanimous) ++split_single;
    }
  }
  if (out.single_category_units > 0) {
    out.disagreement_single = static_cast<double>(split_single) /
                              static_cast<double>(out.single_category_units);
  }
  if (out.multi_category_units > 0) {
    out.disagreement_multi = static_cast<double>(split_multi) /
                             static_cast<double>(out.multi_category_units);
  }
  return out;
}

}  // namespace audit
