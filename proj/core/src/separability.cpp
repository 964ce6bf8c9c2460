#include "audit/separability.hpp"

#include "audit/errors.hpp"

namespace audit {

namespace {

void check_threshold(const VoteTable& votes, int threshold) {
  if (threshold < 0 || threshold > votes.panel_size()) {
    throw InputError("threshold " + std::to_string(threshold) + " outside {0.." +
                     std::to_string(votes.panel_size()) + "}");
  }
}

// Substantive-category position for each criterion on the vote table's
// axis, resolved by id so axis order never has to match schema order.
std::vector<int> category_positions(const VoteTable& votes, const Schema& schema,
                                    std::vector<std::string>& category_ids) {
  category_ids.clear();
  for (const auto& c : schema.categories()) {
    if (!c.non_target) category_ids.push_back(c.id);
  }
  std::vector<int> pos(votes.criterion_count(), -1);
  for (std::size_t q = 0; q < votes.criterion_count(); ++q) {
    const auto& cat = schema.criterion(votes.criterion_ids()[q]).category_id;
    for (std::size_t k = 0; k < category_ids.size(); ++k) {
      if (category_ids[k] == cat) {
        pos[q] = static_cast<int>(k);
        break;
      }
    }
  }
  return pos;
}

}  // namespace

EngagedSet engaged_criteria(const VoteTable& votes, std::size_t unit, int threshold) {
  check_threshold(votes, threshold);
  if (unit >= votes.unit_count()) {
    throw InputError("unknown unit index " + std::to_string(unit));
  }
  EngagedSet set;
  set.unit = unit;
  set.threshold = threshold;
  for (std::size_t q = 0; q < votes.criterion_count(); ++q) {
    if (votes.at(unit, q) >= threshold) set.criteria.push_back(votes.criterion_ids()[q]);
  }
  return set;
}

std::optional<double> conditional_overlap(const VoteTable& votes, const std::string& q,
                                          const std::string& q_prime, int threshold) {
  check_threshold(votes, threshold);
  const std::size_t qi = votes.criterion_index(q);
  const std::size_t qj = votes.criterion_index(q_prime);
  std::size_t antecedent = 0;
  std::size_t both = 0;
  for (std::size_t s = 0; s < votes.unit_count(); ++s) {
    if (votes.at(s, qi) >= threshold) {
      ++antecedent;
      if (votes.at(s, qj) >= threshold) ++both;
    }
  }
  if (antecedent == 0) return std::nullopt;
  return static_cast<double>(both) / static_cast<double>(antecedent);
}

CategoryActivation category_activation(const VoteTable& votes, const Schema& schema,
                                       std::size_t unit, int threshold) {
  check_threshold(votes, threshold);
  if (unit >= votes.unit_count()) {
    throw InputError("unknown unit index " + std::to_string(unit));
  }
  CategoryActivation act;
  act.unit = unit;
  act.threshold = threshold;
  std::vector<int> cat_pos = category_positions(votes, schema, act.category_ids);
  act.active.assign(act.category_ids.size(), false);
  for (std::size_t q = 0; q < votes.criterion_count(); ++q) {
    if (votes.at(unit, q) >= threshold && cat_pos[q] >= 0) {
      act.active[cat_pos[q]] = true;
    }
  }
  for (bool b : act.active) act.active_count += b ? 1 : 0;
  return act;
}

OverlapSummary overlap_summary(const VoteTable& votes, const Schema& schema, int threshold) {
  check_threshold(votes, threshold);
  std::vector<std::string> category_ids;
  const std::vector<int> cat_pos = category_positions(votes, schema, category_ids);

  OverlapSummary sum;
  sum.threshold = threshold;
  sum.unit_count = votes.unit_count();

  std::size_t gamma_total_covered = 0;
  std::vector<std::uint8_t> cat_active(category_ids.size());
  for (std::size_t s = 0; s < votes.unit_count(); ++s) {
    std::size_t gamma = 0;
    std::fill(cat_active.begin(), cat_active.end(), 0);
    for (std::size_t q = 0; q < votes.criterion_count(); ++q) {
      if (votes.at(s, q) >= threshold) {
        ++gamma;
        if (cat_pos[q] >= 0) cat_active[cat_pos[q]] = 1;
      }
    }
    int m = 0;
    for (auto b : cat_active) m += b;
    if (gamma >= 2) ++sum.multi_criterion_count;
    if (m >= 1) {
      ++sum.covered_count;
      gamma_total_covered += gamma;
      ++sum.gamma_histogram[gamma];
      if (gamma == 1) ++sum.gamma_1;
      else if (gamma == 2) ++sum.gamma_2;
      else if (gamma == 3) ++sum.gamma_3;
      else ++sum.gamma_4_plus;
    }
    if (m >= 2) ++sum.multi_category_count;
  }

  if (sum.unit_count > 0) {
    sum.coverage_rate = static_cast<double>(sum.covered_count) /
                        static_cast<double>(sum.unit_count);
    sum.overlap_cat = static_cast<double>(sum.multi_category_count) /
                      static_cast<double>(sum.unit_count);
    sum.overlap_crit = static_cast<double>(sum.multi_criterion_count) /
                       static_cast<double>(sum.unit_count);
  }
  if (sum.covered_count > 0) {
    sum.overlap_cat_given_cov = static_cast<double>(sum.multi_category_count) /
                                static_cast<double>(sum.covered_count);
    sum.mean_gamma = static_cast<double>(gamma_total_covered) /
                     static_cast<double>(sum.covered_count);
  }
  return sum;
}

OverlapMatrix leakage_matrix(const VoteTable& votes, const Schema& schema, int threshold,
                             bool mask_within) {
  check_threshold(votes, threshold);
  const std::size_t n_q = votes.criterion_count();
  const std::size_t n_s = votes.unit_count();

  OverlapMatrix m;
  m.threshold = threshold;
  m.criterion_ids = votes.criterion_ids();
  m.mask_within_category = mask_within;
  m.entries.assign(n_q * n_q, std::nullopt);
  m.within_category.assign(n_q * n_q, 0);

  // Packed focus membership per criterion: one bit per unit. Pair
  // intersections then reduce to AND + popcount over words.
  const std::size_t words = (n_s + 63) / 64;
  std::vector<std::uint64_t> membership(n_q * words, 0);
  std::vector<std::size_t> focus_sizes(n_q, 0);
  for (std::size_t s = 0; s < n_s; ++s) {
    for (std::size_t q = 0; q < n_q; ++q) {
      if (votes.at(s, q) >= threshold) {
        membership[q * words + s / 64] |= (std::uint64_t{1} << (s % 64));
        ++focus_sizes[q];
      }
    }
  }

  for (std::size_t qi = 0; qi < n_q; ++qi) {
    if (focus_sizes[qi] == 0) continue;
    const std::uint64_t* row_i = &membership[qi * words];
    for (std::size_t qj = 0; qj < n_q; ++qj) {
      const std::uint64_t* row_j = &membership[qj * words];
      std::size_t both = 0;
      for (std::size_t w = 0; w < words; ++w) {
        both += static_cast<std::size_t>(__builtin_popcountll(row_i[w] & row_j[w]));
      }
      m.entries[qi * n_q + qj] =
          static_cast<double>(both) / static_cast<double>(focus_sizes[qi]);
    }
  }

  for (std::size_t qi = 0; qi < n_q; ++qi) {
    const auto& cat_i = schema.criterion(m.criterion_ids[qi]).category_id;
    for (std::size_t qj = 0; qj < n_q; ++qj) {
      const auto& cat_j = schema.criterion(m.criterion_ids[qj]).category_id;
      if (cat_i == cat_j) m.within_category[qi * n_q + qj] = 1;
    }
  }
  return m;
}

}  // namespace audit
