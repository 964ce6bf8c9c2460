#include "audit/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "audit/errors.hpp"

namespace audit {

std::vector<int> default_thresholds(int panel_size) {
  std::set<int> ts{1, 2, (panel_size + 1) / 2};
  std::vector<int> out(ts.begin(), ts.end());
  out.erase(std::remove_if(out.begin(), out.end(),
                           [panel_size](int t) { return t > panel_size; }),
            out.end());
  return out;
}

std::vector<ThresholdSweepEntry> threshold_sweep(const VoteTable& votes,
                                                 const Schema& schema,
                                                 const std::vector<int>& thresholds) {
  std::vector<ThresholdSweepEntry> out;
  out.reserve(thresholds.size());
  for (int t : thresholds) {
    ThresholdSweepEntry entry;
    entry.threshold = t;
    entry.stability = stability_table(votes, schema, t);
    entry.overlap = overlap_summary(votes, schema, t);
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<PanelVariant> loo_panels(const ResponseTensor& tensor,
                                     const std::vector<std::string>& pool,
                                     std::size_t panel_size) {
  if (panel_size == 0) throw InputError("panel size must be positive");
  if (panel_size > pool.size()) {
    throw InputError("panel size " + std::to_string(panel_size) +
                     " exceeds pool of " + std::to_string(pool.size()));
  }
  if (pool.size() - panel_size > 1) {
    throw InputError("pool of " + std::to_string(pool.size()) +
                     " with panel size " + std::to_string(panel_size) +
                     " would drop more than one annotator; only remove-one "
                     "panels are supported");
  }
  std::set<std::string> pool_set;
  for (const auto& id : pool) {
    tensor.annotator_index(id);  // validates
    if (!pool_set.insert(id).second) {
      throw InputError("duplicate annotator '" + id + "' in pool");
    }
  }

  std::vector<PanelVariant> variants;
  if (pool.size() == panel_size) {
    variants.push_back({"full", pool});
    return variants;
  }
  // Enumeration order: lexicographic over the dropped annotator id.
  std::vector<std::string> dropped(pool_set.begin(), pool_set.end());
  for (const auto& drop : dropped) {
    PanelVariant v;
    v.name = "drop:" + drop;
    for (const auto& id : pool) {
      if (id != drop) v.annotator_ids.push_back(id);
    }
    variants.push_back(std::move(v));
  }
  return variants;
}

RankStability rank_stability(const std::vector<MetricByVariant>& variants,
                             const std::vector<std::string>& criterion_order,
                             int top_k, const std::string& metric_name) {
  if (top_k < 1) throw InputError("top-k must be at least 1");
  if (variants.empty()) throw InputError("rank stability needs at least one variant");
  for (const auto& v : variants) {
    if (v.values.size() != criterion_order.size()) {
      throw InputError("variant '" + v.variant + "' covers " +
                       std::to_string(v.values.size()) + " criteria, expected " +
                       std::to_string(criterion_order.size()));
    }
    for (const auto& q : criterion_order) {
      if (!v.values.count(q)) {
        throw InputError("variant '" + v.variant + "' is missing criterion '" + q + "'");
      }
    }
  }

  RankStability out;
  out.metric_name = metric_name;
  out.top_k = top_k;
  for (const auto& v : variants) out.variant_names.push_back(v.variant);

  out.criteria.reserve(criterion_order.size());
  for (const auto& q : criterion_order) {
    CriterionRank row;
    row.criterion_id = q;
    out.criteria.push_back(std::move(row));
  }

  for (const auto& v : variants) {
    for (auto& row : out.criteria) {
      const auto value = v.values.at(row.criterion_id);
      row.values[v.variant] = value;
      if (!value) continue;
      ++row.defined_count;
      if (!row.min_value || *value < *row.min_value) row.min_value = *value;
      if (!row.max_value || *value > *row.max_value) row.max_value = *value;
      int rank = 1;
      for (const auto& [other, other_value] : v.values) {
        if (other != row.criterion_id && other_value && *other_value > *value) ++rank;
      }
      if (!row.best_rank || rank < *row.best_rank) row.best_rank = rank;
      if (!row.worst_rank || rank > *row.worst_rank) row.worst_rank = rank;
      if (rank <= top_k) ++row.top_k_count;
    }
  }
  return out;
}

AnnotatorProfiles annotator_profiles(const ResponseTensor& tensor, const Schema& schema) {
  const auto& criteria = schema.criteria();
  if (tensor.criterion_count() != criteria.size()) {
    throw InputError("tensor criterion axis does not match schema");
  }
  AnnotatorProfiles p;
  p.annotator_ids = tensor.annotator_ids();
  p.criterion_ids = tensor.criterion_ids();
  p.rates.assign(tensor.annotator_count() * tensor.criterion_count(), 0.0);
  if (tensor.unit_count() == 0) return p;
  for (std::size_t a = 0; a < tensor.annotator_count(); ++a) {
    for (std::size_t q = 0; q < tensor.criterion_count(); ++q) {
      std::size_t positives = 0;
      for (std::size_t s = 0; s < tensor.unit_count(); ++s) {
        positives += tensor.at(s, a, q);
      }
      p.rates[a * tensor.criterion_count() + q] =
          static_cast<double>(positives) / static_cast<double>(tensor.unit_count());
    }
  }
  return p;
}

CorrelationMatrix annotator_correlations(const ResponseTensor& tensor,
                                         const std::string& criterion_id, int threshold) {
  const VoteTable votes = vote_counts(tensor);
  const FocusSet focus = focus_set(votes, criterion_id, threshold);
  if (focus.size() < 2) {
    throw InputError("focus set for '" + criterion_id + "' at t=" +
                     std::to_string(threshold) + " has fewer than 2 units");
  }
  const std::size_t q = votes.criterion_index(criterion_id);
  const std::size_t n_a = tensor.annotator_count();
  const std::size_t n = focus.size();

  CorrelationMatrix m;
  m.criterion_id = criterion_id;
  m.threshold = threshold;
  m.annotator_ids = tensor.annotator_ids();
  m.entries.assign(n_a * n_a, std::nullopt);

  // Binary vectors restricted to the focus set; Pearson reduces to the
  // phi coefficient here.
  std::vector<std::vector<std::uint8_t>> restricted(n_a, std::vector<std::uint8_t>(n));
  for (std::size_t a = 0; a < n_a; ++a) {
    for (std::size_t i = 0; i < n; ++i) {
      restricted[a][i] = tensor.at(focus.members[i], a, q);
    }
  }

  for (std::size_t a = 0; a < n_a; ++a) {
    for (std::size_t b = a; b < n_a; ++b) {
      double sum_x = 0, sum_y = 0, sum_xy = 0, sum_x2 = 0, sum_y2 = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = restricted[a][i];
        const double y = restricted[b][i];
        sum_x += x;
        sum_y += y;
        sum_xy += x * y;
        sum_x2 += x * x;
        sum_y2 += y * y;
      }
      const double nn = static_cast<double>(n);
      const double var_x = nn * sum_x2 - sum_x * sum_x;
      const double var_y = nn * sum_y2 - sum_y * sum_y;
      if (var_x <= 0.0 || var_y <= 0.0) continue;  // constant vector: absent
      const double r = (nn * sum_xy - sum_x * sum_y) / std::sqrt(var_x * var_y);
      m.entries[a * n_a + b] = r;
      m.entries[b * n_a + a] = r;
    }
  }
  return m;
}

}  // namespace audit
