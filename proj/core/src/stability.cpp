#include "audit/stability.hpp"

#include <cstdlib>

#include "audit/errors.hpp"

namespace audit {

namespace {

void check_threshold(const VoteTable& votes, int threshold) {
  if (threshold < 0 || threshold > votes.panel_size()) {
    throw InputError("threshold " + std::to_string(threshold) + " outside {0.." +
                     std::to_string(votes.panel_size()) + "}");
  }
}

bool in_near_tie_zone(int k, int panel_size) {
  return k > 0 && k < panel_size && std::abs(2 * k - panel_size) <= 1;
}

}  // namespace

double activation_rate(const VoteTable& votes, const std::string& criterion_id,
                       int threshold) {
  check_threshold(votes, threshold);
  if (votes.unit_count() == 0) throw InputError("empty corpus");
  const std::size_t q = votes.criterion_index(criterion_id);
  std::size_t members = 0;
  for (std::size_t s = 0; s < votes.unit_count(); ++s) {
    if (votes.at(s, q) >= threshold) ++members;
  }
  return static_cast<double>(members) / static_cast<double>(votes.unit_count());
}

VoteDistribution vote_distribution(const VoteTable& votes, const std::string& criterion_id,
                                   int threshold) {
  check_threshold(votes, threshold);
  const std::size_t q = votes.criterion_index(criterion_id);
  VoteDistribution dist;
  dist.criterion_id = criterion_id;
  dist.threshold = threshold;
  dist.panel_size = votes.panel_size();

  std::vector<std::size_t> counts(votes.panel_size() + 1, 0);
  for (std::size_t s = 0; s < votes.unit_count(); ++s) {
    const int v = votes.at(s, q);
    if (v >= threshold) {
      ++dist.focus_size;
      ++counts[v];
    }
  }
  if (dist.focus_size == 0) return dist;
  for (int k = threshold; k <= votes.panel_size(); ++k) {
    dist.mass[k] =
        static_cast<double>(counts[k]) / static_cast<double>(dist.focus_size);
  }
  return dist;
}

ZoneRates zone_rates(const VoteDistribution& dist) {
  if (dist.empty()) {
    throw InputError("zone rates undefined for empty focus set (criterion '" +
                     dist.criterion_id + "')");
  }
  ZoneRates z;
  for (const auto& [k, p] : dist.mass) {
    if (k == dist.panel_size) {
      z.unanimous += p;
    } else if (in_near_tie_zone(k, dist.panel_size)) {
      z.near_tie += p;
    } else if (k >= 1) {
      z.asymmetric += p;
    }
    // k == 0 (possible only at t = 0) belongs to no zone.
  }
  return z;
}

double ambiguity_rate(const VoteDistribution& dist) {
  if (dist.empty()) {
    throw InputError("ambiguity undefined for empty focus set (criterion '" +
                     dist.criterion_id + "')");
  }
  return zone_rates(dist).near_tie;
}

std::vector<StabilityRow> stability_table(const VoteTable& votes, const Schema& schema,
                                          int threshold) {
  if (votes.unit_count() == 0) throw InputError("empty corpus");
  const auto& criteria = schema.criteria();
  if (votes.criterion_count() != criteria.size()) {
    throw InputError("vote table has " + std::to_string(votes.criterion_count()) +
                     " criteria, schema has " + std::to_string(criteria.size()));
  }
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (votes.criterion_ids()[i] != criteria[i].id) {
      throw InputError("criterion axis mismatch at position " + std::to_string(i) +
                       ": tensor has '" + votes.criterion_ids()[i] + "', schema has '" +
                       criteria[i].id + "'");
    }
  }

  std::vector<StabilityRow> rows;
  rows.reserve(criteria.size());
  for (const auto& q : criteria) {
    StabilityRow row;
    row.criterion_id = q.id;
    row.activation = activation_rate(votes, q.id, threshold);
    const VoteDistribution dist = vote_distribution(votes, q.id, threshold);
    row.focus_size = dist.focus_size;
    if (!dist.empty()) {
      const ZoneRates z = zone_rates(dist);
      row.near_tie = z.near_tie;
      row.asymmetric = z.asymmetric;
      row.unanimous = z.unanimous;
      row.ambiguity = z.near_tie;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace audit
