#include "audit/oracle.hpp"

#include <cstdlib>

#include "audit/errors.hpp"

namespace audit {

namespace {

// Positive votes for (unit, criterion), straight off the tensor.
int votes_for(const ResponseTensor& tensor, std::size_t s, std::size_t q) {
  int v = 0;
  for (std::size_t a = 0; a < tensor.annotator_count(); ++a) {
    v += tensor.at(s, a, q);
  }
  return v;
}

}  // namespace

OracleBundle oracle_audit(const ResponseTensor& tensor, const Schema& schema,
                          int threshold) {
  const int A = static_cast<int>(tensor.annotator_count());
  if (threshold < 0 || threshold > A) {
    throw InputError("threshold " + std::to_string(threshold) + " outside {0.." +
                     std::to_string(A) + "}");
  }
  const std::size_t n_s = tensor.unit_count();
  const std::size_t n_q = tensor.criterion_count();
  if (n_s == 0) throw InputError("empty corpus");

  OracleBundle bundle;

  // Stability, one criterion at a time.
  for (std::size_t q = 0; q < n_q; ++q) {
    StabilityRow row;
    row.criterion_id = tensor.criterion_ids()[q];

    std::size_t members = 0;
    std::vector<std::size_t> count_k(A + 1, 0);
    for (std::size_t s = 0; s < n_s; ++s) {
      const int v = votes_for(tensor, s, q);
      if (v >= threshold) {
        ++members;
        ++count_k[v];
      }
    }
    row.focus_size = members;
    row.activation = static_cast<double>(members) / static_cast<double>(n_s);
    if (members > 0) {
      double uy = 0.0, nt = 0.0, as = 0.0;
      for (int k = threshold; k <= A; ++k) {
        const double mass =
            static_cast<double>(count_k[k]) / static_cast<double>(members);
        if (k == A) uy += mass;
        else if (k > 0 && std::abs(2 * k - A) <= 1) nt += mass;
        else if (k >= 1) as += mass;
      }
      row.unanimous = uy;
      row.near_tie = nt;
      row.asymmetric = as;
      row.ambiguity = nt;
    }
    bundle.stability.push_back(std::move(row));
  }

  // Substantive category of each criterion, by schema position.
  std::vector<std::string> category_ids;
  for (const auto& c : schema.categories()) {
    if (!c.non_target) category_ids.push_back(c.id);
  }
  std::vector<int> cat_of(n_q, -1);
  for (std::size_t q = 0; q < n_q; ++q) {
    const auto& cat = schema.criterion(tensor.criterion_ids()[q]).category_id;
    for (std::size_t k = 0; k < category_ids.size(); ++k) {
      if (category_ids[k] == cat) cat_of[q] = static_cast<int>(k);
    }
  }

  // Coverage and overlap, one unit at a time.
  OverlapSummary& sum = bundle.overlap;
  sum.threshold = threshold;
  sum.unit_count = n_s;
  std::size_t gamma_total_covered = 0;
  for (std::size_t s = 0; s < n_s; ++s) {
    std::size_t gamma = 0;
    std::vector<std::uint8_t> active(category_ids.size(), 0);
    for (std::size_t q = 0; q < n_q; ++q) {
      if (votes_for(tensor, s, q) >= threshold) {
        ++gamma;
        if (cat_of[q] >= 0) active[cat_of[q]] = 1;
      }
    }
    int m = 0;
    for (auto b : active) m += b;
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
  sum.coverage_rate =
      static_cast<double>(sum.covered_count) / static_cast<double>(n_s);
  sum.overlap_cat =
      static_cast<double>(sum.multi_category_count) / static_cast<double>(n_s);
  sum.overlap_crit =
      static_cast<double>(sum.multi_criterion_count) / static_cast<double>(n_s);
  if (sum.covered_count > 0) {
    sum.overlap_cat_given_cov = static_cast<double>(sum.multi_category_count) /
                                static_cast<double>(sum.covered_count);
    sum.mean_gamma = static_cast<double>(gamma_total_covered) /
                     static_cast<double>(sum.covered_count);
  }

  // Directed conditional overlap, one pair at a time.
  OverlapMatrix& m = bundle.condov;
  m.threshold = threshold;
  m.criterion_ids = tensor.criterion_ids();
  m.entries.assign(n_q * n_q, std::nullopt);
  m.within_category.assign(n_q * n_q, 0);
  for (std::size_t qi = 0; qi < n_q; ++qi) {
    for (std::size_t qj = 0; qj < n_q; ++qj) {
      std::size_t antecedent = 0;
      std::size_t both = 0;
      for (std::size_t s = 0; s < n_s; ++s) {
        if (votes_for(tensor, s, qi) >= threshold) {
          ++antecedent;
          if (votes_for(tensor, s, qj) >= threshold) ++both;
        }
      }
      if (antecedent > 0) {
        m.entries[qi * n_q + qj] =
            static_cast<double>(both) / static_cast<double>(antecedent);
      }
      if (cat_of[qi] == cat_of[qj]) m.within_category[qi * n_q + qj] = 1;
    }
  }
  return bundle;
}

}  // namespace audit
