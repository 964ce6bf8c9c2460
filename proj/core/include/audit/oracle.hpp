#pragma once

#include "audit/separability.hpp"
#include "audit/stability.hpp"

namespace audit {

/// Everything the stability and separability fast paths compute at one
/// threshold, re-derived independently.
struct OracleBundle {
  std::vector<StabilityRow> stability;
  OverlapSummary overlap;
  OverlapMatrix condov;
};

/// Reference implementation of every stability and separability statistic
/// by direct nested loops over the defining formulas, with no vote table,
/// focus sets, or other shared intermediates. Intended for small inputs
/// (property tests); quadratic in criteria and linear in cells per pair.
OracleBundle oracle_audit(const ResponseTensor& tensor, const Schema& schema,
                          int threshold);

}  // namespace audit
