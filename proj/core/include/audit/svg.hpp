#pragma once

#include <string>
#include <vector>

#include "audit/schema.hpp"
#include "audit/separability.hpp"
#include "audit/stability.hpp"

namespace audit {

/// Conditional-overlap heatmap: one cell per directed pair, value-ramped;
/// masked within-category cells hatched, absent cells crossed out,
/// within-category blocks outlined. Deterministic text output.
std::string render_heatmap(const OverlapMatrix& matrix, const Schema& schema);

/// Stability landscape: activation (x) against near-tie rate (y), color
/// encoding unanimity, one labeled point per criterion. Criteria with an
/// empty focus set are omitted and noted under the legend.
std::string render_stability_landscape(const std::vector<StabilityRow>& rows,
                                       int threshold);

}  // namespace audit
