#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "audit/tensor.hpp"

namespace audit {

/// Recipe for a synthetic response tensor with planted structure: a
/// target vote-count distribution per criterion and optional pairwise
/// engagement conditioning (target -> Bernoulli conditioned on source's
/// engagement, so the measured conditional overlap at t = 1 converges to
/// the requested rate).
struct PlantedSpec {
  struct CriterionPlan {
    std::string id;
    std::vector<double> distribution;  // mass over vote counts 0..panel_size
  };
  struct CoActivation {
    std::string source;
    std::string target;
    double rate = 0.0;  // desired CondOv(source -> target) at t = 1
  };

  int panel_size = 0;
  std::uint64_t seed = 0;
  std::vector<CriterionPlan> criteria;
  std::vector<CoActivation> co_activations;

  void validate() const;  // throws InputError
};

PlantedSpec load_planted_spec(const std::string& path);
PlantedSpec parse_planted_spec(const std::string& json_text,
                               const std::string& source_name = "<string>");

/// Achieved-vs-target accounting. Infeasible joint targets degrade
/// gracefully (clamped conditioning, skipped cyclic constraints) and are
/// reported here instead of failing generation.
struct GenerationReport {
  struct CriterionOutcome {
    std::string id;
    double target_engagement = 0.0;
    double achieved_engagement = 0.0;
    std::map<int, double> achieved_conditional;  // vote-count dist among engaged
  };
  struct PairOutcome {
    std::string source;
    std::string target;
    double target_rate = 0.0;
    std::optional<double> achieved_rate;  // absent if source never engaged
    bool applied = false;                 // planted via direct conditioning
    bool clamped = false;                 // off-branch probability left [0,1]
  };
  std::vector<CriterionOutcome> criteria;
  std::vector<PairOutcome> pairs;
};

struct SynthResult {
  ResponseTensor tensor;
  GenerationReport report;
};

/// Deterministic for a given spec + seed. Positive votes land on
/// uniformly chosen annotators.
SynthResult generate(const PlantedSpec& spec, std::size_t n_units);

/// Serializes a tensor back to long-form rows (unit-major order),
/// consumable by build_tensor.
std::vector<LongRow> to_long_rows(const ResponseTensor& tensor);

/// JSON text of the achieved-vs-target accounting.
std::string generation_report_to_json(const GenerationReport& report);

}  // namespace audit
