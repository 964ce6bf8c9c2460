#include <benchmark/benchmark.h>

#include <random>

#include "audit/oracle.hpp"
#include "audit/report.hpp"
#include "audit/robustness.hpp"
#include "audit/separability.hpp"
#include "audit/stability.hpp"
#include "audit/synth.hpp"
#include "audit/tensor.hpp"

namespace {

using namespace audit;

Schema make_schema(std::size_t n_criteria, std::size_t n_categories) {
  std::vector<Category> categories{{"c0", "none", true}};
  for (std::size_t k = 1; k <= n_categories; ++k) {
    categories.push_back({"c" + std::to_string(k), "cat", false});
  }
  std::vector<Criterion> criteria;
  for (std::size_t q = 1; q <= n_criteria; ++q) {
    criteria.push_back({"q" + std::to_string(q), "?",
                        "c" + std::to_string(1 + (q - 1) % n_categories)});
  }
  return Schema(categories, criteria);
}

ResponseTensor make_tensor(std::size_t n_units, int panel, std::size_t n_criteria,
                           double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::string> units, annotators, criteria;
  for (std::size_t s = 0; s < n_units; ++s) units.push_back("s" + std::to_string(s));
  for (int a = 0; a < panel; ++a) annotators.push_back("a" + std::to_string(a));
  for (std::size_t q = 1; q <= n_criteria; ++q) {
    criteria.push_back("q" + std::to_string(q));
  }
  std::vector<std::uint8_t> values(n_units * panel * n_criteria);
  for (auto& v : values) v = coin(rng) < density ? 1 : 0;
  return ResponseTensor(units, annotators, criteria, values);
}

// Corpus-scale inputs: the published audit ran 4,699 units x 5 x 9.
const std::size_t kPaperUnits = 4699;
const int kPaperPanel = 5;
const std::size_t kPaperCriteria = 9;

void BM_VoteCounts(benchmark::State& state) {
  const auto tensor = make_tensor(state.range(0), kPaperPanel, state.range(1), 0.1, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vote_counts(tensor));
  }
  state.SetItemsProcessed(state.iterations() * tensor.unit_count() *
                          tensor.annotator_count() * tensor.criterion_count());
}
BENCHMARK(BM_VoteCounts)
    ->Args({static_cast<long>(kPaperUnits), static_cast<long>(kPaperCriteria)})
    ->Args({100000, 32});

void BM_StabilityTable(benchmark::State& state) {
  const auto schema = make_schema(state.range(1), 3);
  const auto tensor = make_tensor(state.range(0), kPaperPanel, state.range(1), 0.1, 2);
  const auto votes = vote_counts(tensor);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stability_table(votes, schema, 1));
  }
}
BENCHMARK(BM_StabilityTable)
    ->Args({static_cast<long>(kPaperUnits), static_cast<long>(kPaperCriteria)})
    ->Args({100000, 32});

void BM_OverlapSummary(benchmark::State& state) {
  const auto schema = make_schema(state.range(1), 3);
  const auto tensor = make_tensor(state.range(0), kPaperPanel, state.range(1), 0.1, 3);
  const auto votes = vote_counts(tensor);
  for (auto _ : state) {
    benchmark::DoNotOptimize(overlap_summary(votes, schema, 1));
  }
}
BENCHMARK(BM_OverlapSummary)
    ->Args({static_cast<long>(kPaperUnits), static_cast<long>(kPaperCriteria)})
    ->Args({100000, 32});

void BM_LeakageMatrix(benchmark::State& state) {
  const auto schema = make_schema(state.range(1), 3);
  const auto tensor = make_tensor(state.range(0), kPaperPanel, state.range(1), 0.1, 4);
  const auto votes = vote_counts(tensor);
  for (auto _ : state) {
    benchmark::DoNotOptimize(leakage_matrix(votes, schema, 1, true));
  }
}
BENCHMARK(BM_LeakageMatrix)
    ->Args({static_cast<long>(kPaperUnits), static_cast<long>(kPaperCriteria)})
    ->Args({100000, 32});

void BM_FullAudit(benchmark::State& state) {
  const auto schema = make_schema(kPaperCriteria, 3);
  const auto tensor = make_tensor(kPaperUnits, kPaperPanel, kPaperCriteria, 0.1, 5);
  RunOptions options;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_audit(schema, tensor, "bench", options));
  }
}
BENCHMARK(BM_FullAudit);

void BM_OracleAudit(benchmark::State& state) {
  const auto schema = make_schema(6, 3);
  const auto tensor = make_tensor(state.range(0), kPaperPanel, 6, 0.2, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle_audit(tensor, schema, 1));
  }
}
BENCHMARK(BM_OracleAudit)->Arg(50)->Arg(200);

void BM_SynthGenerate(benchmark::State& state) {
  PlantedSpec spec;
  spec.panel_size = 5;
  spec.seed = 11;
  spec.criteria.push_back({"q1", {0.6, 0.08, 0.08, 0.08, 0.08, 0.08}});
  spec.criteria.push_back({"q2", {0.5, 0.05, 0.15, 0.15, 0.05, 0.1}});
  spec.co_activations.push_back({"q1", "q2", 0.85});
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate(spec, state.range(0)));
  }
}
BENCHMARK(BM_SynthGenerate)->Arg(10000)->Arg(50000);

}  // namespace

BENCHMARK_MAIN();
