#include "audit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include <json.hpp>

#include "audit/errors.hpp"

namespace audit {

void PlantedSpec::validate() const {
  if (panel_size < 1) throw InputError("planted spec needs panel_size >= 1");
  if (criteria.empty()) throw InputError("planted spec needs at least one criterion");
  std::set<std::string> ids;
  for (const auto& c : criteria) {
    if (!ids.insert(c.id).second) {
      throw InputError("duplicate criterion '" + c.id + "' in planted spec");
    }
    if (c.distribution.size() != static_cast<std::size_t>(panel_size) + 1) {
      throw InputError("criterion '" + c.id + "' distribution must have " +
                       std::to_string(panel_size + 1) + " entries");
    }
    double total = 0.0;
    for (double p : c.distribution) {
      if (p < 0.0) throw InputError("criterion '" + c.id + "' has negative mass");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw InputError("criterion '" + c.id + "' distribution sums to " +
                       std::to_string(total) + ", expected 1");
    }
  }
  for (const auto& pair : co_activations) {
    if (!ids.count(pair.source) || !ids.count(pair.target)) {
      throw InputError("co-activation references unknown criterion ('" + pair.source +
                       "' -> '" + pair.target + "')");
    }
    if (pair.source == pair.target) {
      throw InputError("co-activation source and target must differ");
    }
    if (pair.rate < 0.0 || pair.rate > 1.0) {
      throw InputError("co-activation rate must lie in [0,1]");
    }
  }
}

PlantedSpec parse_planted_spec(const std::string& json_text,
                               const std::string& source_name) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(source_name + ": planted spec parse failure: " + e.what());
  }
  PlantedSpec spec;
  spec.panel_size = j.at("panel_size").get<int>();
  spec.seed = j.value("seed", 0ull);
  for (const auto& jc : j.at("criteria")) {
    PlantedSpec::CriterionPlan plan;
    plan.id = jc.at("id").get<std::string>();
    plan.distribution = jc.at("distribution").get<std::vector<double>>();
    spec.criteria.push_back(std::move(plan));
  }
  if (j.contains("co_activations")) {
    for (const auto& jp : j.at("co_activations")) {
      spec.co_activations.push_back({jp.at("source").get<std::string>(),
                                     jp.at("target").get<std::string>(),
                                     jp.at("rate").get<double>()});
    }
  }
  spec.validate();
  return spec;
}

PlantedSpec load_planted_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open planted spec '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_planted_spec(text, path);
}

namespace {

// Direct conditional chaining: each criterion has at most one parent.
// First constraint wins; a constraint that would close a cycle is
// skipped (reported as not applied).
struct Chain {
  // parent index, conditional rate, off-branch rate, clamped flag
  struct Link {
    int parent = -1;
    double rate_on = 0.0;
    double rate_off = 0.0;
    bool clamped = false;
    int pair_index = -1;
  };
  std::vector<Link> links;
  std::vector<std::size_t> eval_order;
};

Chain build_chain(const PlantedSpec& spec, const std::vector<double>& engage_prob,
                  GenerationReport& report) {
  const std::size_t n_q = spec.criteria.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t q = 0; q < n_q; ++q) index[spec.criteria[q].id] = q;

  Chain chain;
  chain.links.assign(n_q, {});

  auto reaches = [&](std::size_t from, std::size_t to) {
    // Walk parent links upward from `from` looking for `to`.
    int cur = static_cast<int>(from);
    while (cur >= 0) {
      if (static_cast<std::size_t>(cur) == to) return true;
      cur = chain.links[cur].parent;
    }
    return false;
  };

  for (std::size_t p = 0; p < spec.co_activations.size(); ++p) {
    const auto& pair = spec.co_activations[p];
    const std::size_t src = index[pair.source];
    const std::size_t tgt = index[pair.target];
    GenerationReport::PairOutcome outcome;
    outcome.source = pair.source;
    outcome.target = pair.target;
    outcome.target_rate = pair.rate;

    if (chain.links[tgt].parent >= 0 || reaches(src, tgt)) {
      // Already constrained, or would create a cycle: best effort only.
      report.pairs.push_back(outcome);
      continue;
    }
    auto& link = chain.links[tgt];
    link.parent = static_cast<int>(src);
    link.rate_on = pair.rate;
    link.pair_index = static_cast<int>(p);
    const double p_src = engage_prob[src];
    const double p_tgt = engage_prob[tgt];
    if (p_src >= 1.0) {
      link.rate_on = pair.rate;  // marginal is now `rate`, not p_tgt
      link.rate_off = 0.0;
      link.clamped = std::abs(pair.rate - p_tgt) > 1e-12;
    } else {
      double off = (p_tgt - p_src * pair.rate) / (1.0 - p_src);
      if (off < 0.0) {
        off = 0.0;
        link.clamped = true;
      } else if (off > 1.0) {
        off = 1.0;
        link.clamped = true;
      }
      link.rate_off = off;
    }
    outcome.applied = true;
    outcome.clamped = link.clamped;
    report.pairs.push_back(outcome);
  }

  // Parents before children; ties broken by criterion order.
  std::vector<bool> emitted(n_q, false);
  while (chain.eval_order.size() < n_q) {
    for (std::size_t q = 0; q < n_q; ++q) {
      if (emitted[q]) continue;
      const int parent = chain.links[q].parent;
      if (parent < 0 || emitted[parent]) {
        chain.eval_order.push_back(q);
        emitted[q] = true;
      }
    }
  }
  return chain;
}

}  // namespace

SynthResult generate(const PlantedSpec& spec, std::size_t n_units) {
  spec.validate();
  if (n_units < 1) throw InputError("n_units must be at least 1");

  const std::size_t n_q = spec.criteria.size();
  const int A = spec.panel_size;

  std::vector<double> engage_prob(n_q);
  for (std::size_t q = 0; q < n_q; ++q) {
    engage_prob[q] = 1.0 - spec.criteria[q].distribution[0];
  }

  GenerationReport report;
  Chain chain = build_chain(spec, engage_prob, report);

  // Conditional vote-count sampler over {1..A} given engagement.
  std::vector<std::vector<double>> conditional(n_q);
  for (std::size_t q = 0; q < n_q; ++q) {
    const auto& dist = spec.criteria[q].distribution;
    std::vector<double> cond(dist.begin() + 1, dist.end());
    const double total = std::accumulate(cond.begin(), cond.end(), 0.0);
    if (total > 0.0) {
      for (double& p : cond) p /= total;
    }
    conditional[q] = std::move(cond);
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  std::vector<std::string> unit_ids(n_units);
  for (std::size_t s = 0; s < n_units; ++s) {
    unit_ids[s] = "u" + std::to_string(s + 1);
  }
  std::vector<std::string> annotator_ids(A);
  for (int a = 0; a < A; ++a) annotator_ids[a] = "a" + std::to_string(a + 1);
  std::vector<std::string> criterion_ids(n_q);
  for (std::size_t q = 0; q < n_q; ++q) criterion_ids[q] = spec.criteria[q].id;

  std::vector<std::uint8_t> values(n_units * static_cast<std::size_t>(A) * n_q, 0);
  std::vector<std::uint8_t> engaged(n_q);
  std::vector<int> annotator_pool(A);

  std::vector<std::size_t> engaged_count(n_q, 0);
  std::vector<std::vector<std::size_t>> vote_hist(n_q, std::vector<std::size_t>(A + 1, 0));
  std::vector<std::size_t> pair_src_count(spec.co_activations.size(), 0);
  std::vector<std::size_t> pair_both_count(spec.co_activations.size(), 0);
  std::map<std::string, std::size_t> criterion_pos;
  for (std::size_t q = 0; q < n_q; ++q) criterion_pos[criterion_ids[q]] = q;

  for (std::size_t s = 0; s < n_units; ++s) {
    std::fill(engaged.begin(), engaged.end(), 0);
    for (std::size_t q : chain.eval_order) {
      const auto& link = chain.links[q];
      double p_engage = engage_prob[q];
      if (link.parent >= 0) {
        p_engage = engaged[link.parent] ? link.rate_on : link.rate_off;
      }
      if (coin(rng) >= p_engage) continue;
      engaged[q] = 1;

      int k = 1;
      const auto& cond = conditional[q];
      double u = coin(rng);
      for (int c = 0; c < A; ++c) {
        u -= cond[c];
        if (u <= 0.0) {
          k = c + 1;
          break;
        }
        if (c == A - 1) k = A;  // guard against rounding remainder
      }
      ++vote_hist[q][k];

      // Partial Fisher-Yates: the first k slots become the yes-voters.
      std::iota(annotator_pool.begin(), annotator_pool.end(), 0);
      for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<int> pick(i, A - 1);
        std::swap(annotator_pool[i], annotator_pool[pick(rng)]);
        values[(s * A + annotator_pool[i]) * n_q + q] = 1;
      }
    }
    for (std::size_t q = 0; q < n_q; ++q) engaged_count[q] += engaged[q];
    for (std::size_t p = 0; p < spec.co_activations.size(); ++p) {
      const auto& pair = spec.co_activations[p];
      if (engaged[criterion_pos[pair.source]]) {
        ++pair_src_count[p];
        if (engaged[criterion_pos[pair.target]]) ++pair_both_count[p];
      }
    }
  }

  for (std::size_t q = 0; q < n_q; ++q) {
    GenerationReport::CriterionOutcome outcome;
    outcome.id = criterion_ids[q];
    outcome.target_engagement = engage_prob[q];
    outcome.achieved_engagement =
        static_cast<double>(engaged_count[q]) / static_cast<double>(n_units);
    if (engaged_count[q] > 0) {
      for (int k = 1; k <= A; ++k) {
        outcome.achieved_conditional[k] = static_cast<double>(vote_hist[q][k]) /
                                          static_cast<double>(engaged_count[q]);
      }
    }
    report.criteria.push_back(std::move(outcome));
  }
  for (std::size_t p = 0; p < spec.co_activations.size(); ++p) {
    if (pair_src_count[p] > 0) {
      report.pairs[p].achieved_rate = static_cast<double>(pair_both_count[p]) /
                                      static_cast<double>(pair_src_count[p]);
    }
  }

  return SynthResult{ResponseTensor(std::move(unit_ids), std::move(annotator_ids),
                                    std::move(criterion_ids), std::move(values)),
                     std::move(report)};
}

std::string generation_report_to_json(const GenerationReport& report) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json criteria = nlohmann::ordered_json::array();
  for (const auto& c : report.criteria) {
    nlohmann::ordered_json jc;
    jc["id"] = c.id;
    jc["target_engagement"] = c.target_engagement;
    jc["achieved_engagement"] = c.achieved_engagement;
    nlohmann::ordered_json cond = nlohmann::ordered_json::object();
    for (const auto& [k, p] : c.achieved_conditional) {
      cond[std::to_string(k)] = p;
    }
    jc["achieved_conditional"] = std::move(cond);
    criteria.push_back(std::move(jc));
  }
  j["criteria"] = std::move(criteria);
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (const auto& p : report.pairs) {
    nlohmann::ordered_json jp;
    jp["source"] = p.source;
    jp["target"] = p.target;
    jp["target_rate"] = p.target_rate;
    jp["achieved_rate"] =
        p.achieved_rate ? nlohmann::ordered_json(*p.achieved_rate)
                        : nlohmann::ordered_json(nullptr);
    jp["applied"] = p.applied;
    jp["clamped"] = p.clamped;
    pairs.push_back(std::move(jp));
  }
  j["pairs"] = std::move(pairs);
  return j.dump(2) + "\n";
}

std::vector<LongRow> to_long_rows(const ResponseTensor& tensor) {
  std::vector<LongRow> rows;
  rows.reserve(tensor.unit_count() * tensor.annotator_count() * tensor.criterion_count());
  for (std::size_t s = 0; s < tensor.unit_count(); ++s) {
    for (std::size_t a = 0; a < tensor.annotator_count(); ++a) {
      for (std::size_t q = 0; q < tensor.criterion_count(); ++q) {
        rows.push_back({tensor.unit_ids()[s], tensor.annotator_ids()[a],
                        tensor.criterion_ids()[q], tensor.at(s, a, q)});
      }
    }
  }
  return rows;
}

}  // namespace audit
