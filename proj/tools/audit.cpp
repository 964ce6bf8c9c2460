// audit: schema-level diagnostics for multi-annotator criterion judgments.
//
// Subcommands cover the full workflow: collect raw panel responses
// (replayable transport), normalize them to binary decisions, materialize
// the dense response tensor, and compute stability / separability /
// robustness / human-validation diagnostics into a report bundle.
//
// Exit codes: 0 success, 1 input error, 2 internal invariant violation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "audit/csv.hpp"
#include "audit/errors.hpp"
#include "audit/human_validation.hpp"
#include "audit/normalize.hpp"
#include "audit/panel.hpp"
#include "audit/report.hpp"
#include "audit/svg.hpp"
#include "audit/synth.hpp"
#include "audit/tensor.hpp"
#include "audit/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void write_text(const std::string& out_dir, const std::string& name,
                const std::string& content) {
  fs::create_directories(out_dir);
  const fs::path path = fs::path(out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw audit::InputError("cannot write '" + path.string() + "'");
  out << content;
  std::cout << "wrote " << path.string() << "\n";
}

std::string long_rows_csv(const std::vector<audit::LongRow>& rows) {
  std::ostringstream out;
  out << "unit_id,annotator_id,criterion_id,value\n";
  for (const auto& r : rows) {
    out << audit::csv::join({r.unit_id, r.annotator_id, r.criterion_id,
                             std::to_string(r.value)})
        << "\n";
  }
  return out.str();
}

std::string raw_rows_csv(const std::vector<audit::RawRow>& rows) {
  std::ostringstream out;
  out << "unit_id,annotator_id,criterion_id,raw_text\n";
  for (const auto& r : rows) {
    out << audit::csv::join({r.unit_id, r.annotator_id, r.criterion_id, r.raw_text})
        << "\n";
  }
  return out.str();
}

ordered_json drop_report_json(const audit::DropReport& drops) {
  return {{"count", drops.count()}, {"unit_ids", drops.dropped_units}};
}

// Shared analysis inputs for stability/overlap/robustness/validate/report.
struct AnalysisArgs {
  std::string schema_path;
  std::string tensor_path;
  std::vector<std::string> annotators;
  std::vector<int> thresholds;
  std::string out_dir = "audit-out";
};

void add_analysis_options(CLI::App* cmd, AnalysisArgs& args) {
  cmd->add_option("--schema", args.schema_path, "schema JSON file")->required();
  cmd->add_option("--tensor", args.tensor_path,
                  "long-form binary CSV (unit_id,annotator_id,criterion_id,value)")
      ->required();
  cmd->add_option("--annotators", args.annotators,
                  "restrict the analysis panel to these annotator ids")
      ->delimiter(',');
  cmd->add_option("--thresholds", args.thresholds,
                  "vote thresholds to evaluate (default: 1,2,ceil(A/2))")
      ->delimiter(',');
  cmd->add_option("--out", args.out_dir, "output directory");
}

struct Analysis {
  audit::Schema schema;
  audit::AuditReport report;
};

Analysis run_analysis(const AnalysisArgs& args, const audit::RunOptions& options) {
  audit::Schema schema = audit::load_schema(args.schema_path);
  auto rows = audit::read_long_csv(args.tensor_path);
  auto built = audit::build_tensor(rows, schema);
  audit::AuditReport report =
      audit::run_audit(schema, built.tensor, args.tensor_path, options);
  report.drops = built.drops;
  return {std::move(schema), std::move(report)};
}

ordered_json report_subtree(const audit::AuditReport& report, const char* key) {
  const ordered_json whole = ordered_json::parse(audit::report_to_json(report));
  ordered_json j;
  j["tool"] = whole.at("tool");
  j["schema"] = whole.at("schema");
  j["tensor"] = whole.at("tensor");
  j["thresholds"] = whole.at("thresholds");
  j[key] = whole.at(key);
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"schema audit for multi-annotator criterion judgments"};
  app.set_version_flag("--version", audit::kToolVersion);
  app.require_subcommand(1);

  // --- ingest ---------------------------------------------------------
  auto* ingest = app.add_subcommand(
      "ingest", "validate a long-form grid and materialize the dense tensor");
  struct {
    std::string schema_path, tensor_path, out_dir = "audit-out";
  } ingest_args;
  ingest->add_option("--schema", ingest_args.schema_path, "schema JSON")->required();
  ingest->add_option("--tensor", ingest_args.tensor_path, "long-form CSV")->required();
  ingest->add_option("--out", ingest_args.out_dir, "output directory");

  // --- normalize ------------------------------------------------------
  auto* normalize =
      app.add_subcommand("normalize", "map raw responses to binary decisions");
  struct {
    std::string raw_path, rules_path, out_dir = "audit-out";
  } normalize_args;
  normalize->add_option("--raw", normalize_args.raw_path,
                        "raw CSV (unit_id,annotator_id,criterion_id,raw_text)")
      ->required();
  normalize->add_option("--rules", normalize_args.rules_path,
                        "rule table JSON (default: built-in Oui/Non table)");
  normalize->add_option("--out", normalize_args.out_dir, "output directory");

  // --- stability ------------------------------------------------------
  auto* stability = app.add_subcommand("stability", "per-criterion stability table");
  AnalysisArgs stability_args;
  add_analysis_options(stability, stability_args);

  // --- overlap --------------------------------------------------------
  auto* overlap =
      app.add_subcommand("overlap", "co-activation, coverage, and leakage matrices");
  AnalysisArgs overlap_args;
  bool overlap_mask = true;
  add_analysis_options(overlap, overlap_args);
  overlap->add_flag("--mask-within,!--no-mask-within", overlap_mask,
                    "mask within-category blocks in the heatmap (default on)");

  // --- robustness -----------------------------------------------------
  auto* robustness = app.add_subcommand(
      "robustness", "threshold sweeps and fixed-size leave-one-out panels");
  AnalysisArgs robustness_args;
  std::vector<std::string> loo_pool;
  std::size_t panel_size = 0;
  int top_k = 3;
  add_analysis_options(robustness, robustness_args);
  robustness->add_option("--loo-pool", loo_pool,
                         "annotator pool for remove-one panels (default: all)")
      ->delimiter(',');
  robustness->add_option("--panel-size", panel_size,
                         "fixed panel size (default: pool size - 1)");
  robustness->add_option("--top-k", top_k, "rank cutoff for hotspot frequency");

  // --- validate -------------------------------------------------------
  auto* validate =
      app.add_subcommand("validate", "reliability and alignment of expert labels");
  AnalysisArgs validate_args;
  std::string labels_path;
  int validation_threshold = 1;
  add_analysis_options(validate, validate_args);
  validate->add_option("--labels", labels_path,
                       "expert labels CSV (unit_id,expert_id,pass,category_id)")
      ->required();
  validate->add_option("--threshold", validation_threshold,
                       "engagement threshold for coverage (default 1)");

  // --- synth ----------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate a planted synthetic grid");
  struct {
    std::string spec_path, out_dir = "audit-out";
    std::size_t units = 1000;
    std::optional<std::uint64_t> seed;
  } synth_args;
  synth->add_option("--spec", synth_args.spec_path, "planted spec JSON")->required();
  synth->add_option("--units", synth_args.units, "number of units to generate");
  synth
      ->add_option_function<std::uint64_t>(
          "--seed", [&](std::uint64_t v) { synth_args.seed = v; },
          "override the seed in the planted-spec file")
      ->expected(1);
  synth->add_option("--out", synth_args.out_dir, "output directory");

  // --- collect --------------------------------------------------------
  auto* collect_cmd =
      app.add_subcommand("collect", "query a panel through a replayable transport");
  struct {
    std::string schema_path, corpus_path, config_path, template_path;
    std::string replay_path, record_path, out_dir = "audit-out";
  } collect_args;
  collect_cmd->add_option("--schema", collect_args.schema_path, "schema JSON")->required();
  collect_cmd->add_option("--corpus", collect_args.corpus_path,
                          "corpus CSV (unit_id,sentence)")
      ->required();
  collect_cmd->add_option("--config", collect_args.config_path, "panel config JSON")
      ->required();
  collect_cmd->add_option("--template", collect_args.template_path,
                          "prompt template with {sentence} and {question_text}")
      ->required();
  collect_cmd->add_option("--replay", collect_args.replay_path,
                          "replay fixture (JSONL); the shipped transport")
      ->required();
  collect_cmd->add_option("--record", collect_args.record_path,
                          "write a fresh fixture of the responses used");
  collect_cmd->add_option("--out", collect_args.out_dir, "output directory");

  // --- report ---------------------------------------------------------
  auto* report_cmd = app.add_subcommand("report", "full audit pipeline");
  AnalysisArgs report_args;
  bool report_mask = true;
  bool report_robustness = false;
  std::vector<std::string> report_loo_pool;
  std::size_t report_panel_size = 0;
  int report_top_k = 3;
  std::string report_labels;
  int report_validation_threshold = 1;
  add_analysis_options(report_cmd, report_args);
  report_cmd->add_flag("--mask-within,!--no-mask-within", report_mask,
                       "mask within-category blocks in the heatmap (default on)");
  report_cmd->add_flag("--robustness", report_robustness,
                       "include threshold-sweep and leave-one-out analyses");
  report_cmd->add_option("--loo-pool", report_loo_pool, "annotator pool for ablations")
      ->delimiter(',');
  report_cmd->add_option("--panel-size", report_panel_size, "fixed ablation panel size");
  report_cmd->add_option("--top-k", report_top_k, "rank cutoff for hotspot frequency");
  report_cmd->add_option("--labels", report_labels, "expert labels CSV");
  report_cmd->add_option("--threshold", report_validation_threshold,
                         "validation coverage threshold (default 1)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      const audit::Schema schema = audit::load_schema(ingest_args.schema_path);
      auto rows = audit::read_long_csv(ingest_args.tensor_path);
      const auto built = audit::build_tensor(rows, schema);
      ordered_json j;
      j["source"] = ingest_args.tensor_path;
      j["units"] = built.tensor.unit_count();
      j["annotators"] = built.tensor.annotator_ids();
      j["criteria"] = built.tensor.criterion_ids();
      j["dropped_units"] = drop_report_json(built.drops);
      write_text(ingest_args.out_dir, "ingest.json", j.dump(2) + "\n");
      write_text(ingest_args.out_dir, "tensor.csv",
                 long_rows_csv(audit::to_long_rows(built.tensor)));
    } else if (*normalize) {
      const audit::RuleTable rules = normalize_args.rules_path.empty()
                                         ? audit::RuleTable::defaults()
                                         : audit::load_rule_table(normalize_args.rules_path);
      const auto raw = audit::read_raw_csv(normalize_args.raw_path);
      const audit::CleanResult cleaned = audit::clean_grid(raw, rules);
      write_text(normalize_args.out_dir, "responses.csv", long_rows_csv(cleaned.rows));
      write_text(normalize_args.out_dir, "cleaning_report.json",
                 audit::cleaning_report_to_json(cleaned.report));
    } else if (*stability) {
      audit::RunOptions options;
      options.thresholds = stability_args.thresholds;
      options.annotators = stability_args.annotators;
      const Analysis analysis = run_analysis(stability_args, options);
      for (const auto& entry : analysis.report.sweeps) {
        const std::string suffix = "_t" + std::to_string(entry.threshold);
        write_text(stability_args.out_dir, "stability" + suffix + ".csv",
                   audit::stability_csv(entry.stability, analysis.schema));
        write_text(stability_args.out_dir, "landscape" + suffix + ".svg",
                   audit::render_stability_landscape(entry.stability, entry.threshold));
      }
      write_text(stability_args.out_dir, "stability.json",
                 report_subtree(analysis.report, "stability").dump(2) + "\n");
    } else if (*overlap) {
      audit::RunOptions options;
      options.thresholds = overlap_args.thresholds;
      options.annotators = overlap_args.annotators;
      options.mask_within = overlap_mask;
      const Analysis analysis = run_analysis(overlap_args, options);
      for (const auto& entry : analysis.report.sweeps) {
        const std::string suffix = "_t" + std::to_string(entry.threshold);
        write_text(overlap_args.out_dir, "overlap" + suffix + ".csv",
                   audit::overlap_csv(entry.overlap));
      }
      for (const auto& m : analysis.report.matrices) {
        const std::string suffix = "_t" + std::to_string(m.threshold);
        write_text(overlap_args.out_dir, "condov" + suffix + ".csv",
                   audit::condov_csv(m));
        write_text(overlap_args.out_dir, "heatmap" + suffix + ".svg",
                   audit::render_heatmap(m, analysis.schema));
      }
      ordered_json j = report_subtree(analysis.report, "overlap");
      j["condov"] =
          ordered_json::parse(audit::report_to_json(analysis.report)).at("condov");
      write_text(overlap_args.out_dir, "overlap.json", j.dump(2) + "\n");
    } else if (*robustness) {
      audit::RunOptions options;
      options.thresholds = robustness_args.thresholds;
      options.annotators = robustness_args.annotators;
      options.run_robustness = true;
      options.loo_pool = loo_pool;
      if (panel_size > 0) options.loo_panel_size = panel_size;
      options.top_k = top_k;
      const Analysis analysis = run_analysis(robustness_args, options);
      write_text(robustness_args.out_dir, "robustness.csv",
                 audit::threshold_robustness_csv(*analysis.report.robustness));
      write_text(robustness_args.out_dir, "annotator_profiles.csv",
                 audit::annotator_profiles_csv(analysis.report.robustness->profiles));
      if (analysis.report.robustness->loo) {
        write_text(robustness_args.out_dir, "loo.csv",
                   audit::loo_csv(*analysis.report.robustness->loo,
                                  analysis.report.robustness->loo->main_panel));
      }
      write_text(robustness_args.out_dir, "robustness.json",
                 report_subtree(analysis.report, "robustness").dump(2) + "\n");
    } else if (*validate) {
      audit::RunOptions options;
      options.thresholds = validate_args.thresholds;
      options.annotators = validate_args.annotators;
      options.labels_path = labels_path;
      options.validation_threshold = validation_threshold;
      const Analysis analysis = run_analysis(validate_args, options);
      write_text(validate_args.out_dir, "alignment.csv",
                 audit::alignment_csv(analysis.report.validation->alignment));
      write_text(validate_args.out_dir, "validation.json",
                 report_subtree(analysis.report, "validation").dump(2) + "\n");
    } else if (*synth) {
      audit::PlantedSpec spec = audit::load_planted_spec(synth_args.spec_path);
      if (synth_args.seed) spec.seed = *synth_args.seed;
      const audit::SynthResult result = audit::generate(spec, synth_args.units);
      write_text(synth_args.out_dir, "responses.csv",
                 long_rows_csv(audit::to_long_rows(result.tensor)));
      write_text(synth_args.out_dir, "generation_report.json",
                 audit::generation_report_to_json(result.report));
    } else if (*collect_cmd) {
      const audit::Schema schema = audit::load_schema(collect_args.schema_path);
      const auto corpus = audit::read_corpus_csv(collect_args.corpus_path);
      const audit::PanelConfig config = audit::load_panel_config(collect_args.config_path);
      const audit::PromptTemplate prompt =
          audit::PromptTemplate::from_file(collect_args.template_path);
      audit::ReplayTransport replay =
          audit::ReplayTransport::from_file(collect_args.replay_path);
      audit::CollectResult result;
      if (!collect_args.record_path.empty()) {
        audit::RecordingTransport recorder(replay);
        result = audit::collect(corpus, schema, config, prompt, recorder);
        recorder.write_fixture(collect_args.record_path);
        std::cout << "wrote " << collect_args.record_path << "\n";
      } else {
        result = audit::collect(corpus, schema, config, prompt, replay);
      }
      write_text(collect_args.out_dir, "raw_responses.csv", raw_rows_csv(result.rows));
      ordered_json j;
      j["cells"] = result.rows.size();
      j["missing"] = ordered_json::array();
      for (const auto& m : result.missing) {
        j["missing"].push_back({{"unit", m.unit_id},
                                {"annotator", m.annotator_id},
                                {"criterion", m.criterion_id},
                                {"attempts", m.attempts}});
      }
      write_text(collect_args.out_dir, "collect_report.json", j.dump(2) + "\n");
    } else if (*report_cmd) {
      audit::RunOptions options;
      options.thresholds = report_args.thresholds;
      options.annotators = report_args.annotators;
      options.mask_within = report_mask;
      options.run_robustness = report_robustness;
      options.loo_pool = report_loo_pool;
      if (report_panel_size > 0) options.loo_panel_size = report_panel_size;
      options.top_k = report_top_k;
      if (!report_labels.empty()) options.labels_path = report_labels;
      options.validation_threshold = report_validation_threshold;
      const Analysis analysis = run_analysis(report_args, options);
      for (const auto& name : audit::write_bundle(analysis.report, analysis.schema,
                                                  report_args.out_dir)) {
        std::cout << "wrote " << (fs::path(report_args.out_dir) / name).string() << "\n";
      }
    }
  } catch (const audit::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const audit::InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
