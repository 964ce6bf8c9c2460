#include "audit/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "audit/csv.hpp"
#include "audit/errors.hpp"
#include "audit/svg.hpp"
#include "audit/version.hpp"

namespace audit {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string pct(double fraction, int decimals = 1) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, fraction * 100.0);
  return buf;
}

std::string num(double v, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

ordered_json opt_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

ordered_json stability_rows_json(const std::vector<StabilityRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j;
    j["criterion"] = r.criterion_id;
    j["activation"] = r.activation;
    j["focus_size"] = r.focus_size;
    j["near_tie"] = opt_json(r.near_tie);
    j["asymmetric"] = opt_json(r.asymmetric);
    j["unanimous"] = opt_json(r.unanimous);
    j["ambiguity"] = opt_json(r.ambiguity);
    arr.push_back(std::move(j));
  }
  return arr;
}

ordered_json overlap_json(const OverlapSummary& s) {
  ordered_json j;
  j["threshold"] = s.threshold;
  j["units"] = s.unit_count;
  j["covered"] = s.covered_count;
  j["coverage"] = s.coverage_rate;
  j["overlap_cat_given_cov"] = opt_json(s.overlap_cat_given_cov);
  j["overlap_cat"] = s.overlap_cat;
  j["overlap_crit"] = s.overlap_crit;
  j["gamma_buckets"] = {{"1", s.gamma_1}, {"2", s.gamma_2}, {"3", s.gamma_3},
                        {"4+", s.gamma_4_plus}};
  ordered_json hist = ordered_json::object();
  for (const auto& [gamma, count] : s.gamma_histogram) {
    hist[std::to_string(gamma)] = count;
  }
  j["gamma_histogram"] = std::move(hist);
  j["mean_gamma"] = opt_json(s.mean_gamma);
  return j;
}

ordered_json matrix_json(const OverlapMatrix& m) {
  const std::size_t n = m.criterion_ids.size();
  ordered_json j;
  j["threshold"] = m.threshold;
  j["criteria"] = m.criterion_ids;
  j["mask_within_category"] = m.mask_within_category;
  ordered_json entries = ordered_json::array();
  ordered_json within = ordered_json::array();
  for (std::size_t i = 0; i < n; ++i) {
    ordered_json row = ordered_json::array();
    ordered_json wrow = ordered_json::array();
    for (std::size_t k = 0; k < n; ++k) {
      row.push_back(opt_json(m.at(i, k)));
      wrow.push_back(m.is_within_category(i, k));
    }
    entries.push_back(std::move(row));
    within.push_back(std::move(wrow));
  }
  j["entries"] = std::move(entries);
  j["within_category"] = std::move(within);
  return j;
}

ordered_json rank_stability_json(const RankStability& rs) {
  ordered_json j;
  j["metric"] = rs.metric_name;
  j["top_k"] = rs.top_k;
  j["variants"] = rs.variant_names;
  ordered_json arr = ordered_json::array();
  for (const auto& row : rs.criteria) {
    ordered_json r;
    r["criterion"] = row.criterion_id;
    ordered_json values = ordered_json::object();
    for (const auto& name : rs.variant_names) {
      values[name] = opt_json(row.values.at(name));
    }
    r["values"] = std::move(values);
    r["min"] = opt_json(row.min_value);
    r["max"] = opt_json(row.max_value);
    r["best_rank"] = row.best_rank ? ordered_json(*row.best_rank) : ordered_json(nullptr);
    r["worst_rank"] =
        row.worst_rank ? ordered_json(*row.worst_rank) : ordered_json(nullptr);
    r["top_k_count"] = row.top_k_count;
    r["defined_count"] = row.defined_count;
    arr.push_back(std::move(r));
  }
  j["criteria"] = std::move(arr);
  return j;
}

ordered_json validation_json(const ValidationResults& v) {
  ordered_json j;
  j["threshold"] = v.threshold;

  ordered_json pw;
  pw["experts"] = v.pairwise.expert_ids;
  ordered_json pm = ordered_json::array();
  const std::size_t n_e = v.pairwise.expert_ids.size();
  for (std::size_t a = 0; a < n_e; ++a) {
    ordered_json row = ordered_json::array();
    for (std::size_t b = 0; b < n_e; ++b) row.push_back(opt_json(v.pairwise.at(a, b)));
    pm.push_back(std::move(row));
  }
  pw["matrix"] = std::move(pm);
  j["pairwise_agreement"] = std::move(pw);

  ordered_json fl;
  fl["kappa"] = opt_json(v.fleiss.kappa);
  fl["raters_per_unit"] = v.fleiss.raters_per_unit;
  fl["included_units"] = v.fleiss.included_units;
  fl["dropped_units"] = v.fleiss.dropped_units;
  fl["observed_agreement"] = v.fleiss.observed_agreement;
  fl["expected_agreement"] = v.fleiss.expected_agreement;
  j["fleiss"] = std::move(fl);

  ordered_json rt = ordered_json::array();
  for (const auto& row : v.retest) {
    rt.push_back({{"expert", row.expert_id},
                  {"repeats", row.repeats},
                  {"matches", row.matches},
                  {"consistency", opt_json(row.consistency)}});
  }
  j["test_retest"] = std::move(rt);

  ordered_json al = ordered_json::array();
  for (const auto& row : v.alignment) {
    al.push_back({{"category_a", row.category_a},
                  {"category_b", row.category_b},
                  {"human_split", row.human_split},
                  {"diag_coact", row.diag_coact},
                  {"covered_units", row.covered_count}});
  }
  j["boundary_alignment"] = std::move(al);

  ordered_json sp;
  sp["single_category_units"] = v.split.single_category_units;
  sp["multi_category_units"] = v.split.multi_category_units;
  sp["disagreement_single"] = opt_json(v.split.disagreement_single);
  sp["disagreement_multi"] = opt_json(v.split.disagreement_multi);
  j["split_by_overlap"] = std::move(sp);
  return j;
}

std::map<std::string, std::optional<double>> metric_map(
    const std::vector<StabilityRow>& rows,
    std::optional<double> StabilityRow::*member) {
  std::map<std::string, std::optional<double>> out;
  for (const auto& r : rows) out[r.criterion_id] = r.*member;
  return out;
}

}  // namespace

AuditReport run_audit(const Schema& schema, const ResponseTensor& tensor,
                      const std::string& tensor_source, const RunOptions& options) {
  AuditReport report;
  report.tool_version = kToolVersion;
  report.generated_at = utc_now();
  report.schema_fingerprint = schema.fingerprint();
  report.schema_version = schema.version();
  report.category_count = schema.categories().size();
  report.criterion_count = schema.criteria().size();
  report.tensor_source = tensor_source;
  report.unit_count = tensor.unit_count();
  report.pool_annotators = tensor.annotator_ids();
  report.mask_within = options.mask_within;

  // Name the offending criterion on any axis mismatch before analysis.
  for (const auto& id : tensor.criterion_ids()) {
    if (!schema.has_criterion(id)) {
      throw InputError("tensor criterion '" + id + "' is not in the schema");
    }
  }
  for (const auto& q : schema.criteria()) {
    bool found = false;
    for (const auto& id : tensor.criterion_ids()) found = found || id == q.id;
    if (!found) {
      throw InputError("schema criterion '" + q.id + "' is missing from the tensor");
    }
  }

  const ResponseTensor analysis =
      options.annotators.empty() ? tensor : tensor.select_annotators(options.annotators);
  report.analysis_annotators = analysis.annotator_ids();
  const VoteTable votes = vote_counts(analysis);

  report.thresholds = options.thresholds.empty() ? default_thresholds(votes.panel_size())
                                                 : options.thresholds;
  for (int t : report.thresholds) {
    if (t < 0 || t > votes.panel_size()) {
      throw InputError("threshold " + std::to_string(t) + " outside {0.." +
                       std::to_string(votes.panel_size()) + "}");
    }
  }

  report.sweeps = threshold_sweep(votes, schema, report.thresholds);
  for (int t : report.thresholds) {
    report.matrices.push_back(leakage_matrix(votes, schema, t, options.mask_within));
  }

  if (options.run_robustness) {
    RobustnessResults rb;
    rb.thresholds = report.thresholds;
    rb.sweep = report.sweeps;

    std::vector<std::string> criterion_order;
    for (const auto& q : schema.criteria()) criterion_order.push_back(q.id);

    std::vector<MetricByVariant> by_threshold;
    for (const auto& entry : rb.sweep) {
      by_threshold.push_back({"t=" + std::to_string(entry.threshold),
                              metric_map(entry.stability, &StabilityRow::ambiguity)});
    }
    rb.ambiguity_across_thresholds =
        rank_stability(by_threshold, criterion_order, options.top_k, "ambiguity");

    rb.profiles = annotator_profiles(analysis, schema);
    for (const auto& q : schema.criteria()) {
      if (focus_set(votes, q.id, 1).size() >= 2) {
        rb.correlations.push_back(annotator_correlations(analysis, q.id, 1));
      }
    }

    const std::vector<std::string> pool =
        options.loo_pool.empty() ? tensor.annotator_ids() : options.loo_pool;
    const std::size_t panel_size = options.loo_panel_size.value_or(
        pool.size() > 1 ? pool.size() - 1 : pool.size());
    RobustnessResults::LooResults loo;
    loo.panel_size = panel_size;
    loo.variants = loo_panels(tensor, pool, panel_size);

    // Panel ablations are read at t=1, the main analysis regime.
    std::vector<MetricByVariant> by_panel;
    for (const auto& variant : loo.variants) {
      const ResponseTensor sub = tensor.select_annotators(variant.annotator_ids);
      const VoteTable sub_votes = vote_counts(sub);
      auto rows = stability_table(sub_votes, schema, 1);
      by_panel.push_back({variant.name, metric_map(rows, &StabilityRow::near_tie)});
      loo.stability_per_variant.emplace_back(variant.name, std::move(rows));
    }
    loo.near_tie_across_panels =
        rank_stability(by_panel, criterion_order, options.top_k, "near_tie");
    if (analysis.annotator_count() == panel_size) {
      loo.main_panel = stability_table(votes, schema, 1);
    }
    rb.loo = std::move(loo);
    report.robustness = std::move(rb);
  }

  if (options.labels_path) {
    const HumanLabels labels = load_human_labels(*options.labels_path, schema);
    ValidationResults v;
    v.threshold = options.validation_threshold;
    v.pairwise = pairwise_agreement(labels);
    v.fleiss = fleiss_kappa(labels, schema);
    v.retest = test_retest(labels);
    v.alignment = boundary_alignment(labels, votes, schema, v.threshold);
    v.split = split_by_overlap(labels, votes, schema, v.threshold);
    report.validation = std::move(v);
  }
  return report;
}

std::string report_to_json(const AuditReport& report) {
  ordered_json j;
  j["tool"] = {{"name", "annotation-audit"}, {"version", report.tool_version}};
  j["generated_at"] = report.generated_at;
  j["schema"] = {{"fingerprint", report.schema_fingerprint},
                 {"version", report.schema_version},
                 {"categories", report.category_count},
                 {"criteria", report.criterion_count}};
  j["tensor"] = {{"source", report.tensor_source},
                 {"units", report.unit_count},
                 {"pool_annotators", report.pool_annotators},
                 {"analysis_annotators", report.analysis_annotators},
                 {"dropped_units",
                  {{"count", report.drops.count()},
                   {"unit_ids", report.drops.dropped_units}}}};
  j["thresholds"] = report.thresholds;

  ordered_json stability = ordered_json::object();
  ordered_json overlap = ordered_json::object();
  for (const auto& entry : report.sweeps) {
    const std::string key = std::to_string(entry.threshold);
    stability[key] = stability_rows_json(entry.stability);
    overlap[key] = overlap_json(entry.overlap);
  }
  j["stability"] = std::move(stability);
  j["overlap"] = std::move(overlap);

  ordered_json condov = ordered_json::object();
  for (const auto& m : report.matrices) {
    condov[std::to_string(m.threshold)] = matrix_json(m);
  }
  j["condov"] = std::move(condov);

  if (report.robustness) {
    const auto& rb = *report.robustness;
    ordered_json r;
    r["thresholds"] = rb.thresholds;
    r["ambiguity_rank_stability"] = rank_stability_json(rb.ambiguity_across_thresholds);

    ordered_json profiles;
    profiles["annotators"] = rb.profiles.annotator_ids;
    profiles["criteria"] = rb.profiles.criterion_ids;
    ordered_json rates = ordered_json::array();
    for (std::size_t a = 0; a < rb.profiles.annotator_ids.size(); ++a) {
      ordered_json row = ordered_json::array();
      for (std::size_t q = 0; q < rb.profiles.criterion_ids.size(); ++q) {
        row.push_back(rb.profiles.at(a, q));
      }
      rates.push_back(std::move(row));
    }
    profiles["rates"] = std::move(rates);
    r["annotator_profiles"] = std::move(profiles);

    ordered_json correlations = ordered_json::object();
    for (const auto& m : rb.correlations) {
      ordered_json cm;
      cm["threshold"] = m.threshold;
      cm["annotators"] = m.annotator_ids;
      ordered_json rows = ordered_json::array();
      for (std::size_t a = 0; a < m.annotator_ids.size(); ++a) {
        ordered_json row = ordered_json::array();
        for (std::size_t b = 0; b < m.annotator_ids.size(); ++b) {
          row.push_back(opt_json(m.at(a, b)));
        }
        rows.push_back(std::move(row));
      }
      cm["matrix"] = std::move(rows);
      correlations[m.criterion_id] = std::move(cm);
    }
    r["annotator_correlations"] = std::move(correlations);
    if (rb.loo) {
      ordered_json lj;
      lj["panel_size"] = rb.loo->panel_size;
      lj["threshold"] = 1;
      ordered_json variants = ordered_json::array();
      for (const auto& v : rb.loo->variants) {
        variants.push_back({{"name", v.name}, {"annotators", v.annotator_ids}});
      }
      lj["variants"] = std::move(variants);
      ordered_json per_variant = ordered_json::object();
      for (const auto& [name, rows] : rb.loo->stability_per_variant) {
        per_variant[name] = stability_rows_json(rows);
      }
      lj["stability_per_variant"] = std::move(per_variant);
      lj["near_tie_rank_stability"] = rank_stability_json(rb.loo->near_tie_across_panels);
      if (rb.loo->main_panel) {
        lj["main_panel_stability"] = stability_rows_json(*rb.loo->main_panel);
      }
      r["leave_one_out"] = std::move(lj);
    }
    j["robustness"] = std::move(r);
  }

  if (report.validation) {
    j["validation"] = validation_json(*report.validation);
  }
  return j.dump(2) + "\n";
}

std::string stability_csv(const std::vector<StabilityRow>& rows, const Schema& schema) {
  std::ostringstream out;
  out << "criterion_id,criterion_text,act_pct,nt_pct,as_pct,uy_pct,focus_size\n";
  for (const auto& r : rows) {
    out << csv::join({r.criterion_id, schema.criterion(r.criterion_id).text,
                      pct(r.activation), r.near_tie ? pct(*r.near_tie) : "",
                      r.asymmetric ? pct(*r.asymmetric) : "",
                      r.unanimous ? pct(*r.unanimous) : "",
                      std::to_string(r.focus_size)})
        << "\n";
  }
  return out.str();
}

std::string overlap_csv(const OverlapSummary& s) {
  std::ostringstream out;
  out << "t,units,covered,coverage_pct,overlap_cat_given_cov_pct,overlap_cat_pct,"
         "overlap_crit_pct,gamma_1,gamma_2,gamma_3,gamma_ge4,mean_gamma\n";
  out << s.threshold << ',' << s.unit_count << ',' << s.covered_count << ','
      << pct(s.coverage_rate) << ','
      << (s.overlap_cat_given_cov ? pct(*s.overlap_cat_given_cov) : "") << ','
      << pct(s.overlap_cat) << ',' << pct(s.overlap_crit) << ',' << s.gamma_1 << ','
      << s.gamma_2 << ',' << s.gamma_3 << ',' << s.gamma_4_plus << ','
      << (s.mean_gamma ? num(*s.mean_gamma, 2) : "") << "\n";
  return out.str();
}

std::string condov_csv(const OverlapMatrix& m) {
  const std::size_t n = m.criterion_ids.size();
  std::ostringstream out;
  out << "criterion";
  for (const auto& id : m.criterion_ids) out << ',' << id;
  out << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << m.criterion_ids[i];
    for (std::size_t k = 0; k < n; ++k) {
      const auto v = m.at(i, k);
      out << ',' << (v ? num(*v, 4) : "");
    }
    out << "\n";
  }
  return out.str();
}

std::string alignment_csv(const std::vector<BoundaryAlignmentRow>& rows) {
  std::ostringstream out;
  out << "category_a,category_b,human_split_pct,diag_coact_pct,covered_units\n";
  for (const auto& r : rows) {
    out << r.category_a << ',' << r.category_b << ',' << pct(r.human_split) << ','
        << pct(r.diag_coact) << ',' << r.covered_count << "\n";
  }
  return out.str();
}

std::string annotator_profiles_csv(const AnnotatorProfiles& profiles) {
  std::ostringstream out;
  out << "annotator_id";
  for (const auto& q : profiles.criterion_ids) out << ',' << q << "_pct";
  out << "\n";
  for (std::size_t a = 0; a < profiles.annotator_ids.size(); ++a) {
    out << profiles.annotator_ids[a];
    for (std::size_t q = 0; q < profiles.criterion_ids.size(); ++q) {
      out << ',' << pct(profiles.at(a, q));
    }
    out << "\n";
  }
  return out.str();
}

std::string threshold_robustness_csv(const RobustnessResults& results) {
  std::ostringstream out;
  out << "criterion_id";
  for (int t : results.thresholds) out << ",amb_t" << t;
  for (int t : results.thresholds) out << ",act_pct_t" << t;
  out << ",rank_range,top_k_freq\n";

  for (const auto& row : results.ambiguity_across_thresholds.criteria) {
    out << row.criterion_id;
    for (const auto& entry : results.sweep) {
      std::optional<double> amb;
      for (const auto& r : entry.stability) {
        if (r.criterion_id == row.criterion_id) amb = r.ambiguity;
      }
      out << ',' << (amb ? num(*amb, 3) : "");
    }
    for (const auto& entry : results.sweep) {
      double act = 0.0;
      for (const auto& r : entry.stability) {
        if (r.criterion_id == row.criterion_id) act = r.activation;
      }
      out << ',' << pct(act, 2);
    }
    out << ',';
    if (row.best_rank) out << *row.best_rank << '-' << *row.worst_rank;
    out << ',' << row.top_k_count << '/' << row.defined_count << "\n";
  }
  return out.str();
}

std::string loo_csv(const RobustnessResults::LooResults& loo,
                    const std::optional<std::vector<StabilityRow>>& main_panel) {
  std::ostringstream out;
  out << "criterion_id,nt_main_pct,nt_min_pct,nt_max_pct,delta_pp,top_k_freq\n";
  for (const auto& row : loo.near_tie_across_panels.criteria) {
    out << row.criterion_id << ',';
    if (main_panel) {
      for (const auto& r : *main_panel) {
        if (r.criterion_id == row.criterion_id && r.near_tie) out << pct(*r.near_tie);
      }
    }
    out << ',';
    if (row.min_value) out << pct(*row.min_value);
    out << ',';
    if (row.max_value) out << pct(*row.max_value);
    out << ',';
    if (row.min_value && row.max_value) {
      out << num((*row.max_value - *row.min_value) * 100.0, 1);
    }
    out << ',' << row.top_k_count << '/' << row.defined_count << "\n";
  }
  return out.str();
}

std::vector<std::string> write_bundle(const AuditReport& report, const Schema& schema,
                                      const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  auto write_file = [&](const std::string& name, const std::string& content) {
    const fs::path path = fs::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << content;
    written.push_back(name);
  };

  write_file("report.json", report_to_json(report));
  for (const auto& entry : report.sweeps) {
    const std::string suffix = "_t" + std::to_string(entry.threshold);
    write_file("stability" + suffix + ".csv", stability_csv(entry.stability, schema));
    write_file("overlap" + suffix + ".csv", overlap_csv(entry.overlap));
    write_file("landscape" + suffix + ".svg",
               render_stability_landscape(entry.stability, entry.threshold));
  }
  for (const auto& m : report.matrices) {
    const std::string suffix = "_t" + std::to_string(m.threshold);
    write_file("condov" + suffix + ".csv", condov_csv(m));
    write_file("heatmap" + suffix + ".svg", render_heatmap(m, schema));
  }
  if (report.robustness) {
    write_file("robustness.csv", threshold_robustness_csv(*report.robustness));
    write_file("annotator_profiles.csv",
               annotator_profiles_csv(report.robustness->profiles));
    if (report.robustness->loo) {
      write_file("loo.csv",
                 loo_csv(*report.robustness->loo, report.robustness->loo->main_panel));
    }
  }
  if (report.validation) {
    write_file("alignment.csv", alignment_csv(report.validation->alignment));
  }
  return written;
}

}  // namespace audit
