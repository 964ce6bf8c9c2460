#include "audit/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include <json.hpp>

#include "audit/csv.hpp"
#include "audit/errors.hpp"

namespace audit {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string fold(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

RuleTable::RuleTable(std::vector<std::string> yes_forms, std::vector<std::string> no_forms)
    : yes_forms_(std::move(yes_forms)), no_forms_(std::move(no_forms)) {
  auto insert_all = [this](const std::vector<std::string>& forms, Decision d) {
    for (const auto& f : forms) {
      const std::string t = trim(f);
      if (t.empty()) throw InputError("empty surface form in rule table");
      if (t.size() == 1) {
        case_sensitive_.emplace(t, d);
      } else {
        folded_.emplace(fold(t), d);
      }
    }
  };
  insert_all(yes_forms_, Decision::Yes);
  insert_all(no_forms_, Decision::No);

  // Disjointness: no key may carry both polarities.
  std::set<std::string> yes_keys, no_keys;
  for (const auto& f : yes_forms_) {
    yes_keys.insert(trim(f).size() == 1 ? trim(f) : fold(trim(f)));
  }
  for (const auto& f : no_forms_) {
    const std::string key = trim(f).size() == 1 ? trim(f) : fold(trim(f));
    if (yes_keys.count(key)) {
      throw InputError("surface form '" + f + "' appears in both yes and no sets");
    }
  }
}

const RuleTable& RuleTable::defaults() {
  static const RuleTable table(
      {"Oui", "Oui.", "O", "**Oui**", "**Oui"},
      {"Non", "Non.", "**Non**"});
  return table;
}

Decision RuleTable::match(const std::string& raw) const {
  const std::string t = trim(raw);
  if (t.empty()) return Decision::Malformed;
  if (t.size() == 1) {
    auto it = case_sensitive_.find(t);
    return it == case_sensitive_.end() ? Decision::Malformed : it->second;
  }
  auto it = folded_.find(fold(t));
  return it == folded_.end() ? Decision::Malformed : it->second;
}

RuleTable load_rule_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open rule table '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": rule table parse failure: " + e.what());
  }
  if (!j.contains("yes") || !j.contains("no")) {
    throw InputError(path + ": rule table needs 'yes' and 'no' lists");
  }
  return RuleTable(j.at("yes").get<std::vector<std::string>>(),
                   j.at("no").get<std::vector<std::string>>());
}

Decision normalize_response(const std::string& raw, const RuleTable& rules) {
  return rules.match(raw);
}

CleanResult clean_grid(const std::vector<RawRow>& raw_rows, const RuleTable& rules) {
  // Observed axis values define the expected grid; absent combinations
  // count as missing.
  std::vector<std::string> units, annotators, criteria;
  std::set<std::string> seen_u, seen_a, seen_q;
  for (const auto& r : raw_rows) {
    if (seen_u.insert(r.unit_id).second) units.push_back(r.unit_id);
    if (seen_a.insert(r.annotator_id).second) annotators.push_back(r.annotator_id);
    if (seen_q.insert(r.criterion_id).second) criteria.push_back(r.criterion_id);
  }

  std::map<std::string, std::map<std::string, const RawRow*>> by_annotator_key;
  for (const auto& r : raw_rows) {
    const std::string key = r.unit_id + "\x1f" + r.criterion_id;
    auto& slot = by_annotator_key[r.annotator_id][key];
    if (slot != nullptr && slot->raw_text != r.raw_text) {
      throw InputError("conflicting duplicate raw cell (" + r.unit_id + ", " +
                       r.annotator_id + ", " + r.criterion_id + ")");
    }
    slot = &r;
  }

  CleanResult out;
  out.report.total = units.size() * annotators.size() * criteria.size();
  for (const auto& a : annotators) {
    auto& stats = out.report.per_annotator[a];
    const auto& cells = by_annotator_key[a];
    for (const auto& u : units) {
      for (const auto& q : criteria) {
        auto it = cells.find(u + "\x1f" + q);
        if (it == cells.end()) {
          ++stats.missing;
          ++out.report.missing;
          continue;
        }
        const RawRow& r = *it->second;
        ++stats.raw_form_counts[trim(r.raw_text)];
        const Decision d = rules.match(r.raw_text);
        if (d == Decision::Malformed) {
          ++stats.malformed;
          ++out.report.malformed;
          if (trim(r.raw_text).empty()) ++out.report.whitespace_only;
          continue;
        }
        ++stats.valid;
        ++out.report.valid;
        out.rows.push_back({r.unit_id, r.annotator_id, r.criterion_id,
                            d == Decision::Yes ? 1 : 0});
      }
    }
  }
  return out;
}

namespace {

std::vector<RawRow> raw_rows_from_table(const csv::Table& t) {
  const auto c_unit = t.column("unit_id");
  const auto c_annotator = t.column("annotator_id");
  const auto c_criterion = t.column("criterion_id");
  const auto c_raw = t.column("raw_text");
  std::vector<RawRow> rows;
  rows.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    rows.push_back({r[c_unit], r[c_annotator], r[c_criterion], r[c_raw]});
  }
  return rows;
}

}  // namespace

std::vector<RawRow> read_raw_csv(const std::string& path) {
  return raw_rows_from_table(csv::read_file(path));
}

std::vector<RawRow> parse_raw_csv(const std::string& text, const std::string& source_name) {
  return raw_rows_from_table(csv::parse_string(text, source_name));
}

std::string cleaning_report_to_json(const CleaningReport& report) {
  nlohmann::ordered_json j;
  j["total"] = report.total;
  j["valid"] = report.valid;
  j["missing"] = report.missing;
  j["malformed"] = report.malformed;
  j["whitespace_only"] = report.whitespace_only;
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [annotator, stats] : report.per_annotator) {
    nlohmann::ordered_json a;
    a["valid"] = stats.valid;
    a["missing"] = stats.missing;
    a["malformed"] = stats.malformed;
    nlohmann::ordered_json forms = nlohmann::ordered_json::object();
    for (const auto& [form, count] : stats.raw_form_counts) {
      forms[form] = count;
    }
    a["raw_forms"] = std::move(forms);
    per[annotator] = std::move(a);
  }
  j["per_annotator"] = std::move(per);
  return j.dump(2) + "\n";
}

}  // namespace audit
