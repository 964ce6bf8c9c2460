#include "audit/panel.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "audit/csv.hpp"
#include "audit/errors.hpp"

namespace audit {

namespace {

constexpr const char* kSentenceSlot = "{sentence}";
constexpr const char* kQuestionSlot = "{question_text}";

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t count = 0;
  std::size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

std::string replace_once(std::string text, const std::string& slot,
                         const std::string& value) {
  const std::size_t pos = text.find(slot);
  text.replace(pos, slot.size(), value);
  return text;
}

std::string cell_key(const std::string& unit, const std::string& annotator,
                     const std::string& criterion) {
  return unit + "\x1f" + annotator + "\x1f" + criterion;
}

}  // namespace

PromptTemplate::PromptTemplate(std::string body) : body_(std::move(body)) {
  if (count_occurrences(body_, kSentenceSlot) != 1) {
    throw InputError("prompt template must contain {sentence} exactly once");
  }
  if (count_occurrences(body_, kQuestionSlot) != 1) {
    throw InputError("prompt template must contain {question_text} exactly once");
  }
}

PromptTemplate PromptTemplate::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open prompt template '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return PromptTemplate(std::move(text));
}

std::string PromptTemplate::render(const std::string& sentence,
                                   const Criterion& criterion) const {
  if (sentence.empty()) {
    throw InputError("cannot render a prompt for an empty sentence");
  }
  return replace_once(replace_once(body_, kSentenceSlot, sentence), kQuestionSlot,
                      criterion.text);
}

void PanelConfig::validate() const {
  if (annotators.empty()) throw InputError("panel config has no annotators");
  std::set<std::string> ids;
  for (const auto& a : annotators) {
    if (a.id.empty()) throw InputError("annotator with empty id in panel config");
    if (!ids.insert(a.id).second) {
      throw InputError("duplicate annotator id '" + a.id + "' in panel config");
    }
  }
  if (max_attempts < 1) throw InputError("retry max_attempts must be at least 1");
  if (max_in_flight < 1) throw InputError("max_in_flight must be at least 1");
  if (max_tokens < 1) throw InputError("max_tokens must be at least 1");
}

PanelConfig parse_panel_config(const std::string& json_text,
                               const std::string& source_name) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(source_name + ": panel config parse failure: " + e.what());
  }
  PanelConfig cfg;
  for (const auto& ja : j.at("annotators")) {
    AnnotatorEndpoint a;
    a.id = ja.at("id").get<std::string>();
    a.endpoint = ja.value("endpoint", std::string{});
    a.model = ja.value("model", std::string{});
    cfg.annotators.push_back(std::move(a));
  }
  if (j.contains("decoding")) {
    cfg.temperature = j["decoding"].value("temperature", 0.0);
    cfg.max_tokens = j["decoding"].value("max_tokens", 3);
  }
  if (j.contains("retry")) {
    cfg.max_attempts = j["retry"].value("max_attempts", 3);
    cfg.backoff_ms = j["retry"].value("backoff_ms", 0);
  }
  cfg.max_in_flight = j.value("max_in_flight", 1);
  cfg.validate();
  return cfg;
}

PanelConfig load_panel_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open panel config '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_panel_config(text, path);
}

ReplayTransport ReplayTransport::from_string(const std::string& jsonl,
                                             const std::string& source_name) {
  ReplayTransport t;
  std::istringstream in(jsonl);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(source_name + ":" + std::to_string(line_no) +
                       ": bad replay record: " + e.what());
    }
    t.add(j.at("unit").get<std::string>(), j.at("annotator").get<std::string>(),
          j.at("criterion").get<std::string>(), j.at("response").get<std::string>());
  }
  return t;
}

ReplayTransport ReplayTransport::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open replay fixture '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_string(text, path);
}

void ReplayTransport::add(const std::string& unit_id, const std::string& annotator_id,
                          const std::string& criterion_id, const std::string& response) {
  responses_[cell_key(unit_id, annotator_id, criterion_id)] = response;
}

std::optional<std::string> ReplayTransport::ask(const TransportRequest& request) {
  const auto it =
      responses_.find(cell_key(request.unit_id, request.annotator_id, request.criterion_id));
  if (it == responses_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> RecordingTransport::ask(const TransportRequest& request) {
  auto response = inner_.ask(request);
  if (response) {
    std::lock_guard<std::mutex> lock(mutex_);
    recorded_[cell_key(request.unit_id, request.annotator_id, request.criterion_id)] =
        *response;
  }
  return response;
}

void RecordingTransport::write_fixture(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write replay fixture '" + path + "'");
  std::lock_guard<std::mutex> lock(mutex_);
  for (const auto& [key, response] : recorded_) {
    const auto first = key.find('\x1f');
    const auto second = key.find('\x1f', first + 1);
    nlohmann::ordered_json j;
    j["unit"] = key.substr(0, first);
    j["annotator"] = key.substr(first + 1, second - first - 1);
    j["criterion"] = key.substr(second + 1);
    j["response"] = response;
    out << j.dump() << "\n";
  }
}

std::vector<CorpusSentence> read_corpus_csv(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  const auto c_unit = t.column("unit_id");
  const auto c_sentence = t.column("sentence");
  std::vector<CorpusSentence> corpus;
  corpus.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    corpus.push_back({r[c_unit], r[c_sentence]});
  }
  return corpus;
}

CollectResult collect(const std::vector<CorpusSentence>& corpus, const Schema& schema,
                      const PanelConfig& config, const PromptTemplate& prompt,
                      Transport& transport) {
  config.validate();
  const auto& criteria = schema.criteria();

  // Validate up front; worker threads must not throw.
  std::set<std::string> unit_ids;
  for (const auto& u : corpus) {
    if (u.sentence.empty()) {
      throw InputError("corpus unit '" + u.unit_id + "' has an empty sentence");
    }
    if (!unit_ids.insert(u.unit_id).second) {
      throw InputError("duplicate unit id '" + u.unit_id + "' in corpus");
    }
  }

  struct Cell {
    std::size_t unit;
    std::size_t annotator;
    std::size_t criterion;
  };
  std::vector<Cell> cells;
  cells.reserve(corpus.size() * config.annotators.size() * criteria.size());
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    for (std::size_t a = 0; a < config.annotators.size(); ++a) {
      for (std::size_t q = 0; q < criteria.size(); ++q) {
        cells.push_back({s, a, q});
      }
    }
  }

  // Each slot is filled exactly once, keyed by cell index, so the
  // assembled result does not depend on completion order.
  std::vector<std::optional<std::string>> outcomes(cells.size());
  std::vector<int> attempts_used(cells.size(), 0);

  auto run_cell = [&](std::size_t i) {
    const Cell& cell = cells[i];
    TransportRequest request;
    request.annotator_id = config.annotators[cell.annotator].id;
    request.unit_id = corpus[cell.unit].unit_id;
    request.criterion_id = criteria[cell.criterion].id;
    request.prompt = prompt.render(corpus[cell.unit].sentence, criteria[cell.criterion]);
    request.temperature = config.temperature;
    request.max_tokens = config.max_tokens;
    for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
      attempts_used[i] = attempt;
      auto response = transport.ask(request);
      if (response) {
        outcomes[i] = std::move(response);
        return;
      }
      if (attempt < config.max_attempts && config.backoff_ms > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(
            static_cast<long long>(config.backoff_ms) * attempt));
      }
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(config.max_in_flight, std::max<std::size_t>(cells.size(), 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size();
             i = next.fetch_add(1)) {
          run_cell(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  CollectResult result;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& cell = cells[i];
    if (outcomes[i]) {
      result.rows.push_back({corpus[cell.unit].unit_id, config.annotators[cell.annotator].id,
                             criteria[cell.criterion].id, *outcomes[i]});
    } else {
      result.missing.push_back({corpus[cell.unit].unit_id,
                                config.annotators[cell.annotator].id,
                                criteria[cell.criterion].id, attempts_used[i]});
    }
  }
  return result;
}

}  // namespace audit
