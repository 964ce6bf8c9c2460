#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "audit/normalize.hpp"
#include "audit/schema.hpp"

namespace audit {

/// Instruction template with `{sentence}` and `{question_text}` slots,
/// each appearing exactly once (checked at construction).
class PromptTemplate {
 public:
  explicit PromptTemplate(std::string body);

  static PromptTemplate from_file(const std::string& path);

  /// Deterministic slot substitution; nothing else in the template moves.
  /// Throws InputError on an empty sentence.
  std::string render(const std::string& sentence, const Criterion& criterion) const;

  const std::string& body() const { return body_; }

 private:
  std::string body_;
};

struct AnnotatorEndpoint {
  std::string id;
  std::string endpoint;
  std::string model;
};

/// Panel wiring plus decoding and retry policy. Decoding defaults match
/// the audited protocol: temperature 0, max_tokens 3.
struct PanelConfig {
  std::vector<AnnotatorEndpoint> annotators;
  double temperature = 0.0;
  int max_tokens = 3;
  int max_attempts = 3;
  int backoff_ms = 0;
  int max_in_flight = 1;

  void validate() const;  // throws InputError
};

PanelConfig load_panel_config(const std::string& path);
PanelConfig parse_panel_config(const std::string& json_text,
                               const std::string& source_name = "<string>");

struct TransportRequest {
  std::string annotator_id;
  std::string unit_id;
  std::string criterion_id;
  std::string prompt;
  double temperature = 0.0;
  int max_tokens = 0;
};

/// One annotation call. Implementations must be safe for concurrent ask()
/// when max_in_flight > 1. Returning nullopt signals a retryable failure.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::optional<std::string> ask(const TransportRequest& request) = 0;
};

/// Replays recorded responses keyed by (unit, annotator, criterion).
/// Unknown keys fail, mirroring a permanently unavailable cell.
class ReplayTransport : public Transport {
 public:
  static ReplayTransport from_file(const std::string& path);
  static ReplayTransport from_string(const std::string& jsonl,
                                     const std::string& source_name = "<string>");

  std::optional<std::string> ask(const TransportRequest& request) override;

  void add(const std::string& unit_id, const std::string& annotator_id,
           const std::string& criterion_id, const std::string& response);
  std::size_t size() const { return responses_.size(); }

 private:
  std::map<std::string, std::string> responses_;
};

/// Decorator that captures successful responses so a live run can be
/// replayed bit-exactly later.
class RecordingTransport : public Transport {
 public:
  explicit RecordingTransport(Transport& inner) : inner_(inner) {}

  std::optional<std::string> ask(const TransportRequest& request) override;

  /// Newline-delimited JSON records, sorted by key for determinism.
  void write_fixture(const std::string& path) const;

 private:
  Transport& inner_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> recorded_;
};

struct CorpusSentence {
  std::string unit_id;
  std::string sentence;
};

/// Corpus CSV with header unit_id,sentence.
std::vector<CorpusSentence> read_corpus_csv(const std::string& path);

struct MissingCell {
  std::string unit_id;
  std::string annotator_id;
  std::string criterion_id;
  int attempts = 0;
};

struct CollectResult {
  std::vector<RawRow> rows;          // one raw cell per successful call
  std::vector<MissingCell> missing;  // exhausted retries
};

/// Queries every (unit, annotator, criterion) cell independently — one
/// criterion per call, each unit in isolation. Failed cells are retried
/// up to the configured attempts, then recorded as missing rather than
/// raised. rows.size() + missing.size() == units x annotators x criteria.
CollectResult collect(const std::vector<CorpusSentence>& corpus, const Schema& schema,
                      const PanelConfig& config, const PromptTemplate& prompt,
                      Transport& transport);

}  // namespace audit
