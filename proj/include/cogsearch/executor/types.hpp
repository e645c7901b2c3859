#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cogsearch/catalog/types.hpp"
#include "json.hpp"

namespace cogsearch::executor {

using Json = nlohmann::json;

struct CandidateItem {
  std::string product_id;
  double score = 0.0;

  friend bool operator==(const CandidateItem&, const CandidateItem&) = default;
};

// ProductAttr + ReviewSum output for one product.
struct Enrichment {
  catalog::Product product;
  std::vector<std::string> pros;
  std::vector<std::string> cons;

  friend bool operator==(const Enrichment&, const Enrichment&) = default;
};

struct CandidateSet {
  std::vector<CandidateItem> items;  // fused score, descending
  std::map<std::string, Enrichment> enriched;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
  const Enrichment* find(const std::string& id) const;

  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;
};

struct EvidenceEntry {
  std::string doc_id;
  double score = 0.0;
  double rel = 0.0;
  double auth = 0.0;
  double fresh = 0.0;
  std::string title;
  std::string source;
  std::string url;
  std::string body;

  friend bool operator==(const EvidenceEntry&, const EvidenceEntry&) = default;
};

struct EvidenceSet {
  std::vector<EvidenceEntry> docs;  // score descending, ties by doc id
  std::vector<std::string> expansion_queries;

  const EvidenceEntry* find(const std::string& doc_id) const;

  friend bool operator==(const EvidenceSet&, const EvidenceSet&) = default;
};

// Relevance / authority / freshness mix for web evidence.
struct ScoreWeights {
  double alpha = 0.6;
  double beta = 0.25;
  double gamma = 0.15;

  // Throws ValidationError unless all are >= 0 and they sum to 1 +- 1e-9.
  void validate() const;
};

enum class TaskStatus { kOk, kFailed, kSkipped };

enum class TaskErrorKind {
  kNone,
  kUnknownTool,
  kTimeout,
  kSchemaInvalid,
  kInvalidArguments,
  kUnavailable,
  kHandlerError,
  kAncestorFailed,
};

std::string_view to_string(TaskStatus s);
std::string_view to_string(TaskErrorKind k);

using TaskPayload = std::variant<std::monostate, CandidateSet, EvidenceSet, Json>;

struct TaskResult {
  std::string node_id;
  TaskStatus status = TaskStatus::kOk;
  TaskPayload payload;
  double duration_ms = 0.0;
  std::optional<std::string> error;
  TaskErrorKind error_kind = TaskErrorKind::kNone;

  bool ok() const { return status == TaskStatus::kOk; }
  const CandidateSet* candidates() const { return std::get_if<CandidateSet>(&payload); }
  const EvidenceSet* evidence() const { return std::get_if<EvidenceSet>(&payload); }
  const Json* tool_output() const { return std::get_if<Json>(&payload); }
};

void to_json(Json& j, const CandidateSet& c);
void from_json(const Json& j, CandidateSet& c);
void to_json(Json& j, const EvidenceEntry& e);
void from_json(const Json& j, EvidenceEntry& e);
void to_json(Json& j, const EvidenceSet& e);
void from_json(const Json& j, EvidenceSet& e);
void to_json(Json& j, const ScoreWeights& w);
void from_json(const Json& j, ScoreWeights& w);
// include_timing=false drops duration_ms, for byte-stable reports.
Json result_to_json(const TaskResult& r, bool include_timing = true);

}  // namespace cogsearch::executor
