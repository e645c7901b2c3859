#include "cogsearch/executor/types.hpp"

#include <cmath>

#include "cogsearch/error.hpp"

namespace cogsearch::executor {

const Enrichment* CandidateSet::find(const std::string& id) const {
  auto it = enriched.find(id);
  return it == enriched.end() ? nullptr : &it->second;
}

const EvidenceEntry* EvidenceSet::find(const std::string& doc_id) const {
  for (const auto& d : docs) {
    if (d.doc_id == doc_id) return &d;
  }
  return nullptr;
}

void ScoreWeights::validate() const {
  if (alpha < 0 || beta < 0 || gamma < 0) throw ValidationError("score weights must be >= 0");
  if (std::fabs(alpha + beta + gamma - 1.0) > 1e-9) {
    throw ValidationError("score weights must sum to 1");
  }
}

std::string_view to_string(TaskStatus s) {
  switch (s) {
    case TaskStatus::kOk: return "ok";
    case TaskStatus::kFailed: return "failed";
    case TaskStatus::kSkipped: return "skipped";
  }
  return "?";
}

std::string_view to_string(TaskErrorKind k) {
  switch (k) {
    case TaskErrorKind::kNone: return "none";
    case TaskErrorKind::kUnknownTool: return "unknown_tool";
    case TaskErrorKind::kTimeout: return "timeout";
    case TaskErrorKind::kSchemaInvalid: return "schema_invalid";
    case TaskErrorKind::kInvalidArguments: return "invalid_arguments";
    case TaskErrorKind::kUnavailable: return "unavailable";
    case TaskErrorKind::kHandlerError: return "handler_error";
    case TaskErrorKind::kAncestorFailed: return "ancestor_failed";
  }
  return "?";
}

void to_json(Json& j, const CandidateSet& c) {
  Json items = Json::array();
  for (const auto& it : c.items) items.push_back({{"id", it.product_id}, {"score", it.score}});
  Json enriched = Json::object();
  for (const auto& [id, e] : c.enriched) {
    enriched[id] = {{"product", e.product}, {"pros", e.pros}, {"cons", e.cons}};
  }
  j = Json{{"items", items}, {"enriched", enriched}};
}

void from_json(const Json& j, CandidateSet& c) {
  c.items.clear();
  c.enriched.clear();
  for (const auto& it : j.at("items")) {
    c.items.push_back({it.at("id").get<std::string>(), it.at("score").get<double>()});
  }
  for (auto it = j.at("enriched").begin(); it != j.at("enriched").end(); ++it) {
    Enrichment e;
    e.product = it.value().at("product").get<catalog::Product>();
    e.pros = it.value().at("pros").get<std::vector<std::string>>();
    e.cons = it.value().at("cons").get<std::vector<std::string>>();
    c.enriched.emplace(it.key(), std::move(e));
  }
}

void to_json(Json& j, const EvidenceEntry& e) {
  j = Json{{"doc_id", e.doc_id}, {"score", e.score}, {"rel", e.rel},       {"auth", e.auth},
           {"fresh", e.fresh},   {"title", e.title}, {"source", e.source}, {"url", e.url},
           {"body", e.body}};
}

void from_json(const Json& j, EvidenceEntry& e) {
  e.doc_id = j.at("doc_id").get<std::string>();
  e.score = j.at("score").get<double>();
  e.rel = j.at("rel").get<double>();
  e.auth = j.at("auth").get<double>();
  e.fresh = j.at("fresh").get<double>();
  e.title = j.value("title", std::string{});
  e.source = j.value("source", std::string{});
  e.url = j.value("url", std::string{});
  e.body = j.value("body", std::string{});
}

void to_json(Json& j, const EvidenceSet& e) {
  j = Json{{"docs", e.docs}, {"expansion_queries", e.expansion_queries}};
}

void from_json(const Json& j, EvidenceSet& e) {
  e.docs = j.at("docs").get<std::vector<EvidenceEntry>>();
  e.expansion_queries = j.value("expansion_queries", std::vector<std::string>{});
}

void to_json(Json& j, const ScoreWeights& w) {
  j = Json{{"alpha", w.alpha}, {"beta", w.beta}, {"gamma", w.gamma}};
}

void from_json(const Json& j, ScoreWeights& w) {
  w.alpha = j.at("alpha").get<double>();
  w.beta = j.at("beta").get<double>();
  w.gamma = j.at("gamma").get<double>();
}

Json result_to_json(const TaskResult& r, bool include_timing) {
  Json j{{"node_id", r.node_id}, {"status", to_string(r.status)}};
  if (include_timing) j["duration_ms"] = r.duration_ms;
  if (r.error) {
    j["error"] = *r.error;
    j["error_kind"] = to_string(r.error_kind);
  }
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (!std::is_same_v<T, std::monostate>) j["payload"] = p;
      },
      r.payload);
  return j;
}

}  // namespace cogsearch::executor
