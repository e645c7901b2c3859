#include "cogsearch/eval/metrics.hpp"

#include <numeric>

#include "cogsearch/error.hpp"

namespace cogsearch::eval {

int acc_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& gold,
             std::size_t k) {
  if (k < 1) throw ValidationError("k must be >= 1");
  if (gold.empty()) throw ValidationError("empty gold set");
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
    if (gold.count(ranked[i])) return 1;
  }
  return 0;
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::string_view to_string(LogEventKind k) {
  switch (k) {
    case LogEventKind::kSearch: return "search";
    case LogEventKind::kClick: return "click";
    case LogEventKind::kFacetClick: return "facet_click";
    case LogEventKind::kSuggestionClick: return "suggestion_click";
    case LogEventKind::kTransaction: return "transaction";
  }
  return "?";
}

LogEventKind log_event_kind_from_string(std::string_view s) {
  for (auto k : {LogEventKind::kSearch, LogEventKind::kClick, LogEventKind::kFacetClick,
                 LogEventKind::kSuggestionClick, LogEventKind::kTransaction}) {
    if (to_string(k) == s) return k;
  }
  throw ValidationError("unknown log event '" + std::string(s) + "'");
}

double decision_cost(const std::vector<SessionLog>& logs) {
  std::size_t interactions = 0, transactions = 0;
  for (const auto& log : logs) {
    std::size_t txn = 0;
    for (const auto& e : log.events) {
      if (e.kind == LogEventKind::kTransaction) {
        ++txn;
      } else {
        ++interactions;
      }
    }
    if (txn > 1) throw ValidationError("session log has more than one transaction");
    transactions += txn;
  }
  if (transactions == 0) throw ValidationError("decision cost undefined: no transactions");
  return static_cast<double>(interactions) / static_cast<double>(transactions);
}

void to_json(Json& j, const LogEvent& e) {
  j = Json{{"kind", to_string(e.kind)}, {"at", format_rfc3339(e.at)}};
  if (!e.item_id.empty()) j["item_id"] = e.item_id;
}

void from_json(const Json& j, LogEvent& e) {
  e.kind = log_event_kind_from_string(j.at("kind").get<std::string>());
  e.item_id = j.value("item_id", std::string{});
  e.at = j.contains("at") ? parse_rfc3339(j["at"].get<std::string>()) : Timestamp{};
}

void to_json(Json& j, const SessionLog& l) { j = Json{{"events", l.events}}; }

void from_json(const Json& j, SessionLog& l) {
  l.events = j.at("events").get<std::vector<LogEvent>>();
}

}  // namespace cogsearch::eval
