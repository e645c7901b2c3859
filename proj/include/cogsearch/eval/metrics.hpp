#pragma once

#include <set>
#include <string>
#include <vector>

#include "cogsearch/util/time.hpp"
#include "json.hpp"

namespace cogsearch::eval {

using Json = nlohmann::json;

// 1 if any gold id is among the first k ranked ids, else 0. Throws
// ValidationError for k < 1 or an empty gold set.
int acc_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& gold,
             std::size_t k);

// Arithmetic mean; 0 for no values.
double mean(const std::vector<double>& values);

enum class LogEventKind { kSearch, kClick, kFacetClick, kSuggestionClick, kTransaction };

std::string_view to_string(LogEventKind k);
LogEventKind log_event_kind_from_string(std::string_view s);

struct LogEvent {
  LogEventKind kind = LogEventKind::kSearch;
  std::string item_id;  // transactions and clicks
  Timestamp at{};
};

struct SessionLog {
  std::vector<LogEvent> events;
};

// (searches + clicks of every kind, over all logs) / transactions.
// Throws ValidationError when there are no transactions or a log holds more
// than one.
double decision_cost(const std::vector<SessionLog>& logs);

void to_json(Json& j, const LogEvent& e);
void from_json(const Json& j, LogEvent& e);
void to_json(Json& j, const SessionLog& l);
void from_json(const Json& j, SessionLog& l);

}  // namespace cogsearch::eval
