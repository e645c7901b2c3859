#pragma once

#include <map>
#include <string>
#include <vector>

#include "cogsearch/util/time.hpp"
#include "json.hpp"

namespace cogsearch::memory {

using Json = nlohmann::json;

enum class InteractionKind { kClick, kAddToCart, kFacetClick, kSuggestionClick };

std::string_view to_string(InteractionKind k);
InteractionKind interaction_kind_from_string(std::string_view s);

struct Interaction {
  std::string item_id;
  InteractionKind kind = InteractionKind::kClick;
  Timestamp at{};

  friend bool operator==(const Interaction&, const Interaction&) = default;
};

// The per-turn planner input: current query, prior queries, prior
// interactions and the user profile.
struct SessionContext {
  std::string session_id;
  std::string query;
  std::vector<std::string> search_history;
  std::vector<Interaction> click_history;
  Json user_profile = Json::object();
  std::size_t turn_index = 0;

  friend bool operator==(const SessionContext&, const SessionContext&) = default;
};

void to_json(Json& j, const Interaction& i);
void from_json(const Json& j, Interaction& i);
void to_json(Json& j, const SessionContext& c);
void from_json(const Json& j, SessionContext& c);

}  // namespace cogsearch::memory
