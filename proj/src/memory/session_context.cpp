#include "cogsearch/memory/session_context.hpp"

#include <stdexcept>

namespace cogsearch::memory {

namespace {
constexpr std::array<std::string_view, 4> kNames = {"click", "add_to_cart", "facet_click",
                                                    "suggestion_click"};
}

std::string_view to_string(InteractionKind k) { return kNames[static_cast<int>(k)]; }

InteractionKind interaction_kind_from_string(std::string_view s) {
  for (int i = 0; i < 4; ++i) {
    if (kNames[i] == s) return static_cast<InteractionKind>(i);
  }
  throw std::invalid_argument("unknown interaction kind '" + std::string(s) + "'");
}

void to_json(Json& j, const Interaction& i) {
  j = Json{{"item_id", i.item_id}, {"kind", to_string(i.kind)}, {"at", format_rfc3339(i.at)}};
}

void from_json(const Json& j, Interaction& i) {
  i.item_id = j.at("item_id").get<std::string>();
  i.kind = interaction_kind_from_string(j.at("kind").get<std::string>());
  i.at = parse_rfc3339(j.at("at").get<std::string>());
}

void to_json(Json& j, const SessionContext& c) {
  j = Json{{"session_id", c.session_id},         {"q_t", c.query},
           {"search_history", c.search_history}, {"click_history", c.click_history},
           {"user_profile", c.user_profile},     {"turn_index", c.turn_index}};
}

void from_json(const Json& j, SessionContext& c) {
  c.session_id = j.value("session_id", std::string{});
  c.query = j.at("q_t").get<std::string>();
  c.search_history = j.value("search_history", std::vector<std::string>{});
  c.click_history = j.value("click_history", std::vector<Interaction>{});
  c.user_profile = j.value("user_profile", Json::object());
  c.turn_index = j.value("turn_index", std::size_t{0});
}

}  // namespace cogsearch::memory
