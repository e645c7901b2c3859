#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cogsearch/guider/facets.hpp"

namespace cogsearch::guider {

enum class SuggestionKind { kConvergent, kStimulative };

std::string_view to_string(SuggestionKind k);

struct QuerySuggestion {
  std::string text;
  SuggestionKind kind = SuggestionKind::kConvergent;
  std::string provenance;  // "facet:<attr>=<label>", "co_purchase:<leaf>", "evidence:<doc>"

  friend bool operator==(const QuerySuggestion&, const QuerySuggestion&) = default;
};

struct SuggestionConfig {
  std::size_t max_convergent = 3;
  std::size_t max_stimulative = 2;
  // leaf category -> complementary categories
  std::map<std::string, std::vector<std::string>> co_purchase;
  std::map<std::string, std::string> templates;

  static SuggestionConfig defaults();
  const std::string& tmpl(const std::string& name) const;
};

void to_json(Json& j, const SuggestionConfig& c);
void from_json(const Json& j, SuggestionConfig& c);

// Convergent: the current query plus the most populous known bucket of each
// facet in order, phrased so the planner parses it back into one more hard
// constraint. Stimulative: co-purchase entries for the candidates' leaf
// categories, then other catalog leaf categories named in evidence docs.
// Duplicates and queries already in search_history are dropped.
std::vector<QuerySuggestion> suggest_queries(const memory::SessionContext& ctx,
                                             const CandidateSet& cands,
                                             const std::vector<Facet>& facets,
                                             const executor::EvidenceSet& evidence,
                                             const std::set<std::string>& catalog_leaves,
                                             const SuggestionConfig& config);

void to_json(Json& j, const QuerySuggestion& s);
void from_json(const Json& j, QuerySuggestion& s);

}  // namespace cogsearch::guider
