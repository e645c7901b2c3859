#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cogsearch/guider/facets.hpp"

namespace cogsearch::guider {

using executor::EvidenceSet;

struct Kpi {
  std::string attribute;
  std::string why;
  std::size_t mentions = 0;
  double info_gain = 0.0;
};

struct Tradeoff {
  std::string item_a;
  std::string item_b;
  std::string dimension;
  std::string statement;
};

struct PurchaseStrategy {
  std::vector<Kpi> category_kpis;
  std::vector<Tradeoff> tradeoffs;
  std::optional<std::string> budget_note;
};

struct StrategyConfig {
  std::size_t kpi_count = 3;
  double tradeoff_min_relative = 0.10;
  // attribute -> extra phrases that count as a mention in evidence text
  std::map<std::string, std::vector<std::string>> kpi_synonyms;
  // Surface templates, filled with render_template.
  std::map<std::string, std::string> templates;

  static StrategyConfig defaults();
  const std::string& tmpl(const std::string& name) const;
};

void to_json(Json& j, const StrategyConfig& c);
void from_json(const Json& j, StrategyConfig& c);

// KPIs: attributes present in any candidate, ranked by the number of
// evidence docs mentioning them (attribute label or a synonym, whole-token
// phrase match on title + body), then by info_gain, then name.
// Tradeoffs: the top-2 candidates by fused score, one statement per
// attribute both carry and that differs (numeric: relative difference of at
// least tradeoff_min_relative; text: inequality).
// Budget note: when a price ceiling exists, how many candidates fit it.
PurchaseStrategy generate_strategy(const CandidateSet& cands, const EvidenceSet& evidence,
                                   const UserState& state,
                                   const std::vector<planner::Constraint>& constraints,
                                   const StrategyConfig& config,
                                   const FacetConfig& facets = FacetConfig::defaults());

void to_json(Json& j, const Kpi& k);
void from_json(const Json& j, Kpi& k);
void to_json(Json& j, const Tradeoff& t);
void from_json(const Json& j, Tradeoff& t);
void to_json(Json& j, const PurchaseStrategy& s);
void from_json(const Json& j, PurchaseStrategy& s);

}  // namespace cogsearch::guider
