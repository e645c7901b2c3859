#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cogsearch/executor/types.hpp"
#include "cogsearch/generative.hpp"
#include "cogsearch/guider/strategy.hpp"
#include "cogsearch/memory/session_context.hpp"
#include "cogsearch/planner/constraint.hpp"

namespace cogsearch::decider {

using Json = nlohmann::json;
using executor::CandidateSet;
using executor::EvidenceSet;

struct DecisionContext {
  CandidateSet candidates;
  EvidenceSet evidence;
  std::vector<memory::Interaction> trajectory;
  Json profile = Json::object();
  std::vector<planner::Constraint> constraints;
  guider::PurchaseStrategy strategy;
};

// Candidates come from `narrowed` when given (facet selections), otherwise
// from the union of ok ProductSearch results. Evidence is the union of ok
// WebSearch results, deduplicated by doc id keeping the higher score.
// Throws ValidationError("nothing to decide") when no ProductSearch result
// is ok and nothing was narrowed.
DecisionContext fuse_context(const std::map<std::string, executor::TaskResult>& results,
                             const memory::SessionContext& ctx,
                             std::vector<planner::Constraint> constraints,
                             guider::PurchaseStrategy strategy,
                             const CandidateSet* narrowed = nullptr);

struct UtilityVector {
  double functional = 0.0;
  double economic = 0.0;
  double reliability = 0.0;
  int constraint_ok = 1;
  double pre_gate = 0.0;  // weighted sum before the hard-constraint gate
  double total = 0.0;
};

struct EvalProtocol {
  double w_functional = 0.5;
  double w_economic = 0.3;
  double w_reliability = 0.2;
  // Off only in tests that scale the weights off the simplex.
  bool require_simplex = true;
  // Share of an item's distinct title tokens a doc must contain to count
  // as mentioning it.
  double mention_share = 0.5;
  std::map<std::string, std::string> templates;

  static EvalProtocol defaults();
  void validate() const;
  const std::string& tmpl(const std::string& name) const;
};

void to_json(Json& j, const EvalProtocol& p);
void from_json(const Json& j, EvalProtocol& p);

// True when doc title+body holds at least ceil(share * n) of the n distinct
// title tokens.
bool mentions(const executor::EvidenceEntry& doc, const std::string& title, double share);

// functional  = (soft constraint match + sentiment) / 2
// economic    = clamp(1 - max(0, price - budget) / budget, 0, 1), 1 without budget
// reliability = (rating / 5 + mean Auth of mentioning docs, 0.5 if none) / 2
// total       = constraint_ok * weighted sum
UtilityVector score_item(const std::string& item_id, const DecisionContext& dctx,
                         const EvalProtocol& protocol);

struct Citation {
  enum class Kind { kReviewPhrase, kEvidenceDoc, kConstraint, kTradeoff };
  Kind kind;
  std::string ref;
  std::string item_id;

  friend bool operator==(const Citation&, const Citation&) = default;
};

std::string_view to_string(Citation::Kind k);

struct RationaleLine {
  std::string dimension;
  std::string text;
  std::vector<Citation> citations;
};

struct Recommendation {
  std::string best;
  std::vector<std::pair<std::string, UtilityVector>> ranked;
  std::vector<RationaleLine> rationale;
  bool all_gated = false;
  std::optional<std::string> rewrite_fallback;

  std::string rationale_text() const;
};

// Scores and ranks every candidate: total desc, then pre-gate total desc,
// then item id asc. Near-equal values (relative 1e-12) count as ties so
// rescaled weights cannot reorder through rounding. Throws ValidationError
// on an empty candidate set or invalid protocol.
Recommendation decide(const DecisionContext& dctx, const EvalProtocol& protocol);

// Lets a backend reword the rationale. The reply must keep every line's
// dimension and citations; otherwise the templated text is kept and
// rewrite_fallback says why.
Recommendation rewrite_rationale(Recommendation rec, const DecisionContext& dctx,
                                 GenerativeBackend& backend);

// Problems with the rationale's citations; empty when all resolve.
std::vector<std::string> verify_citations(const Recommendation& rec, const DecisionContext& dctx);

void to_json(Json& j, const UtilityVector& v);
void from_json(const Json& j, UtilityVector& v);
void to_json(Json& j, const Citation& c);
void from_json(const Json& j, Citation& c);
void to_json(Json& j, const RationaleLine& l);
void from_json(const Json& j, RationaleLine& l);
void to_json(Json& j, const Recommendation& r);
void from_json(const Json& j, Recommendation& r);

}  // namespace cogsearch::decider
