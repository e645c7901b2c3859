#pragma once

#include <map>
#include <string>
#include <vector>

#include "cogsearch/catalog/catalog.hpp"
#include "cogsearch/generative.hpp"
#include "cogsearch/memory/memory_store.hpp"
#include "cogsearch/memory/session_context.hpp"
#include "cogsearch/planner/task_graph.hpp"

namespace cogsearch::planner {

struct ToolTrigger {
  std::string phrase;
  std::string tool;
  // When set, the word after the phrase is captured into args[capture_arg].
  std::string capture_arg;
};

struct AttributeVocab {
  bool numeric = false;
  std::string unit;
};

// Trigger lexicons and patterns. All of this is product configuration; the
// shipped defaults live in config/cogsearch.json.
struct PlannerConfig {
  std::vector<std::string> consultative_triggers;
  std::vector<std::string> activities;
  std::vector<ToolTrigger> tool_triggers;
  std::map<std::string, std::vector<std::string>> tool_inputs;
  std::map<std::string, Json> tool_default_args;
  // tool -> {arg name -> user_profile key}
  std::map<std::string, std::map<std::string, std::string>> tool_profile_args;
  // tool -> arg that receives the core query
  std::map<std::string, std::string> tool_query_arg;
  std::vector<std::string> below_cues;
  std::vector<std::string> above_cues;
  std::vector<std::string> currency_symbols;
  std::vector<std::string> currency_words;
  std::vector<std::string> negation_cues;
  std::map<std::string, std::string> negation_attributes;
  std::map<std::string, std::string> unit_attributes;
  std::map<std::string, std::string> attribute_aliases;
  // Catalog attributes the planner can name ("with color red",
  // "under 200g weight"). Usually filled from the catalog schema.
  std::map<std::string, AttributeVocab> attributes;

  static PlannerConfig defaults();
  // Adds catalog attributes and unit mappings that are not configured yet.
  PlannerConfig with_schema(const std::map<std::string, catalog::AttributeInfo>& schema) const;
};

void to_json(Json& j, const PlannerConfig& c);
void from_json(const Json& j, PlannerConfig& c);

struct PlanResult {
  TaskGraph graph;
  std::vector<Constraint> constraints;
  std::string core_query;
  bool fallback = false;
  std::string fallback_reason;
};

// Node ids and slots used by the rule planner.
inline constexpr const char* kProductNode = "product_search";
inline constexpr const char* kWebNode = "web_search";
inline constexpr const char* kCandidatesSlot = "candidates";
inline constexpr const char* kEvidenceSlot = "evidence";
inline constexpr const char* kToolOutputSlot = "tool_output";
std::string tool_node_id(const std::string& tool);

// Deterministic rule planner. Rules, in priority order: tool triggers,
// price/measure patterns, negations, "with <attribute> <value>",
// consultative triggers, and always one ProductSearch over the
// constraint-stripped core query. Throws ValidationError on a blank query.
PlanResult plan(const memory::SessionContext& ctx, const PlannerConfig& config);

// Prompt sent to generative planners. Schema "cogsearch.plan_request/v1":
//   {"schema", "instructions", "context": SessionContext, "response_schema":
//    "cogsearch.task_graph/v1"}
std::string plan_prompt(const memory::SessionContext& ctx);

// Asks the backend for a task graph. Any transport error, schema error or
// validate_graph violation falls back to plan(ctx); when `memory` is given
// the fallback is recorded as an agent_state event for ctx.session_id.
PlanResult plan_generative(const memory::SessionContext& ctx, GenerativeBackend& backend,
                           const PlannerConfig& config, memory::MemoryStore* memory = nullptr,
                           std::chrono::milliseconds timeout = std::chrono::seconds(5));

// Backend stub that answers plan prompts with the rule planner's graph.
std::unique_ptr<GenerativeBackend> make_rule_echo_backend(PlannerConfig config);

}  // namespace cogsearch::planner
