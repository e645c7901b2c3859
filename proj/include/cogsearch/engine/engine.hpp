#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cogsearch/catalog/catalog.hpp"
#include "cogsearch/decider/decider.hpp"
#include "cogsearch/executor/executor.hpp"
#include "cogsearch/guider/strategy.hpp"
#include "cogsearch/guider/suggestions.hpp"
#include "cogsearch/memory/memory_store.hpp"
#include "cogsearch/planner/planner.hpp"

namespace cogsearch::engine {

using Json = nlohmann::json;

// Pipeline stages that can be switched off for ablation runs.
struct Ablation {
  bool websearch = false;
  bool guider = false;
  bool decider = false;
  bool memory = false;
  bool planner = false;

  // "websearch,guider"; throws ValidationError on unknown names.
  static Ablation parse(const std::string& csv);
  std::vector<std::string> names() const;
};

struct EngineConfig {
  planner::PlannerConfig planner = planner::PlannerConfig::defaults();
  executor::ExecutorConfig executor;
  guider::FacetConfig facets = guider::FacetConfig::defaults();
  guider::StrategyConfig strategy = guider::StrategyConfig::defaults();
  guider::SuggestionConfig suggestions = guider::SuggestionConfig::defaults();
  decider::EvalProtocol protocol = decider::EvalProtocol::defaults();
  executor::StubFixtures tools = executor::StubFixtures::defaults();
  // Reference time for freshness; the clock is used when unset.
  std::optional<Timestamp> as_of;
  Ablation ablation;

  static EngineConfig defaults() { return {}; }
};

void to_json(Json& j, const EngineConfig& c);
// Missing keys keep their defaults (the document is merge-patched onto the
// default config first).
void from_json(const Json& j, EngineConfig& c);
EngineConfig load_config(const std::filesystem::path& path);
// fnv1a64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const EngineConfig& c);

struct TurnEvent {
  std::string type;
  std::size_t turn = 0;
  std::uint64_t seq = 0;
  Json payload = Json::object();
};

void to_json(Json& j, const TurnEvent& e);
void from_json(const Json& j, TurnEvent& e);

using EventSink = std::function<void(const TurnEvent&)>;

class TurnInProgress : public Error {
 public:
  using Error::Error;
};

// Everything the follow-up endpoints need, persisted per turn as an
// agent_state record {"agent": "service", "type": "state", "state": ...}.
struct SessionState {
  std::size_t turn = 0;
  std::string query;
  std::vector<planner::Constraint> constraints;
  executor::CandidateSet candidates;
  executor::EvidenceSet evidence;
  std::vector<guider::Facet> facets;
  std::vector<guider::FacetSelection> active_facets;
  std::map<std::string, std::vector<std::string>> facet_members;
  guider::PurchaseStrategy strategy;
  std::vector<guider::QuerySuggestion> suggestions;
  std::optional<decider::Recommendation> recommendation;
  std::vector<std::string> errors;
};

void to_json(Json& j, const SessionState& s);
void from_json(const Json& j, SessionState& s);

struct TurnOutcome {
  SessionState state;
  std::optional<planner::PlanResult> plan;
  executor::Execution execution;
};

// The full plan -> execute -> guide -> decide pipeline over one catalog.
//
// Every public call emits a stream of TurnEvents with seq gapless from 1 and
// a final "done". The call always runs to completion: a sink that throws is
// dropped and the rest of the turn still lands in memory. At most one call
// per session runs at a time; a second one throws TurnInProgress.
class Engine {
 public:
  Engine(std::shared_ptr<const catalog::Catalog> cat, EngineConfig config,
         std::shared_ptr<memory::MemoryStore> memory = nullptr, Clock clock = system_now);

  void set_web_source(std::shared_ptr<const executor::WebSource> web);
  void set_planner_backend(std::shared_ptr<GenerativeBackend> b) { planner_backend_ = std::move(b); }
  void set_rationale_backend(std::shared_ptr<GenerativeBackend> b) { rationale_backend_ = std::move(b); }

  // Random opaque id unless one is given.
  std::string create_session(std::optional<std::string> id = std::nullopt);

  // Throws NotFoundError for unknown sessions; an empty query yields an
  // error event then done.
  TurnOutcome run_turn(const std::string& session_id, const std::string& query,
                       const Json& profile = Json::object(), const EventSink& sink = {});

  // Streams facets, recommendation, done. A selection that is not a bucket
  // of the current facets yields an error event; repeating an already
  // active selection re-emits the current state.
  SessionState click_facet(const std::string& session_id, const guider::FacetSelection& selection,
                           const EventSink& sink = {});

  // Records a suggestion_click and runs a new turn with the suggestion as
  // the query. Text that was not suggested last turn yields an error event.
  TurnOutcome accept_suggestion(const std::string& session_id, const std::string& text,
                                const EventSink& sink = {});

  // Product click or add-to-cart; feeds UserState weights.
  void record_interaction(const std::string& session_id, const memory::Interaction& in);

  std::optional<SessionState> state(const std::string& session_id) const;
  memory::SessionContext context(const std::string& session_id, const std::string& query,
                                 const Json& profile) const;

  const EngineConfig& config() const { return config_; }
  const catalog::Catalog& catalog() const { return *cat_; }
  memory::MemoryStore& memory() { return *memory_; }

 private:
  class Emitter;
  class Busy;

  Timestamp as_of() const { return config_.as_of.value_or(clock_()); }
  void require_session(const std::string& session_id) const;
  TurnOutcome turn_impl(const std::string& session_id, const std::string& query,
                        const Json& profile, Emitter& emit);
  void guide_and_decide(const memory::SessionContext& ctx, SessionState& st,
                        const std::map<std::string, executor::TaskResult>* results, Emitter& emit,
                        bool emit_strategy);
  void save_state(const std::string& session_id, const SessionState& st);

  std::shared_ptr<const catalog::Catalog> cat_;
  EngineConfig config_;
  planner::PlannerConfig planner_config_;
  std::shared_ptr<memory::MemoryStore> memory_;
  Clock clock_;
  std::shared_ptr<const executor::ToolRegistry> tools_;
  std::shared_ptr<const executor::WebSource> web_;
  std::unique_ptr<executor::Executor> executor_;
  std::shared_ptr<GenerativeBackend> planner_backend_;
  std::shared_ptr<GenerativeBackend> rationale_backend_;

  mutable std::mutex busy_mu_;
  std::set<std::string> busy_;
};

}  // namespace cogsearch::engine
