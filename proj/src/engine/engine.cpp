#include "cogsearch/engine/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include "cogsearch/util/text.hpp"

namespace cogsearch::engine {

namespace {

constexpr const char* kAblationNames[] = {"websearch", "guider", "decider", "memory", "planner"};

}  // namespace

Ablation Ablation::parse(const std::string& csv) {
  Ablation a;
  for (const auto& raw : text::tokenize(csv)) {
    if (raw == "websearch") {
      a.websearch = true;
    } else if (raw == "guider") {
      a.guider = true;
    } else if (raw == "decider") {
      a.decider = true;
    } else if (raw == "memory") {
      a.memory = true;
    } else if (raw == "planner") {
      a.planner = true;
    } else {
      throw ValidationError("unknown ablation '" + raw + "'");
    }
  }
  return a;
}

std::vector<std::string> Ablation::names() const {
  const bool on[] = {websearch, guider, decider, memory, planner};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < 5; ++i) {
    if (on[i]) out.emplace_back(kAblationNames[i]);
  }
  return out;
}

void to_json(Json& j, const EngineConfig& c) {
  j = Json{{"planner", c.planner},
           {"executor", c.executor},
           {"facets", c.facets},
           {"strategy", c.strategy},
           {"suggestions", c.suggestions},
           {"protocol", c.protocol},
           {"tools", c.tools},
           {"as_of", c.as_of ? Json(format_rfc3339(*c.as_of)) : Json(nullptr)},
           {"ablation", c.ablation.names()}};
}

void from_json(const Json& j, EngineConfig& c) {
  Json merged = EngineConfig::defaults();
  merged.merge_patch(j);
  c.planner = merged.at("planner").get<planner::PlannerConfig>();
  c.executor = merged.at("executor").get<executor::ExecutorConfig>();
  c.facets = merged.at("facets").get<guider::FacetConfig>();
  c.strategy = merged.at("strategy").get<guider::StrategyConfig>();
  c.suggestions = merged.at("suggestions").get<guider::SuggestionConfig>();
  c.protocol = merged.at("protocol").get<decider::EvalProtocol>();
  c.tools = merged.at("tools").get<executor::StubFixtures>();
  c.as_of.reset();
  if (merged.contains("as_of") && !merged["as_of"].is_null()) {
    c.as_of = parse_rfc3339(merged["as_of"].get<std::string>());
  }
  c.ablation = {};
  if (merged.contains("ablation") && !merged["ablation"].is_null()) {
    c.ablation =
        Ablation::parse(text::join(merged["ablation"].get<std::vector<std::string>>(), ","));
  }
  c.executor.web.weights.validate();
  c.protocol.validate();
}

EngineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
  return j.get<EngineConfig>();
}

std::string config_hash(const EngineConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(text::fnv1a64(Json(c).dump())));
  return buf;
}

void to_json(Json& j, const TurnEvent& e) {
  j = Json{{"type", e.type}, {"turn", e.turn}, {"seq", e.seq}, {"payload", e.payload}};
}

void from_json(const Json& j, TurnEvent& e) {
  e.type = j.at("type").get<std::string>();
  e.turn = j.at("turn").get<std::size_t>();
  e.seq = j.at("seq").get<std::uint64_t>();
  e.payload = j.value("payload", Json::object());
}

void to_json(Json& j, const SessionState& s) {
  j = Json{{"turn", s.turn},
           {"query", s.query},
           {"constraints", s.constraints},
           {"candidates", s.candidates},
           {"evidence", s.evidence},
           {"facets", s.facets},
           {"active_facets", s.active_facets},
           {"facet_members", s.facet_members},
           {"strategy", s.strategy},
           {"suggestions", s.suggestions},
           {"recommendation", s.recommendation ? Json(*s.recommendation) : Json(nullptr)},
           {"errors", s.errors}};
}

void from_json(const Json& j, SessionState& s) {
  s.turn = j.at("turn").get<std::size_t>();
  s.query = j.at("query").get<std::string>();
  s.constraints = j.at("constraints").get<std::vector<planner::Constraint>>();
  s.candidates = j.at("candidates").get<executor::CandidateSet>();
  s.evidence = j.at("evidence").get<executor::EvidenceSet>();
  s.facets = j.at("facets").get<std::vector<guider::Facet>>();
  s.active_facets = j.at("active_facets").get<std::vector<guider::FacetSelection>>();
  s.facet_members = j.at("facet_members").get<std::map<std::string, std::vector<std::string>>>();
  s.strategy = j.at("strategy").get<guider::PurchaseStrategy>();
  s.suggestions = j.at("suggestions").get<std::vector<guider::QuerySuggestion>>();
  s.recommendation.reset();
  if (!j.at("recommendation").is_null()) {
    s.recommendation = j["recommendation"].get<decider::Recommendation>();
  }
  s.errors = j.at("errors").get<std::vector<std::string>>();
}

// Assigns seq numbers and forwards to the sink under one lock, so events
// reach the sink in seq order even when tasks finish on worker threads.
class Engine::Emitter {
 public:
  Emitter(const EventSink& sink, std::size_t turn) : sink_(sink), turn_(turn) {}

  void set_turn(std::size_t turn) { turn_ = turn; }
  std::size_t turn() const { return turn_; }

  void operator()(const std::string& type, Json payload) {
    std::lock_guard lock(mu_);
    TurnEvent e{type, turn_, ++seq_, std::move(payload)};
    if (sink_ && !dropped_) {
      try {
        sink_(e);
      } catch (...) {
        dropped_ = true;  // client went away; finish the turn anyway
      }
    }
  }

 private:
  const EventSink& sink_;
  std::size_t turn_;
  std::mutex mu_;
  std::uint64_t seq_ = 0;
  bool dropped_ = false;
};

class Engine::Busy {
 public:
  Busy(Engine& e, std::string id) : e_(e), id_(std::move(id)) {
    std::lock_guard lock(e_.busy_mu_);
    if (!e_.busy_.insert(id_).second) throw TurnInProgress("turn in progress");
  }
  ~Busy() {
    std::lock_guard lock(e_.busy_mu_);
    e_.busy_.erase(id_);
  }
  Busy(const Busy&) = delete;
  Busy& operator=(const Busy&) = delete;

 private:
  Engine& e_;
  std::string id_;
};

Engine::Engine(std::shared_ptr<const catalog::Catalog> cat, EngineConfig config,
               std::shared_ptr<memory::MemoryStore> memory, Clock clock)
    : cat_(std::move(cat)),
      config_(std::move(config)),
      planner_config_(config_.planner.with_schema(cat_->attribute_schema())),
      memory_(memory ? std::move(memory) : std::make_shared<memory::MemoryStore>(clock)),
      clock_(std::move(clock)),
      tools_(std::make_shared<executor::ToolRegistry>(executor::ToolRegistry::with_stubs(config_.tools))),
      web_(std::make_shared<executor::LocalCorpusSource>(cat_)) {
  config_.protocol.validate();
  executor_ = std::make_unique<executor::Executor>(cat_, web_, tools_, config_.executor);
}

void Engine::set_web_source(std::shared_ptr<const executor::WebSource> web) {
  web_ = std::move(web);
  executor_ = std::make_unique<executor::Executor>(cat_, web_, tools_, config_.executor);
}

std::string Engine::create_session(std::optional<std::string> id) {
  if (!id) {
    static std::mutex mu;
    static std::mt19937_64 rng{std::random_device{}()};
    std::lock_guard lock(mu);
    char buf[20];
    std::snprintf(buf, sizeof buf, "s-%016llx", static_cast<unsigned long long>(rng()));
    id = buf;
  }
  memory_->create_session(*id);
  return *id;
}

void Engine::require_session(const std::string& session_id) const {
  if (!memory_->has_session(session_id)) throw NotFoundError("unknown session");
}

memory::SessionContext Engine::context(const std::string& session_id, const std::string& query,
                                       const Json& profile) const {
  memory::SessionContext ctx;
  ctx.session_id = session_id;
  ctx.query = query;
  Json stored = Json::object();
  for (const auto& r : memory_->records(session_id, memory::RecordKind::kTurn)) {
    const auto type = r.payload.value("type", std::string{});
    if (type == "query") {
      ++ctx.turn_index;
      if (!config_.ablation.memory) ctx.search_history.push_back(r.payload.at("query"));
      if (r.payload.contains("profile")) stored.merge_patch(r.payload["profile"]);
    } else if (type == "interaction" && !config_.ablation.memory) {
      ctx.click_history.push_back(r.payload.at("interaction").get<memory::Interaction>());
    }
  }
  stored.merge_patch(profile.is_object() ? profile : Json::object());
  ctx.user_profile = stored;
  return ctx;
}

std::optional<SessionState> Engine::state(const std::string& session_id) const {
  const auto recs = memory_->records(session_id, memory::RecordKind::kAgentState);
  for (auto it = recs.rbegin(); it != recs.rend(); ++it) {
    if (it->payload.value("agent", "") == "service" && it->payload.value("type", "") == "state") {
      return it->payload.at("state").get<SessionState>();
    }
  }
  return std::nullopt;
}

void Engine::save_state(const std::string& session_id, const SessionState& st) {
  memory_->append(session_id, memory::RecordKind::kAgentState,
                  Json{{"agent", "service"}, {"type", "state"}, {"state", st}});
}

void Engine::record_interaction(const std::string& session_id, const memory::Interaction& in) {
  require_session(session_id);
  memory_->append(session_id, memory::RecordKind::kTurn,
                  Json{{"type", "interaction"}, {"interaction", in}});
}

namespace {

void strip_web_nodes(planner::TaskGraph& g) {
  std::set<std::string> drop;
  for (const auto& n : g.nodes) {
    if (n.kind == planner::TaskKind::kWebSearch) drop.insert(n.id);
  }
  // Consumers that lose a feeding edge go too.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : g.edges) {
      if (drop.count(e.from) && !drop.count(e.to)) changed = drop.insert(e.to).second || changed;
    }
  }
  std::erase_if(g.nodes, [&](const auto& n) { return drop.count(n.id) > 0; });
  std::erase_if(g.edges, [&](const auto& e) { return drop.count(e.from) || drop.count(e.to); });
}

Json task_summary(const executor::TaskResult& r) {
  Json j{{"node_id", r.node_id}, {"status", executor::to_string(r.status)}};
  if (r.error) {
    j["error"] = *r.error;
    j["error_kind"] = executor::to_string(r.error_kind);
  }
  if (const auto* c = r.candidates()) {
    j["count"] = c->items.size();
  } else if (const auto* e = r.evidence()) {
    j["count"] = e->docs.size();
    j["expansion_queries"] = e->expansion_queries;
  } else if (const auto* t = r.tool_output()) {
    j["output"] = *t;
  }
  return j;
}

Json facets_payload(const SessionState& st, bool ablated) {
  Json j{{"facets", st.facets},
         {"active_facets", st.active_facets},
         {"candidate_count", st.candidates.items.size()}};
  if (ablated) j["ablated"] = true;
  return j;
}

Json recommendation_payload(const SessionState& st, bool ablated) {
  Json j = st.recommendation ? Json(*st.recommendation)
                             : Json{{"best", nullptr}, {"ranked", Json::array()}};
  j["candidate_count"] = st.candidates.items.size();
  if (ablated) j["ablated"] = true;
  return j;
}

}  // namespace

void Engine::guide_and_decide(const memory::SessionContext& ctx, SessionState& st,
                              const std::map<std::string, executor::TaskResult>*, Emitter& emit,
                              bool full_turn) {
  const auto& ab = config_.ablation;
  if (!ab.guider && !st.candidates.empty()) {
    const auto us =
        guider::derive_user_state(ctx, st.candidates, st.active_facets, st.facet_members);
    st.facets = guider::generate_facets(st.candidates, us, st.constraints, config_.facets);
    st.strategy = guider::generate_strategy(st.candidates, st.evidence, us, st.constraints,
                                            config_.strategy, config_.facets);
    if (full_turn) {
      st.suggestions = guider::suggest_queries(ctx, st.candidates, st.facets, st.evidence,
                                               cat_->leaf_categories(), config_.suggestions);
    }
  } else {
    st.facets.clear();
    st.strategy = {};
    if (full_turn) st.suggestions.clear();
  }
  emit("facets", facets_payload(st, ab.guider));
  if (full_turn) {
    Json strategy = st.strategy;
    if (ab.guider) strategy["ablated"] = true;
    emit("strategy", strategy);
    emit("suggestions", Json{{"suggestions", st.suggestions}});
  }

  st.recommendation.reset();
  if (!st.candidates.empty()) {
    if (ab.decider) {
      decider::Recommendation rec;
      for (const auto& it : st.candidates.items) rec.ranked.emplace_back(it.product_id, decider::UtilityVector{});
      rec.best = rec.ranked.front().first;
      st.recommendation = std::move(rec);
    } else {
      decider::DecisionContext d;
      d.candidates = st.candidates;
      d.evidence = st.evidence;
      d.trajectory = ctx.click_history;
      d.profile = ctx.user_profile;
      d.constraints = st.constraints;
      d.strategy = st.strategy;
      auto rec = decider::decide(d, config_.protocol);
      if (rationale_backend_) rec = decider::rewrite_rationale(std::move(rec), d, *rationale_backend_);
      st.recommendation = std::move(rec);
    }
  }
  emit("recommendation", recommendation_payload(st, ab.decider));
}

TurnOutcome Engine::turn_impl(const std::string& session_id, const std::string& query,
                              const Json& profile, Emitter& emit) {
  TurnOutcome out;
  auto ctx = context(session_id, query, profile);
  if (text::trim(query).empty()) {
    emit.set_turn(ctx.turn_index);
    emit("error", Json{{"message", "empty query"}, {"kind", "validation"}});
    emit("done", Json{{"status", "error"}});
    if (auto st = state(session_id)) out.state = *st;
    return out;
  }
  memory_->append(session_id, memory::RecordKind::kTurn,
                  Json{{"type", "query"}, {"query", query}, {"profile", profile.is_object() ? profile : Json::object()}});
  ctx.turn_index += 1;
  emit.set_turn(ctx.turn_index);
  const auto& ab = config_.ablation;

  planner::PlanResult plan;
  if (ab.planner) {
    plan.core_query = query;
    plan.graph.nodes.push_back({planner::kProductNode, planner::TaskKind::kProductSearch, {},
                                {planner::kCandidatesSlot}, planner::ProductSearchParams{query, {}}});
  } else if (planner_backend_) {
    plan = planner::plan_generative(ctx, *planner_backend_, planner_config_, memory_.get());
  } else {
    plan = planner::plan(ctx, planner_config_);
  }
  if (ab.websearch) strip_web_nodes(plan.graph);
  Json plan_json{{"graph", plan.graph},
                 {"constraints", plan.constraints},
                 {"core_query", plan.core_query},
                 {"fallback", plan.fallback}};
  if (plan.fallback) plan_json["fallback_reason"] = plan.fallback_reason;
  memory_->append(session_id, memory::RecordKind::kTaskGraph,
                  Json{{"turn", ctx.turn_index}, {"plan", plan_json}});
  emit("plan", plan_json);

  executor::ScheduleHooks hooks;
  hooks.on_start = [&](const planner::TaskNode& n) {
    emit("task_started", Json{{"node_id", n.id}, {"kind", planner::to_string(n.kind)}});
  };
  hooks.on_finish = [&](const executor::TaskResult& r) { emit("task_finished", task_summary(r)); };
  out.execution = executor_->execute(plan.graph, ctx, as_of(),
                                     ab.memory ? nullptr : memory_.get(), hooks);

  SessionState st;
  st.turn = ctx.turn_index;
  st.query = query;
  st.constraints = plan.constraints;
  try {
    auto d = decider::fuse_context(out.execution.results, ctx, {}, {});
    st.candidates = std::move(d.candidates);
    st.evidence = std::move(d.evidence);
  } catch (const ValidationError& e) {
    st.errors.push_back(e.what());
    emit("error", Json{{"message", e.what()}, {"kind", "execution"}});
    save_state(session_id, st);
    emit("done", Json{{"status", "error"}});
    out.state = std::move(st);
    out.plan = std::move(plan);
    return out;
  }

  guide_and_decide(ctx, st, &out.execution.results, emit, true);
  save_state(session_id, st);
  emit("done", Json{{"status", "ok"}});
  out.state = std::move(st);
  out.plan = std::move(plan);
  return out;
}

TurnOutcome Engine::run_turn(const std::string& session_id, const std::string& query,
                             const Json& profile, const EventSink& sink) {
  require_session(session_id);
  Busy busy(*this, session_id);
  Emitter emit(sink, 0);
  return turn_impl(session_id, query, profile, emit);
}

SessionState Engine::click_facet(const std::string& session_id,
                                 const guider::FacetSelection& selection, const EventSink& sink) {
  require_session(session_id);
  Busy busy(*this, session_id);
  auto current = state(session_id);
  Emitter emit(sink, current ? current->turn : 0);
  auto stale = [&](const std::string& msg) {
    emit("error", Json{{"message", msg}, {"kind", "stale"}});
    emit("done", Json{{"status", "error"}});
    return current.value_or(SessionState{});
  };
  if (!current) return stale("no active turn; run a query first");
  SessionState st = *current;

  const auto& active = st.active_facets;
  if (std::find(active.begin(), active.end(), selection) != active.end()) {
    emit("facets", facets_payload(st, config_.ablation.guider));
    emit("recommendation", recommendation_payload(st, config_.ablation.decider));
    emit("done", Json{{"status", "ok"}});
    return st;
  }
  const guider::Facet* facet = nullptr;
  for (const auto& f : st.facets) {
    if (f.attribute == selection.attribute) facet = &f;
  }
  const guider::Bucket* bucket = facet ? facet->find(selection.label) : nullptr;
  if (!bucket) {
    return stale("stale facet selection '" + selection.attribute + "=" + selection.label +
                 "'; refresh facets");
  }

  auto narrowed = guider::apply_facet(st.candidates, st.facets, selection, memory_.get(),
                                      session_id, clock_());
  st.facet_members[selection.attribute + "=" + selection.label] = bucket->members;
  for (auto& c : guider::selection_constraints(*facet, *bucket)) st.constraints.push_back(std::move(c));
  st.active_facets.push_back(selection);
  st.candidates = std::move(narrowed);

  const auto ctx = context(session_id, st.query, Json::object());
  guide_and_decide(ctx, st, nullptr, emit, false);
  save_state(session_id, st);
  emit("done", Json{{"status", "ok"}});
  return st;
}

TurnOutcome Engine::accept_suggestion(const std::string& session_id, const std::string& text,
                                      const EventSink& sink) {
  require_session(session_id);
  Busy busy(*this, session_id);
  const auto current = state(session_id);
  const bool known =
      current && std::any_of(current->suggestions.begin(), current->suggestions.end(),
                             [&](const auto& s) { return s.text == text; });
  Emitter emit(sink, current ? current->turn : 0);
  if (!known) {
    emit("error", Json{{"message", "unknown suggestion"}, {"kind", "validation"}});
    emit("done", Json{{"status", "error"}});
    TurnOutcome out;
    if (current) out.state = *current;
    return out;
  }
  memory_->append(session_id, memory::RecordKind::kTurn,
                  Json{{"type", "interaction"},
                       {"interaction", memory::Interaction{text, memory::InteractionKind::kSuggestionClick,
                                                           clock_()}}});
  return turn_impl(session_id, text, Json::object(), emit);
}

}  // namespace cogsearch::engine
