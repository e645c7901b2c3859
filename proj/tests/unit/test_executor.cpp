#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <thread>

#include "cogsearch/executor/executor.hpp"
#include "cogsearch/planner/planner.hpp"
#include "fixtures.hpp"

using namespace cogsearch;
using namespace cogsearch::executor;
using planner::TaskGraph;
using planner::TaskKind;
using planner::TaskNode;
using namespace std::chrono_literals;

namespace {

TaskNode web_node(std::string id, std::set<std::string> in, std::set<std::string> out) {
  TaskNode n;
  n.id = std::move(id);
  n.kind = TaskKind::kWebSearch;
  n.inputs = std::move(in);
  n.outputs = std::move(out);
  n.params = planner::WebSearchParams{"x"};
  return n;
}

// a -> b -> d, a -> c (c is a sibling of b).
TaskGraph diamond() {
  TaskGraph g;
  g.nodes = {web_node("a", {}, {"s"}), web_node("b", {"s"}, {"t"}), web_node("c", {"s"}, {}),
             web_node("d", {"t"}, {})};
  g.edges = {{"a", "b", "s"}, {"a", "c", "s"}, {"b", "d", "t"}};
  return g;
}

TaskResult ok(const TaskNode& n) { return {n.id, TaskStatus::kOk, Json::object(), 0, {}, {}}; }

const Timestamp kAsOf = parse_rfc3339("2026-06-01T00:00:00Z");

}  // namespace

TEST(Scheduler, RunsEveryNodeAfterItsParents) {
  const auto g = diamond();
  const auto s = run_graph(g, [](const TaskNode& n, const Upstream&) { return ok(n); }, 3);
  ASSERT_EQ(s.results.size(), 4u);
  std::map<std::string, std::uint64_t> start, finish;
  for (const auto& e : s.trace) (e.type == TraceEvent::Type::kStart ? start : finish)[e.node_id] = e.seq;
  for (const auto& e : g.edges) EXPECT_LT(finish.at(e.from), start.at(e.to)) << e.from << "->" << e.to;
}

TEST(Scheduler, FailureSkipsDescendantsOnly) {
  const auto s = run_graph(diamond(), [](const TaskNode& n, const Upstream&) {
    if (n.id == "b") throw std::runtime_error("boom");
    return ok(n);
  }, 2);
  EXPECT_EQ(s.results.at("a").status, TaskStatus::kOk);
  EXPECT_EQ(s.results.at("b").status, TaskStatus::kFailed);
  EXPECT_EQ(s.results.at("b").error_kind, TaskErrorKind::kHandlerError);
  EXPECT_EQ(s.results.at("c").status, TaskStatus::kOk);
  EXPECT_EQ(s.results.at("d").status, TaskStatus::kSkipped);
  EXPECT_EQ(s.results.at("d").error_kind, TaskErrorKind::kAncestorFailed);
  for (const auto& e : s.trace) {
    if (e.node_id == "d") {
      EXPECT_EQ(e.type, TraceEvent::Type::kFinish);  // never started
    }
  }
}

TEST(Scheduler, UpstreamCarriesParentResults) {
  std::mutex mu;
  std::map<std::string, std::set<std::string>> seen;
  run_graph(diamond(), [&](const TaskNode& n, const Upstream& up) {
    std::lock_guard lock(mu);
    for (const auto& [id, r] : up) {
      seen[n.id].insert(id);
      EXPECT_TRUE(r->ok());
    }
    return ok(n);
  }, 1);
  EXPECT_EQ(seen["b"], (std::set<std::string>{"a"}));
  EXPECT_EQ(seen["d"], (std::set<std::string>{"b"}));
  EXPECT_FALSE(seen.count("a"));
}

TEST(Scheduler, IndependentNodesOverlapUpToParallelism) {
  TaskGraph g;
  for (int i = 0; i < 6; ++i) g.nodes.push_back(web_node("n" + std::to_string(i), {}, {}));
  std::atomic<int> in_flight{0}, peak{0};
  run_graph(g, [&](const TaskNode& n, const Upstream&) {
    const int now = ++in_flight;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    std::this_thread::sleep_for(20ms);
    --in_flight;
    return ok(n);
  }, 3);
  EXPECT_GE(peak.load(), 2);
  EXPECT_LE(peak.load(), 3);
}

TEST(Scheduler, RejectsInvalidGraph) {
  auto g = diamond();
  g.edges.push_back({"d", "a", "s"});
  EXPECT_THROW(run_graph(g, [](const TaskNode& n, const Upstream&) { return ok(n); }, 1),
               ValidationError);
}

TEST(ProductSearch, RrfMatchesOracle) {
  using catalog::ScoredDoc;
  const auto fused = rrf_fuse({{{"a", 9}, {"b", 8}, {"c", 7}}, {{"c", 3}, {"a", 2}, {"d", 1}}});
  ASSERT_EQ(fused.size(), 4u);
  EXPECT_EQ(fused[0].id, "a");
  EXPECT_NEAR(fused[0].score, 0.03252247488101534, 1e-15);
  EXPECT_EQ(fused[1].id, "c");
  EXPECT_NEAR(fused[1].score, 0.032266458495966696, 1e-15);
  EXPECT_EQ(fused[2].id, "b");
  EXPECT_NEAR(fused[2].score, 0.016129032258064516, 1e-15);
  EXPECT_EQ(fused[3].id, "d");
}

TEST(ProductSearch, ExactTitleRanksFirstAndHardConstraintsFilter) {
  const auto cat = fixtures::small_catalog();
  const auto r = product_search(*cat, "Anker Soundcore Q30 headphones", {}, {});
  ASSERT_FALSE(r.empty());
  EXPECT_EQ(r.items[0].product_id, "h3");
  EXPECT_LE(r.size(), 5u);

  const planner::Constraint cap{"price", planner::ConstraintOp::kLe, 100.0, planner::Hardness::kHard};
  const auto f = product_search(*cat, "headphones", {cap}, {});
  for (const auto& it : f.items) EXPECT_LE(cat->find(it.product_id)->price, 100.0);
  EXPECT_EQ(f.size(), 2u);

  auto soft = cap;
  soft.hardness = planner::Hardness::kSoft;
  EXPECT_GT(product_search(*cat, "headphones", {soft}, {}).size(), 2u);
}

TEST(ProductSearch, EnrichmentRanksPhrasesByFrequencyThenLength) {
  const auto cat = fixtures::small_catalog();
  const auto e = enrich_candidates(*cat, {"h1", "h2", "h4"}, EnrichConfig::defaults());
  const auto& h1 = e.entries.at("h1");
  ASSERT_GE(h1.pros.size(), 2u);
  EXPECT_EQ(h1.pros[0], "great noise cancelling");  // said twice
  EXPECT_EQ(h1.cons, (std::vector<std::string>{"flimsy hinge"}));
  EXPECT_EQ(h1.product, *cat->find("h1"));
  EXPECT_TRUE(e.entries.at("h2").pros.empty());
  EXPECT_EQ(e.entries.at("h4").cons, (std::vector<std::string>{"sound is poor"}));
}

TEST(WebSearch, ScoreRecombinesAndRespectsThreshold) {
  const auto cat = fixtures::small_catalog();
  LocalCorpusSource src(cat);
  auto cfg = WebSearchConfig::defaults();
  cfg.threshold = 0.0;
  const auto ev = web_search("wireless headphones noise cancelling", src, cat->embedder(), cfg, kAsOf);
  ASSERT_FALSE(ev.docs.empty());
  for (const auto& d : ev.docs) {
    EXPECT_NEAR(d.score, 0.6 * d.rel + 0.25 * d.auth + 0.15 * d.fresh, 1e-9);
    EXPECT_GE(d.rel, 0.0);
    EXPECT_LE(d.rel, 1.0);
  }
  EXPECT_EQ(ev.docs[0].doc_id, "w1");
  EXPECT_DOUBLE_EQ(ev.docs[0].auth, 0.9);  // rtings
  EXPECT_NEAR(ev.docs[0].fresh, std::exp(-31.0 / 30.0), 1e-12);

  cfg.threshold = 0.55;
  for (const auto& d : web_search("headphones", src, cat->embedder(), cfg, kAsOf).docs) {
    EXPECT_GE(d.score, 0.55);
  }
}

TEST(WebSearch, RelevanceOnlyWeights) {
  const auto cat = fixtures::small_catalog();
  LocalCorpusSource src(cat);
  auto cfg = WebSearchConfig::defaults();
  cfg.weights = {1.0, 0.0, 0.0};
  cfg.threshold = 0.0;
  for (const auto& d : web_search("headphones", src, cat->embedder(), cfg, kAsOf).docs) {
    EXPECT_EQ(d.score, d.rel);
  }
  cfg.weights = {0.5, 0.5, 0.5};
  EXPECT_THROW(web_search("headphones", src, cat->embedder(), cfg, kAsOf), ValidationError);
}

TEST(WebSearch, FreshnessOracle) {
  EXPECT_EQ(freshness(kAsOf, kAsOf, 30), 1.0);
  EXPECT_EQ(freshness(kAsOf + std::chrono::hours(48), kAsOf, 30), 1.0);  // future clamps
  EXPECT_NEAR(freshness(kAsOf - std::chrono::hours(240), kAsOf, 30), 0.7165313105737893, 1e-15);
}

TEST(WebSearch, SynonymExpansionKeepsOriginalFirst) {
  auto cfg = WebSearchConfig::defaults();
  cfg.synonyms = {{"cheap", {"budget", "affordable"}}, {"headphones", {"headset"}}};
  const auto v = expand_synonyms("cheap headphones", cfg);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0], "cheap headphones");
  EXPECT_EQ(v[1], "budget headphones");
  EXPECT_EQ(v[2], "affordable headphones");
  cfg.max_variants = 1;
  EXPECT_EQ(expand_synonyms("cheap headphones", cfg).size(), 1u);

  FunctionBackend good("g", [](const std::string&) { return std::string(R"(["budget headphones","cheap headset","x","y"])"); });
  const auto g = expand_generative("cheap headphones", WebSearchConfig::defaults(), good);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[0], "cheap headphones");
  FunctionBackend bad("b", [](const std::string&) { return std::string("{oops"); });
  EXPECT_EQ(expand_generative("cheap headphones", cfg, bad), expand_synonyms("cheap headphones", cfg));
}

TEST(WebSearch, UnreachableRemoteSourceFailsTheNode) {
  const auto cat = fixtures::small_catalog();
  auto web = std::make_shared<HttpWebSource>("127.0.0.1", 1, "/search", 300ms);
  EXPECT_THROW(web->search({"x", 5}), SourceUnavailable);
  Executor ex(cat, web, std::make_shared<ToolRegistry>(ToolRegistry::with_stubs()), {});
  const auto r = ex.run_node(web_node("web_search", {}, {"evidence"}), {}, kAsOf);
  EXPECT_EQ(r.status, TaskStatus::kFailed);
  EXPECT_EQ(r.error_kind, TaskErrorKind::kUnavailable);
}

TEST(Tools, StubsAreTableBacked) {
  const auto reg = ToolRegistry::with_stubs();
  EXPECT_EQ(reg.invoke("logistics_eta", {{"zip", "100000"}})["eta_days"], 2);
  EXPECT_EQ(reg.invoke("logistics_eta", {{"zip", "999999"}})["eta_days"], 5);
  EXPECT_EQ(reg.invoke("weather", {{"location", "Shanghai"}})["condition"], "rain");
  const auto a = reg.invoke("price_history", {{"query", "Tent"}});
  EXPECT_EQ(a, reg.invoke("price_history", {{"query", "tent"}}));
  EXPECT_EQ(reg.names(), (std::vector<std::string>{"logistics_eta", "price_history", "weather"}));
}

TEST(Tools, ErrorKinds) {
  auto reg = ToolRegistry::with_stubs();
  auto kind = [&](const std::string& name, const Json& args) {
    try {
      reg.invoke(name, args);
    } catch (const ToolError& e) {
      return e.kind();
    }
    return TaskErrorKind::kNone;
  };
  EXPECT_EQ(kind("teleport", {}), TaskErrorKind::kUnknownTool);
  EXPECT_EQ(kind("weather", {{"location", 3}}), TaskErrorKind::kInvalidArguments);
  reg.register_tool({"slow", {}, {}, 50ms, [](const Json&) {
                       std::this_thread::sleep_for(300ms);
                       return Json::object();
                     }});
  reg.register_tool({"liar", {}, {{"value", FieldType::kNumber}}, 1000ms,
                     [](const Json&) { return Json{{"value", "seven"}}; }});
  reg.register_tool({"crash", {}, {}, 1000ms, [](const Json&) -> Json { throw std::runtime_error("x"); }});
  EXPECT_EQ(kind("slow", Json::object()), TaskErrorKind::kTimeout);
  EXPECT_EQ(kind("liar", Json::object()), TaskErrorKind::kSchemaInvalid);
  EXPECT_EQ(kind("crash", Json::object()), TaskErrorKind::kHandlerError);
  EXPECT_THROW(reg.register_tool({"weather", {}, {}, 1000ms, [](const Json&) { return Json(); }}),
               ValidationError);
  EXPECT_EQ(check_schema(Json{{"a", 1}}, {{"a", FieldType::kNumber}}), "");
  EXPECT_NE(check_schema(Json{{"a", 1}}, {{"b", FieldType::kAny}}), "");
}

TEST(Executor, RunsPlannedGraphAndRecordsResults) {
  const auto cat = fixtures::small_catalog();
  Executor ex(cat, std::make_shared<LocalCorpusSource>(cat),
              std::make_shared<ToolRegistry>(ToolRegistry::with_stubs()), {});
  memory::SessionContext ctx;
  ctx.session_id = "s";
  ctx.query = "best wireless headphones under $320, price trend";
  ctx.user_profile = {{"zip", "100000"}};
  const auto cfg = planner::PlannerConfig::defaults().with_schema(cat->attribute_schema());
  const auto p = planner::plan(ctx, cfg);
  memory::MemoryStore mem;
  mem.create_session("s");
  const auto run = ex.execute(p.graph, ctx, kAsOf, &mem);
  ASSERT_EQ(run.results.size(), p.graph.nodes.size());
  for (const auto& [id, r] : run.results) EXPECT_TRUE(r.ok()) << id << ": " << r.error.value_or("");
  const auto* cs = run.results.at(planner::kProductNode).candidates();
  ASSERT_NE(cs, nullptr);
  for (const auto& it : cs->items) EXPECT_LE(cat->find(it.product_id)->price, 320.0);
  EXPECT_EQ(mem.records("s", memory::RecordKind::kAgentState).size(), p.graph.nodes.size());
}

TEST(Executor, UnknownToolFailsOnlyThatBranch) {
  const auto cat = fixtures::small_catalog();
  Executor ex(cat, std::make_shared<LocalCorpusSource>(cat),
              std::make_shared<ToolRegistry>(ToolRegistry::with_stubs()), {});
  TaskGraph g;
  TaskNode ps;
  ps.id = "product_search";
  ps.kind = TaskKind::kProductSearch;
  ps.outputs = {"candidates"};
  ps.params = planner::ProductSearchParams{"headphones", {}};
  TaskNode tool;
  tool.id = "tool_x";
  tool.kind = TaskKind::kToolInvocation;
  tool.params = planner::ToolParams{"teleport", Json::object()};
  g.nodes = {ps, tool};
  memory::SessionContext ctx;
  ctx.query = "headphones";
  const auto run = ex.execute(g, ctx, kAsOf);
  EXPECT_TRUE(run.results.at("product_search").ok());
  EXPECT_EQ(run.results.at("tool_x").error_kind, TaskErrorKind::kUnknownTool);
}

TEST(ExecutorTypes, ResultJson) {
  const auto cat = fixtures::small_catalog();
  TaskResult r{"product_search", TaskStatus::kOk, fixtures::candidates(*cat, {"h1", "h2"}), 1.5, {}, {}};
  const auto j = result_to_json(r);
  EXPECT_EQ(j["node_id"], "product_search");
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["duration_ms"], 1.5);
  EXPECT_FALSE(result_to_json(r, false).contains("duration_ms"));
}
