#include <gtest/gtest.h>

#include <filesystem>
#include <thread>

#include "cogsearch/error.hpp"
#include "cogsearch/memory/memory_store.hpp"
#include "cogsearch/memory/session_context.hpp"

using namespace cogsearch;
using namespace cogsearch::memory;
using namespace std::chrono_literals;

namespace {

struct FakeClock {
  Timestamp now = parse_rfc3339("2026-01-01T00:00:00Z");
  Clock fn() {
    return [this] { return now; };
  }
};

}  // namespace

TEST(Memory, VersionsIncrementPerSessionAndKind) {
  MemoryStore m;
  m.create_session("s");
  EXPECT_EQ(m.append("s", RecordKind::kTurn, {{"q", 1}}), 1u);
  EXPECT_EQ(m.append("s", RecordKind::kTurn, {{"q", 2}}), 2u);
  EXPECT_EQ(m.append("s", RecordKind::kAgentState, {{"a", 1}}), 1u);
  EXPECT_EQ(m.latest("s", RecordKind::kTurn)->payload["q"], 2);
  EXPECT_FALSE(m.latest("s", RecordKind::kTaskGraph));
  const auto recs = m.records("s", RecordKind::kTurn);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].payload["q"], 1);  // prior versions untouched
}

TEST(Memory, UnknownSessionRules) {
  MemoryStore m;
  EXPECT_THROW(m.append("x", RecordKind::kAgentState, {}), NotFoundError);
  EXPECT_EQ(m.append("x", RecordKind::kTurn, {}), 1u);  // turns create the session
  EXPECT_TRUE(m.has_session("x"));
  EXPECT_FALSE(m.latest("nobody", RecordKind::kTurn));
}

TEST(Memory, EvictionRemovesWholeIdleSessions) {
  FakeClock c;
  MemoryStore m(c.fn(), std::chrono::hours(1));
  m.append("old", RecordKind::kTurn, {});
  c.now += 50min;
  m.append("new", RecordKind::kTurn, {});
  c.now += 20min;
  EXPECT_EQ(m.evict(), 1u);
  EXPECT_FALSE(m.has_session("old"));
  EXPECT_TRUE(m.has_session("new"));
  EXPECT_EQ(m.records("new", RecordKind::kTurn).size(), 1u);
}

TEST(Memory, SnapshotRestoreIsExact) {
  FakeClock c;
  MemoryStore m(c.fn());
  m.append("a", RecordKind::kTurn, {{"query", "héadphones"}});
  c.now += 1500ms;
  m.append("a", RecordKind::kTaskGraph, {{"nodes", Json::array()}});
  m.append("b", RecordKind::kTurn, {{"n", 1.5}});
  const auto path = std::filesystem::temp_directory_path() / "cogsearch_mem_snap.json";
  m.snapshot(path);
  MemoryStore r;
  r.restore(path);
  EXPECT_EQ(r.serialize(), m.serialize());
  EXPECT_EQ(r.records("a", RecordKind::kTaskGraph), m.records("a", RecordKind::kTaskGraph));
  EXPECT_EQ(r.last_active("a"), m.last_active("a"));
  std::filesystem::remove(path);
}

TEST(Memory, BadSnapshotLeavesStoreUntouched) {
  MemoryStore m;
  m.append("keep", RecordKind::kTurn, {});
  const auto before = m.serialize();
  EXPECT_ANY_THROW(m.restore_from_string("{\"format_version\": 99}"));
  EXPECT_ANY_THROW(m.restore_from_string("garbage"));
  EXPECT_EQ(m.serialize(), before);
}

TEST(Memory, ConcurrentAppendsStayGapless) {
  MemoryStore m;
  constexpr int kThreads = 8, kPer = 200;
  std::vector<std::thread> ts;
  for (int t = 0; t < kThreads; ++t) {
    ts.emplace_back([&, t] {
      for (int i = 0; i < kPer; ++i) {
        m.append("shared", RecordKind::kTurn, {{"t", t}});
        m.append("own-" + std::to_string(t), RecordKind::kTurn, {{"i", i}});
      }
    });
  }
  for (auto& t : ts) t.join();
  const auto shared = m.records("shared", RecordKind::kTurn);
  ASSERT_EQ(shared.size(), std::size_t(kThreads * kPer));
  for (std::size_t i = 0; i < shared.size(); ++i) EXPECT_EQ(shared[i].version, i + 1);
  for (int t = 0; t < kThreads; ++t) {
    const auto own = m.records("own-" + std::to_string(t), RecordKind::kTurn);
    ASSERT_EQ(own.size(), std::size_t(kPer));
    for (int i = 0; i < kPer; ++i) EXPECT_EQ(own[i].payload["i"], i);  // per-writer order kept
  }
}

TEST(SessionContext, JsonRoundTrip) {
  SessionContext c;
  c.session_id = "s";
  c.query = "q";
  c.search_history = {"a", "b"};
  c.click_history = {{"p1", InteractionKind::kAddToCart, parse_rfc3339("2026-01-01T00:00:00Z")}};
  c.user_profile = {{"zip", "100000"}};
  c.turn_index = 2;
  EXPECT_EQ(Json(c).get<SessionContext>(), c);
  EXPECT_EQ(Json(c)["q_t"], "q");
}
