#include <gtest/gtest.h>

#include <future>
#include <sstream>

#include "cogsearch/service/service.hpp"
#include "fixtures.hpp"
#include "httplib.h"

using namespace cogsearch;
using engine::Json;

namespace {

const Timestamp kAsOf = parse_rfc3339("2026-06-01T00:00:00Z");

// Holds every web search until released.
class GatedSource final : public executor::WebSource {
 public:
  GatedSource(std::shared_ptr<const catalog::Catalog> cat, std::shared_future<void> gate)
      : inner_(std::move(cat)), gate_(std::move(gate)) {}
  std::string name() const override { return "gated"; }
  std::vector<catalog::WebDocument> search(const executor::WebQuery& q) const override {
    gate_.wait();
    return inner_.search(q);
  }

 private:
  executor::LocalCorpusSource inner_;
  std::shared_future<void> gate_;
};

struct Server {
  std::shared_ptr<engine::Engine> eng;
  std::unique_ptr<service::Service> svc;
  int port = 0;

  Server() {
    auto cfg = engine::EngineConfig::defaults();
    cfg.as_of = kAsOf;
    eng = std::make_shared<engine::Engine>(fixtures::small_catalog(), cfg, nullptr,
                                           [] { return kAsOf; });
    svc = std::make_unique<service::Service>(eng, [] { return kAsOf; });
    port = svc->start_background();
  }
  ~Server() { svc->stop(); }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(std::chrono::seconds(20));
    return c;
  }
  std::string session() const {
    auto res = client().Post("/sessions");
    return Json::parse(res->body).at("session_id");
  }
};

std::vector<Json> lines(const std::string& body) {
  std::vector<Json> out;
  std::istringstream in(body);
  for (std::string l; std::getline(in, l);) {
    if (!l.empty()) out.push_back(Json::parse(l));
  }
  return out;
}

void expect_stream_contract(const std::vector<Json>& ev) {
  ASSERT_FALSE(ev.empty());
  EXPECT_EQ(ev.back()["type"], "done");
  for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_EQ(ev[i]["seq"], i + 1);
}

}  // namespace

TEST(Service, HealthAndCors) {
  Server s;
  auto res = s.client().Get("/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(Json::parse(res->body)["status"], "ok");
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  auto pre = s.client().Options("/sessions/x/turns");
  EXPECT_EQ(pre->status, 204);
}

TEST(Service, TurnStreamsNdjson) {
  Server s;
  const auto sid = s.session();
  auto res = s.client().Post("/sessions/" + sid + "/turns", Json{{"query", "wireless headphones"}}.dump(),
                             "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Content-Type"), "application/x-ndjson");
  const auto ev = lines(res->body);
  expect_stream_contract(ev);
  EXPECT_EQ(ev.front()["type"], "plan");
  EXPECT_EQ(ev.back()["payload"]["status"], "ok");

  auto st = s.client().Get("/sessions/" + sid + "/state");
  EXPECT_EQ(Json::parse(st->body)["state"]["query"], "wireless headphones");
}

TEST(Service, ErrorsBeforeStreaming) {
  Server s;
  auto c = s.client();
  EXPECT_EQ(c.Post("/sessions/nope/turns", R"({"query":"x"})", "application/json")->status, 404);
  EXPECT_EQ(c.Get("/sessions/nope/state")->status, 404);
  const auto sid = s.session();
  EXPECT_EQ(c.Post("/sessions/" + sid + "/turns", "{not json", "application/json")->status, 400);
  EXPECT_EQ(c.Post("/sessions/" + sid + "/turns", R"({"q":"x"})", "application/json")->status, 400);
  EXPECT_EQ(Json::parse(c.Get("/sessions/" + sid + "/state")->body)["state"], nullptr);
  // An empty query is still a stream.
  auto res = c.Post("/sessions/" + sid + "/turns", R"({"query":""})", "application/json");
  const auto ev = lines(res->body);
  expect_stream_contract(ev);
  EXPECT_EQ(ev.front()["type"], "error");
}

TEST(Service, SecondTurnOnBusySessionIs409) {
  Server s;
  std::promise<void> open;
  s.eng->set_web_source(std::make_shared<GatedSource>(fixtures::small_catalog(), open.get_future().share()));
  const auto sid = s.session();
  auto first = std::async(std::launch::async, [&] {
    return s.client().Post("/sessions/" + sid + "/turns", R"({"query":"best headphones for travel"})",
                           "application/json");
  });
  int status = 0;
  for (int i = 0; i < 200 && status != 409; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
    status = s.client().Post("/sessions/" + sid + "/turns", R"({"query":"earbuds"})", "application/json")->status;
  }
  EXPECT_EQ(status, 409);
  open.set_value();
  auto res = first.get();
  expect_stream_contract(lines(res->body));
}

TEST(Service, DisconnectLeavesSameStateAsCompletedStream) {
  Server s;
  const std::string body = Json{{"query", "wireless headphones under $300"}}.dump();
  const auto done = s.session();
  s.client().Post("/sessions/" + done + "/turns", body, "application/json");

  const auto cut = s.session();
  std::size_t received = 0;
  httplib::Request req;
  req.method = "POST";
  req.path = "/sessions/" + cut + "/turns";
  req.body = body;
  req.set_header("Content-Type", "application/json");
  req.content_receiver = [&](const char*, std::size_t n, std::uint64_t, std::uint64_t) {
    received += n;
    return false;  // hang up after the first chunk
  };
  auto c = s.client();
  c.send(req);
  EXPECT_GT(received, 0u);
  s.svc->drain();

  const auto a = Json::parse(s.client().Get("/sessions/" + done + "/state")->body)["state"];
  const auto b = Json::parse(s.client().Get("/sessions/" + cut + "/state")->body)["state"];
  ASSERT_FALSE(b.is_null());
  EXPECT_EQ(a, b);
}

TEST(Service, FacetsSuggestionsInteractions) {
  Server s;
  const auto sid = s.session();
  auto c = s.client();
  auto turn = lines(c.Post("/sessions/" + sid + "/turns", R"({"query":"wireless headphones under $300"})",
                           "application/json")->body);
  Json facets, suggestions;
  for (const auto& e : turn) {
    if (e["type"] == "facets") facets = e["payload"]["facets"];
    if (e["type"] == "suggestions") suggestions = e["payload"]["suggestions"];
  }
  ASSERT_FALSE(facets.empty());
  ASSERT_FALSE(suggestions.empty());

  const Json click{{"attribute", facets[0]["attribute"]}, {"bucket", facets[0]["buckets"][0]["label"]}};
  auto fe = lines(c.Post("/sessions/" + sid + "/facets", click.dump(), "application/json")->body);
  expect_stream_contract(fe);
  EXPECT_EQ(fe.front()["type"], "facets");
  EXPECT_EQ(fe.back()["payload"]["status"], "ok");

  auto stale = lines(c.Post("/sessions/" + sid + "/facets", R"({"attribute":"color","bucket":"plaid"})",
                            "application/json")->body);
  EXPECT_EQ(stale.front()["payload"]["kind"], "stale") << stale.front().dump();

  const Json accept{{"text", suggestions[0]["text"]}};
  auto ae = lines(c.Post("/sessions/" + sid + "/suggestions/accept", accept.dump(), "application/json")->body);
  expect_stream_contract(ae);
  EXPECT_EQ(ae.front()["type"], "plan");
  EXPECT_EQ(ae.front()["turn"], 2);

  EXPECT_EQ(c.Post("/sessions/" + sid + "/interactions", R"({"item_id":"h3","kind":"add_to_cart"})",
                   "application/json")->status, 204);
  EXPECT_EQ(c.Post("/sessions/" + sid + "/interactions", R"({"item_id":"h3","kind":"hug"})",
                   "application/json")->status, 400);
  const auto ctx = s.eng->context(sid, "x", Json::object());
  EXPECT_EQ(ctx.click_history.back().item_id, "h3");
}
