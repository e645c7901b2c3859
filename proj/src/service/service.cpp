#include "cogsearch/service/service.hpp"

#include <condition_variable>
#include <deque>
#include <set>
#include <thread>

#include "httplib.h"

namespace cogsearch::service {

namespace {

using Json = nlohmann::json;

constexpr const char* kNdjson = "application/x-ndjson";

// Event queue between an engine thread and an HTTP writer. Shared so that
// whichever side finishes last frees it.
class Channel {
 public:
  void push(const engine::TurnEvent& e) {
    std::lock_guard lock(mu_);
    last_seq_ = e.seq;
    last_turn_ = e.turn;
    lines_.push_back(Json(e).dump() + "\n");
    cv_.notify_all();
  }

  // Synthesized tail for a call that threw before emitting done.
  void fail(const std::string& message, const std::string& kind) {
    std::lock_guard lock(mu_);
    engine::TurnEvent err{"error", last_turn_, ++last_seq_, {{"message", message}, {"kind", kind}}};
    engine::TurnEvent done{"done", last_turn_, ++last_seq_, {{"status", "error"}}};
    lines_.push_back(Json(err).dump() + "\n");
    lines_.push_back(Json(done).dump() + "\n");
    cv_.notify_all();
  }

  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    cv_.notify_all();
  }

  // Next line, or nullopt once closed and drained.
  std::optional<std::string> pop() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return closed_ || !lines_.empty(); });
    if (lines_.empty()) return std::nullopt;
    auto line = std::move(lines_.front());
    lines_.pop_front();
    return line;
  }

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::string> lines_;
  std::uint64_t last_seq_ = 0;
  std::size_t last_turn_ = 0;
  bool closed_ = false;
};

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, Json{{"error", message}});
}

}  // namespace

struct Service::Impl {
  httplib::Server server;
  Clock clock;
  std::thread background;

  std::mutex mu;
  std::condition_variable idle;
  std::set<std::string> busy;
  std::size_t running = 0;

  // Reserves the session for one streamed call; false if already taken.
  bool reserve(const std::string& id) {
    std::lock_guard lock(mu);
    if (!busy.insert(id).second) return false;
    ++running;
    return true;
  }

  void release(const std::string& id) {
    std::lock_guard lock(mu);
    busy.erase(id);
    --running;
    idle.notify_all();
  }

  void drain() {
    std::unique_lock lock(mu);
    idle.wait(lock, [&] { return running == 0; });
  }

  void stream(httplib::Response& res, const std::string& session_id,
              std::function<void(const engine::EventSink&)> call);
};

// Runs call on a worker thread and streams its events. The worker owns the
// session reservation and releases it only after the call returns.
void Service::Impl::stream(httplib::Response& res, const std::string& session_id,
                           std::function<void(const engine::EventSink&)> call) {
  auto& impl = *this;
  auto ch = std::make_shared<Channel>();
  std::thread([&impl, ch, session_id, call = std::move(call)] {
    // done is held back until the session is released, so a client that
    // reacts to it with the next call is never told the turn is running.
    std::optional<engine::TurnEvent> done;
    std::optional<std::pair<std::string, std::string>> failure;
    try {
      call([&](const engine::TurnEvent& e) {
        if (e.type == "done") {
          done = e;
        } else {
          ch->push(e);
        }
      });
    } catch (const engine::TurnInProgress& e) {
      failure.emplace(e.what(), "busy");
    } catch (const NotFoundError& e) {
      failure.emplace(e.what(), "not_found");
    } catch (const std::exception& e) {
      failure.emplace(e.what(), "internal");
    }
    impl.release(session_id);
    if (done) {
      ch->push(*done);
    } else if (failure) {
      ch->fail(failure->first, failure->second);
    } else {
      ch->fail("call ended without done", "internal");
    }
    ch->close();
  }).detach();

  res.status = 200;
  res.set_chunked_content_provider(kNdjson, [ch](std::size_t, httplib::DataSink& sink) {
    auto line = ch->pop();
    if (!line) {
      sink.done();
      return true;
    }
    // A failed write ends the response; the worker keeps going.
    return sink.write(line->data(), line->size());
  });
}

namespace {

std::optional<Json> parse_body(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) return Json::object();
  try {
    auto j = Json::parse(req.body);
    if (!j.is_object()) {
      send_error(res, 400, "body must be a JSON object");
      return std::nullopt;
    }
    return j;
  } catch (const Json::exception& e) {
    send_error(res, 400, std::string("invalid JSON: ") + e.what());
    return std::nullopt;
  }
}

std::optional<std::string> string_field(const Json& body, const char* key, httplib::Response& res) {
  if (!body.contains(key) || !body[key].is_string()) {
    send_error(res, 400, std::string("missing string field '") + key + "'");
    return std::nullopt;
  }
  return body[key].get<std::string>();
}

}  // namespace

Service::Service(std::shared_ptr<engine::Engine> engine, Clock clock)
    : engine_(std::move(engine)), impl_(std::make_unique<Impl>()) {
  impl_->clock = std::move(clock);
  auto& srv = impl_->server;
  auto& impl = *impl_;
  auto& eng = *engine_;

  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  srv.Get("/health", [&eng](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, Json{{"status", "ok"}, {"products", eng.catalog().products().size()}});
  });

  srv.Post("/sessions", [&eng](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, Json{{"session_id", eng.create_session()}});
  });

  // Shared prologue of the streamed endpoints: session lookup, body parse,
  // reservation. Returns the body when the call may proceed.
  auto begin = [&eng](const httplib::Request& req, httplib::Response& res,
                             const std::string& id) -> std::optional<Json> {
    if (!eng.memory().has_session(id)) {
      send_error(res, 404, "unknown session");
      return std::nullopt;
    }
    auto body = parse_body(req, res);
    if (!body) return std::nullopt;
    return body;
  };
  auto reserve = [&impl](httplib::Response& res, const std::string& id) {
    if (impl.reserve(id)) return true;
    send_error(res, 409, "turn in progress");
    return false;
  };

  srv.Post(R"(/sessions/([^/]+)/turns)", [&, begin, reserve](const httplib::Request& req,
                                                            httplib::Response& res) {
    const std::string id = req.matches[1];
    auto body = begin(req, res, id);
    if (!body) return;
    auto query = string_field(*body, "query", res);
    if (!query) return;
    const Json profile = body->value("profile", Json::object());
    if (!profile.is_object()) return send_error(res, 400, "field 'profile' must be an object");
    if (!reserve(res, id)) return;
    impl.stream(res, id, [&eng, id, q = *query, profile](const engine::EventSink& sink) {
      eng.run_turn(id, q, profile, sink);
    });
  });

  srv.Post(R"(/sessions/([^/]+)/facets)", [&, begin, reserve](const httplib::Request& req,
                                                             httplib::Response& res) {
    const std::string id = req.matches[1];
    auto body = begin(req, res, id);
    if (!body) return;
    auto attribute = string_field(*body, "attribute", res);
    if (!attribute) return;
    auto bucket = string_field(*body, "bucket", res);
    if (!bucket) return;
    if (!reserve(res, id)) return;
    guider::FacetSelection sel{*attribute, *bucket};
    impl.stream(res, id, [&eng, id, sel](const engine::EventSink& sink) {
      eng.click_facet(id, sel, sink);
    });
  });

  srv.Post(R"(/sessions/([^/]+)/suggestions/accept)",
           [&, begin, reserve](const httplib::Request& req, httplib::Response& res) {
             const std::string id = req.matches[1];
             auto body = begin(req, res, id);
             if (!body) return;
             auto text = string_field(*body, "text", res);
             if (!text) return;
             if (!reserve(res, id)) return;
             impl.stream(res, id, [&eng, id, t = *text](const engine::EventSink& sink) {
               eng.accept_suggestion(id, t, sink);
             });
           });

  srv.Post(R"(/sessions/([^/]+)/interactions)", [&, begin](const httplib::Request& req,
                                                          httplib::Response& res) {
    const std::string id = req.matches[1];
    auto body = begin(req, res, id);
    if (!body) return;
    if (!body->contains("at")) (*body)["at"] = format_rfc3339(impl.clock());
    try {
      eng.record_interaction(id, body->get<memory::Interaction>());
    } catch (const Json::exception& e) {
      return send_error(res, 400, std::string("invalid interaction: ") + e.what());
    } catch (const NotFoundError& e) {
      return send_error(res, 404, e.what());
    } catch (const std::exception& e) {
      return send_error(res, 400, e.what());
    }
    res.status = 204;
  });

  srv.Get(R"(/sessions/([^/]+)/state)", [&eng](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!eng.memory().has_session(id)) return send_error(res, 404, "unknown session");
    const auto st = eng.state(id);
    send_json(res, 200, Json{{"session_id", id}, {"state", st ? Json(*st) : Json(nullptr)}});
  });
}

Service::~Service() { stop(); }

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int Service::start_background(const std::string& host) {
  const int port = impl_->server.bind_to_any_port(host);
  if (port <= 0) throw std::runtime_error("cannot bind " + host);
  impl_->background = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->background.joinable()) impl_->background.join();
  impl_->drain();
}

void Service::drain() { impl_->drain(); }

}  // namespace cogsearch::service
