#pragma once

#include <memory>
#include <string>

#include "cogsearch/engine/engine.hpp"

namespace cogsearch::service {

// HTTP front end over one Engine. Streams are application/x-ndjson, one
// TurnEvent per line. Each streamed call runs on its own thread and feeds a
// queue, so a client that disconnects mid-stream does not cut the turn short.
//
//   GET  /health
//   POST /sessions                         -> {"session_id"}
//   POST /sessions/{id}/turns              {query, profile?}      stream
//   POST /sessions/{id}/facets             {attribute, bucket}    stream
//   POST /sessions/{id}/suggestions/accept {text}                 stream
//   POST /sessions/{id}/interactions       {item_id, kind, at?}   204
//   GET  /sessions/{id}/state              -> {"session_id", "state"}
//
// Unknown sessions are 404 before any event; a second streamed call while
// one is running on the same session is 409 "turn in progress".
class Service {
 public:
  explicit Service(std::shared_ptr<engine::Engine> engine, Clock clock = system_now);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and serves until stop(); returns false if the bind failed.
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and serves on a background thread.
  int start_background(const std::string& host = "127.0.0.1");
  // Stops accepting requests and waits for in-flight turns to land.
  void stop();
  // Blocks until no streamed call is running.
  void drain();

  engine::Engine& engine() { return *engine_; }

 private:
  struct Impl;
  std::shared_ptr<engine::Engine> engine_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cogsearch::service
