#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "cogsearch/util/time.hpp"
#include "json.hpp"

namespace cogsearch::memory {

using Json = nlohmann::json;

enum class RecordKind { kTurn = 0, kAgentState = 1, kTaskGraph = 2 };

std::string_view to_string(RecordKind kind);
RecordKind record_kind_from_string(std::string_view s);

struct MemoryRecord {
  std::string session_id;
  RecordKind kind = RecordKind::kTurn;
  Json payload;
  std::uint64_t version = 0;
  Timestamp created_at{};

  friend bool operator==(const MemoryRecord&, const MemoryRecord&) = default;
};

inline constexpr int kSnapshotFormatVersion = 1;

// Versioned, append-only per-session record store.
//
// Sessions never block each other. Appends within one session are
// serialized; readers see a consistent prefix. Payloads are opaque.
class MemoryStore {
 public:
  explicit MemoryStore(Clock clock = system_now,
                       std::chrono::milliseconds ttl = std::chrono::hours(24));

  MemoryStore(const MemoryStore&) = delete;
  MemoryStore& operator=(const MemoryStore&) = delete;

  // No-op if the session already exists.
  void create_session(const std::string& session_id);
  bool has_session(const std::string& session_id) const;
  std::vector<std::string> sessions() const;

  // Returns the new version. Appending a turn to an unknown session creates
  // it; any other kind throws NotFoundError("unknown session").
  std::uint64_t append(const std::string& session_id, RecordKind kind, Json payload);

  std::optional<MemoryRecord> latest(const std::string& session_id, RecordKind kind) const;
  // All versions, ascending.
  std::vector<MemoryRecord> records(const std::string& session_id, RecordKind kind) const;

  std::optional<Timestamp> last_active(const std::string& session_id) const;
  void touch(const std::string& session_id);

  // Removes whole sessions whose last activity is older than the TTL.
  std::size_t evict();
  std::size_t evict(Timestamp now);
  std::chrono::milliseconds ttl() const { return ttl_; }

  std::string serialize() const;
  // Writes to a temp file and renames it over path.
  void snapshot(const std::filesystem::path& path) const;

  // Either replaces the whole store or throws and leaves it untouched.
  void restore_from_string(const std::string& data);
  void restore(const std::filesystem::path& path);

 private:
  struct Session {
    mutable std::shared_mutex mu;
    Timestamp created_at{};
    Timestamp last_active{};
    std::array<std::vector<MemoryRecord>, 3> records;
  };

  std::shared_ptr<Session> find(const std::string& session_id) const;
  std::shared_ptr<Session> find_or_create(const std::string& session_id);

  Clock clock_;
  std::chrono::milliseconds ttl_;
  mutable std::shared_mutex map_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace cogsearch::memory
