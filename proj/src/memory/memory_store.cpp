#include "cogsearch/memory/memory_store.hpp"

#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "cogsearch/error.hpp"

namespace cogsearch::memory {

namespace {

constexpr std::array<std::string_view, 3> kKindNames = {"turn", "agent_state", "task_graph"};

}  // namespace

std::string_view to_string(RecordKind kind) { return kKindNames[static_cast<int>(kind)]; }

RecordKind record_kind_from_string(std::string_view s) {
  for (int i = 0; i < 3; ++i) {
    if (kKindNames[i] == s) return static_cast<RecordKind>(i);
  }
  throw std::invalid_argument("unknown record kind '" + std::string(s) + "'");
}

MemoryStore::MemoryStore(Clock clock, std::chrono::milliseconds ttl)
    : clock_(std::move(clock)), ttl_(ttl) {}

std::shared_ptr<MemoryStore::Session> MemoryStore::find(const std::string& id) const {
  std::shared_lock lock(map_mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::shared_ptr<MemoryStore::Session> MemoryStore::find_or_create(const std::string& id) {
  if (auto s = find(id)) return s;
  std::unique_lock lock(map_mu_);
  auto& slot = sessions_[id];
  if (!slot) {
    slot = std::make_shared<Session>();
    slot->created_at = clock_();
    slot->last_active = slot->created_at;
  }
  return slot;
}

void MemoryStore::create_session(const std::string& session_id) {
  if (session_id.empty()) throw ValidationError("empty session id");
  find_or_create(session_id);
}

bool MemoryStore::has_session(const std::string& session_id) const {
  return find(session_id) != nullptr;
}

std::vector<std::string> MemoryStore::sessions() const {
  std::shared_lock lock(map_mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

std::uint64_t MemoryStore::append(const std::string& session_id, RecordKind kind, Json payload) {
  auto s = kind == RecordKind::kTurn ? find_or_create(session_id) : find(session_id);
  if (!s) throw NotFoundError("unknown session");
  std::unique_lock lock(s->mu);
  auto& list = s->records[static_cast<int>(kind)];
  MemoryRecord rec;
  rec.session_id = session_id;
  rec.kind = kind;
  rec.payload = std::move(payload);
  rec.version = list.size() + 1;
  rec.created_at = clock_();
  s->last_active = std::max(s->last_active, rec.created_at);
  list.push_back(std::move(rec));
  return list.back().version;
}

std::optional<MemoryRecord> MemoryStore::latest(const std::string& session_id,
                                                RecordKind kind) const {
  auto s = find(session_id);
  if (!s) return std::nullopt;
  std::shared_lock lock(s->mu);
  const auto& list = s->records[static_cast<int>(kind)];
  if (list.empty()) return std::nullopt;
  return list.back();
}

std::vector<MemoryRecord> MemoryStore::records(const std::string& session_id,
                                               RecordKind kind) const {
  auto s = find(session_id);
  if (!s) return {};
  std::shared_lock lock(s->mu);
  return s->records[static_cast<int>(kind)];
}

std::optional<Timestamp> MemoryStore::last_active(const std::string& session_id) const {
  auto s = find(session_id);
  if (!s) return std::nullopt;
  std::shared_lock lock(s->mu);
  return s->last_active;
}

void MemoryStore::touch(const std::string& session_id) {
  auto s = find(session_id);
  if (!s) throw NotFoundError("unknown session");
  std::unique_lock lock(s->mu);
  s->last_active = std::max(s->last_active, clock_());
}

std::size_t MemoryStore::evict() { return evict(clock_()); }

std::size_t MemoryStore::evict(Timestamp now) {
  std::unique_lock lock(map_mu_);
  std::size_t n = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    Timestamp last;
    {
      std::shared_lock slock(it->second->mu);
      last = it->second->last_active;
    }
    if (now - last > ttl_) {
      it = sessions_.erase(it);
      ++n;
    } else {
      ++it;
    }
  }
  return n;
}

std::string MemoryStore::serialize() const {
  Json sessions = Json::array();
  std::shared_lock lock(map_mu_);
  for (const auto& [id, s] : sessions_) {
    std::shared_lock slock(s->mu);
    Json records = Json::array();
    for (const auto& list : s->records) {
      for (const auto& r : list) {
        records.push_back({{"kind", to_string(r.kind)},
                           {"version", r.version},
                           {"created_at", format_rfc3339(r.created_at)},
                           {"payload", r.payload}});
      }
    }
    sessions.push_back({{"session_id", id},
                        {"created_at", format_rfc3339(s->created_at)},
                        {"last_active", format_rfc3339(s->last_active)},
                        {"records", std::move(records)}});
  }
  Json doc{{"format_version", kSnapshotFormatVersion}, {"sessions", std::move(sessions)}};
  return doc.dump();
}

void MemoryStore::snapshot(const std::filesystem::path& path) const {
  const std::string data = serialize();
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << data;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void MemoryStore::restore_from_string(const std::string& data) {
  std::map<std::string, std::shared_ptr<Session>> fresh;
  try {
    auto doc = Json::parse(data);
    const int fv = doc.at("format_version").get<int>();
    if (fv != kSnapshotFormatVersion) {
      throw std::runtime_error("unsupported snapshot format_version " + std::to_string(fv));
    }
    for (const auto& js : doc.at("sessions")) {
      auto id = js.at("session_id").get<std::string>();
      if (id.empty() || fresh.count(id)) throw std::runtime_error("bad or duplicate session id");
      auto s = std::make_shared<Session>();
      s->created_at = parse_rfc3339(js.at("created_at").get<std::string>());
      s->last_active = parse_rfc3339(js.at("last_active").get<std::string>());
      for (const auto& jr : js.at("records")) {
        MemoryRecord r;
        r.session_id = id;
        r.kind = record_kind_from_string(jr.at("kind").get<std::string>());
        r.version = jr.at("version").get<std::uint64_t>();
        r.created_at = parse_rfc3339(jr.at("created_at").get<std::string>());
        r.payload = jr.at("payload");
        auto& list = s->records[static_cast<int>(r.kind)];
        if (r.version != list.size() + 1) {
          throw std::runtime_error("version gap in session " + id);
        }
        list.push_back(std::move(r));
      }
      fresh.emplace(std::move(id), std::move(s));
    }
  } catch (const std::runtime_error&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("corrupt snapshot: ") + e.what());
  }
  std::unique_lock lock(map_mu_);
  sessions_.swap(fresh);
}

void MemoryStore::restore(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  restore_from_string(ss.str());
}

}  // namespace cogsearch::memory
