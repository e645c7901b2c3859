#include "cogsearch/executor/scheduler.hpp"

#include <chrono>
#include <condition_variable>
#include <algorithm>
#include <deque>
#include <mutex>
#include <thread>

#include "cogsearch/error.hpp"
#include "cogsearch/util/text.hpp"

namespace cogsearch::executor {

Schedule run_graph(const planner::TaskGraph& g, const NodeRunner& runner, std::size_t parallelism,
                   const ScheduleHooks& hooks) {
  if (auto v = planner::validate_graph(g); !v.empty()) {
    throw ValidationError("invalid task graph: " + text::join(v, "; "));
  }
  const std::size_t n = g.nodes.size();
  Schedule out;
  if (n == 0) return out;

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[g.nodes[i].id] = i;
  std::vector<std::vector<std::size_t>> parents(n), children(n);
  for (const auto& e : g.edges) {
    auto a = index[e.from], b = index[e.to];
    if (std::find(children[a].begin(), children[a].end(), b) == children[a].end()) {
      children[a].push_back(b);
      parents[b].push_back(a);
    }
  }

  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::size_t> ready;
  std::vector<std::size_t> waiting(n);
  std::vector<TaskResult> results(n);
  std::size_t finished = 0;
  std::uint64_t seq = 0;
  std::vector<TaskResult> skipped_to_report;

  for (std::size_t i = 0; i < n; ++i) {
    waiting[i] = parents[i].size();
    if (waiting[i] == 0) ready.push_back(i);
  }

  // Caller holds mu. Resolves children of a finished node; skipped
  // descendants are completed transitively.
  std::function<void(std::size_t)> release = [&](std::size_t i) {
    for (auto c : children[i]) {
      if (--waiting[c] != 0) continue;
      bool parents_ok = true;
      for (auto p : parents[c]) parents_ok = parents_ok && results[p].ok();
      if (parents_ok) {
        ready.push_back(c);
        continue;
      }
      TaskResult r;
      r.node_id = g.nodes[c].id;
      r.status = TaskStatus::kSkipped;
      r.error = "ancestor failed";
      r.error_kind = TaskErrorKind::kAncestorFailed;
      results[c] = r;
      out.trace.push_back({TraceEvent::Type::kFinish, r.node_id, ++seq});
      skipped_to_report.push_back(r);
      ++finished;
      release(c);
    }
  };

  auto worker = [&] {
    std::unique_lock lock(mu);
    while (true) {
      cv.wait(lock, [&] { return !ready.empty() || finished == n; });
      if (finished == n) return;
      const std::size_t i = ready.front();
      ready.pop_front();
      const auto& node = g.nodes[i];
      out.trace.push_back({TraceEvent::Type::kStart, node.id, ++seq});
      Upstream upstream;
      for (auto p : parents[i]) upstream[g.nodes[p].id] = &results[p];
      lock.unlock();

      if (hooks.on_start) hooks.on_start(node);
      const auto t0 = std::chrono::steady_clock::now();
      TaskResult r;
      try {
        r = runner(node, upstream);
      } catch (const std::exception& e) {
        r = TaskResult{};
        r.status = TaskStatus::kFailed;
        r.error = e.what();
        r.error_kind = TaskErrorKind::kHandlerError;
      }
      r.node_id = node.id;
      r.duration_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      if (hooks.on_finish) hooks.on_finish(r);

      lock.lock();
      results[i] = std::move(r);
      out.trace.push_back({TraceEvent::Type::kFinish, node.id, ++seq});
      ++finished;
      release(i);
      auto skipped = std::move(skipped_to_report);
      skipped_to_report.clear();
      if (!skipped.empty() && hooks.on_finish) {
        lock.unlock();
        for (const auto& s : skipped) hooks.on_finish(s);
        lock.lock();
      }
      cv.notify_all();
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(parallelism, n));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < n; ++i) out.results.emplace(g.nodes[i].id, std::move(results[i]));
  return out;
}

}  // namespace cogsearch::executor
