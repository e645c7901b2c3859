#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cogsearch/executor/types.hpp"
#include "cogsearch/planner/task_graph.hpp"

namespace cogsearch::executor {

struct TraceEvent {
  enum class Type { kStart, kFinish };
  Type type;
  std::string node_id;
  std::uint64_t seq;
};

// Upstream results keyed by producer node id.
using Upstream = std::map<std::string, const TaskResult*>;
using NodeRunner = std::function<TaskResult(const planner::TaskNode&, const Upstream&)>;

struct ScheduleHooks {
  std::function<void(const planner::TaskNode&)> on_start;
  // Also called for skipped nodes, which never start.
  std::function<void(const TaskResult&)> on_finish;
};

struct Schedule {
  std::map<std::string, TaskResult> results;
  std::vector<TraceEvent> trace;
};

// Runs every node once all of its parents finished ok, with at most
// `parallelism` nodes in flight. A node whose parent failed or was skipped is
// marked skipped without running. Runner exceptions become failed results.
// Throws ValidationError if the graph does not pass validate_graph.
Schedule run_graph(const planner::TaskGraph& g, const NodeRunner& runner, std::size_t parallelism,
                   const ScheduleHooks& hooks = {});

}  // namespace cogsearch::executor
