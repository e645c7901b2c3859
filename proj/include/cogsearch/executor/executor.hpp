#pragma once

#include <map>
#include <memory>
#include <string>

#include "cogsearch/catalog/catalog.hpp"
#include "cogsearch/executor/product_search.hpp"
#include "cogsearch/executor/scheduler.hpp"
#include "cogsearch/executor/tools.hpp"
#include "cogsearch/executor/web_search.hpp"
#include "cogsearch/memory/memory_store.hpp"
#include "cogsearch/memory/session_context.hpp"

namespace cogsearch::executor {

struct ExecutorConfig {
  ProductSearchOptions product;
  WebSearchConfig web = WebSearchConfig::defaults();
  std::size_t parallelism = 4;
};

void to_json(Json& j, const ExecutorConfig& c);
void from_json(const Json& j, ExecutorConfig& c);

struct Execution {
  std::map<std::string, TaskResult> results;
  std::vector<TraceEvent> trace;
};

// Runs task graphs against one catalog, web source and tool registry.
// Reentrant: concurrent execute() calls share only immutable state.
class Executor {
 public:
  Executor(std::shared_ptr<const catalog::Catalog> cat, std::shared_ptr<const WebSource> web,
           std::shared_ptr<const ToolRegistry> tools, ExecutorConfig config);

  // Optional generative query expansion; must be thread-safe if set.
  void set_expander(std::shared_ptr<GenerativeBackend> expander) { expander_ = std::move(expander); }

  // When memory is given, every result is appended for ctx.session_id as an
  // agent_state record {"agent": "executor", "result": ...}, in node order.
  // Throws ValidationError if the graph is invalid.
  Execution execute(const planner::TaskGraph& g, const memory::SessionContext& ctx, Timestamp as_of,
                    memory::MemoryStore* memory = nullptr, const ScheduleHooks& hooks = {}) const;

  // Single-node handler used by execute().
  TaskResult run_node(const planner::TaskNode& node, const Upstream& upstream,
                      Timestamp as_of) const;

  const ExecutorConfig& config() const { return config_; }
  const catalog::Catalog& catalog() const { return *cat_; }

 private:
  std::shared_ptr<const catalog::Catalog> cat_;
  std::shared_ptr<const WebSource> web_;
  std::shared_ptr<const ToolRegistry> tools_;
  std::shared_ptr<GenerativeBackend> expander_;
  ExecutorConfig config_;
};

}  // namespace cogsearch::executor
