#include "cogsearch/executor/executor.hpp"

#include "cogsearch/planner/planner.hpp"

namespace cogsearch::executor {

void to_json(Json& j, const ExecutorConfig& c) {
  j = Json{{"candidate_k", c.product.k},
           {"rrf_k", c.product.rrf_k},
           {"enrich", c.product.enrich},
           {"web", c.web},
           {"parallelism", c.parallelism}};
}

void from_json(const Json& j, ExecutorConfig& c) {
  c.product.k = j.at("candidate_k").get<std::size_t>();
  c.product.rrf_k = j.at("rrf_k").get<double>();
  c.product.enrich = j.at("enrich").get<EnrichConfig>();
  c.web = j.at("web").get<WebSearchConfig>();
  c.parallelism = j.at("parallelism").get<std::size_t>();
}

Executor::Executor(std::shared_ptr<const catalog::Catalog> cat,
                   std::shared_ptr<const WebSource> web, std::shared_ptr<const ToolRegistry> tools,
                   ExecutorConfig config)
    : cat_(std::move(cat)),
      web_(std::move(web)),
      tools_(std::move(tools)),
      config_(std::move(config)) {
  config_.web.weights.validate();
}

TaskResult Executor::run_node(const planner::TaskNode& node, const Upstream& upstream,
                              Timestamp as_of) const {
  TaskResult r;
  r.node_id = node.id;
  auto fail = [&](TaskErrorKind kind, std::string msg) {
    r.status = TaskStatus::kFailed;
    r.error_kind = kind;
    r.error = std::move(msg);
    r.payload = std::monostate{};
    return r;
  };
  switch (node.kind) {
    case planner::TaskKind::kProductSearch: {
      const auto& p = std::get<planner::ProductSearchParams>(node.params);
      r.payload = product_search(*cat_, p.query, p.constraints, config_.product);
      return r;
    }
    case planner::TaskKind::kWebSearch: {
      const auto& p = std::get<planner::WebSearchParams>(node.params);
      if (!web_) return fail(TaskErrorKind::kUnavailable, "no web source configured");
      try {
        r.payload = web_search(p.need, *web_, cat_->embedder(), config_.web, as_of, expander_.get());
      } catch (const SourceUnavailable& e) {
        return fail(TaskErrorKind::kUnavailable, e.what());
      }
      return r;
    }
    case planner::TaskKind::kToolInvocation: {
      const auto& p = std::get<planner::ToolParams>(node.params);
      if (!tools_) return fail(TaskErrorKind::kUnknownTool, "unknown tool");
      Json args = p.args;
      for (const auto& [_, up] : upstream) {
        if (const auto* cs = up->candidates()) {
          Json cands = Json::array();
          for (const auto& it : cs->items) {
            Json c{{"id", it.product_id}};
            if (const auto* e = cs->find(it.product_id)) c["price"] = e->product.price;
            cands.push_back(std::move(c));
          }
          args[planner::kCandidatesSlot] = std::move(cands);
        } else if (const auto* ev = up->evidence()) {
          args[planner::kEvidenceSlot] = *ev;
        } else if (const auto* out = up->tool_output()) {
          args[planner::kToolOutputSlot] = *out;
        }
      }
      try {
        r.payload = tools_->invoke(p.tool, args);
      } catch (const ToolError& e) {
        return fail(e.kind(), e.what());
      }
      return r;
    }
  }
  return fail(TaskErrorKind::kHandlerError, "unknown task kind");
}

Execution Executor::execute(const planner::TaskGraph& g, const memory::SessionContext& ctx,
                            Timestamp as_of, memory::MemoryStore* memory,
                            const ScheduleHooks& hooks) const {
  auto schedule = run_graph(
      g, [&](const planner::TaskNode& n, const Upstream& up) { return run_node(n, up, as_of); },
      config_.parallelism, hooks);
  if (memory) {
    for (const auto& node : g.nodes) {
      memory->append(ctx.session_id, memory::RecordKind::kAgentState,
                     Json{{"agent", "executor"},
                          {"turn", ctx.turn_index},
                          {"result", result_to_json(schedule.results.at(node.id), false)}});
    }
  }
  return {std::move(schedule.results), std::move(schedule.trace)};
}

}  // namespace cogsearch::executor
