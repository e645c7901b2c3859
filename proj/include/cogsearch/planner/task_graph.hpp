#pragma once

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cogsearch/planner/constraint.hpp"
#include "json.hpp"

namespace cogsearch::planner {

enum class TaskKind { kProductSearch, kWebSearch, kToolInvocation };

std::string_view to_string(TaskKind kind);
TaskKind task_kind_from_string(std::string_view s);

struct ProductSearchParams {
  std::string query;
  std::vector<Constraint> constraints;
  friend bool operator==(const ProductSearchParams&, const ProductSearchParams&) = default;
};

struct WebSearchParams {
  std::string need;
  friend bool operator==(const WebSearchParams&, const WebSearchParams&) = default;
};

struct ToolParams {
  std::string tool;
  Json args = Json::object();
  friend bool operator==(const ToolParams&, const ToolParams&) = default;
};

using TaskParams = std::variant<ProductSearchParams, WebSearchParams, ToolParams>;

struct TaskNode {
  std::string id;
  TaskKind kind = TaskKind::kProductSearch;
  std::set<std::string> inputs;
  std::set<std::string> outputs;
  TaskParams params;

  friend bool operator==(const TaskNode&, const TaskNode&) = default;
};

struct TaskEdge {
  std::string from;
  std::string to;
  std::string slot;

  friend bool operator==(const TaskEdge&, const TaskEdge&) = default;
};

struct TaskGraph {
  std::vector<TaskNode> nodes;
  std::vector<TaskEdge> edges;

  const TaskNode* find(const std::string& id) const;
  std::size_t count(TaskKind kind) const;

  friend bool operator==(const TaskGraph&, const TaskGraph&) = default;
};

// Checks, in order: node-id uniqueness and per-kind params; edge endpoint
// resolution; slot coverage (every edge slot is an output of its producer
// and an input of its consumer, every input slot is fed by some edge);
// acyclicity via Kahn's algorithm. Returns every violation found; empty
// means the graph is valid.
std::vector<std::string> validate_graph(const TaskGraph& g);

// Kahn order with ties broken by node position. Throws std::invalid_argument
// on cycles or unresolved edges.
std::vector<std::string> topological_order(const TaskGraph& g);

void to_json(Json& j, const TaskNode& n);
void from_json(const Json& j, TaskNode& n);
void to_json(Json& j, const TaskEdge& e);
void from_json(const Json& j, TaskEdge& e);
void to_json(Json& j, const TaskGraph& g);
void from_json(const Json& j, TaskGraph& g);

}  // namespace cogsearch::planner
