#include "cogsearch/planner/task_graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

namespace cogsearch::planner {

namespace {

constexpr std::array<std::string_view, 3> kKindNames = {"ProductSearch", "WebSearch",
                                                        "ToolInvocation"};

void check_params(const TaskNode& n, std::vector<std::string>& out) {
  const auto where = "node '" + n.id + "': ";
  switch (n.kind) {
    case TaskKind::kProductSearch: {
      const auto* p = std::get_if<ProductSearchParams>(&n.params);
      if (!p) {
        out.push_back(where + "params do not match kind ProductSearch");
      } else if (p->query.empty()) {
        out.push_back(where + "ProductSearch query is empty");
      }
      break;
    }
    case TaskKind::kWebSearch: {
      const auto* p = std::get_if<WebSearchParams>(&n.params);
      if (!p) {
        out.push_back(where + "params do not match kind WebSearch");
      } else if (p->need.empty()) {
        out.push_back(where + "WebSearch need is empty");
      }
      break;
    }
    case TaskKind::kToolInvocation: {
      const auto* p = std::get_if<ToolParams>(&n.params);
      if (!p) {
        out.push_back(where + "params do not match kind ToolInvocation");
      } else if (p->tool.empty()) {
        out.push_back(where + "ToolInvocation tool name is empty");
      } else if (!p->args.is_object()) {
        out.push_back(where + "ToolInvocation args must be an object");
      }
      break;
    }
  }
  for (const auto& s : n.inputs) {
    if (s.empty()) out.push_back(where + "empty input slot name");
  }
  for (const auto& s : n.outputs) {
    if (s.empty()) out.push_back(where + "empty output slot name");
  }
}

}  // namespace

std::string_view to_string(TaskKind kind) { return kKindNames[static_cast<int>(kind)]; }

TaskKind task_kind_from_string(std::string_view s) {
  for (int i = 0; i < 3; ++i) {
    if (kKindNames[i] == s) return static_cast<TaskKind>(i);
  }
  throw std::invalid_argument("unknown task kind '" + std::string(s) + "'");
}

const TaskNode* TaskGraph::find(const std::string& id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

std::size_t TaskGraph::count(TaskKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [&](const TaskNode& n) { return n.kind == kind; }));
}

std::vector<std::string> validate_graph(const TaskGraph& g) {
  std::vector<std::string> out;

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    if (n.id.empty()) out.push_back("node at position " + std::to_string(i) + " has empty id");
    if (!index.emplace(n.id, i).second) out.push_back("duplicate node id '" + n.id + "'");
    check_params(n, out);
  }

  std::vector<bool> resolved(g.edges.size(), true);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& edge = g.edges[e];
    for (const auto* end : {&edge.from, &edge.to}) {
      if (!index.count(*end)) {
        out.push_back("edge " + edge.from + "->" + edge.to + ": unknown node '" + *end + "'");
        resolved[e] = false;
      }
    }
  }

  std::map<std::string, std::set<std::string>> covered;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (!resolved[e]) continue;
    const auto& edge = g.edges[e];
    const auto& from = g.nodes[index[edge.from]];
    const auto& to = g.nodes[index[edge.to]];
    if (!from.outputs.count(edge.slot)) {
      out.push_back("slot '" + edge.slot + "' ∉ outputs(" + edge.from + ")");
    }
    if (!to.inputs.count(edge.slot)) {
      out.push_back("slot '" + edge.slot + "' ∉ inputs(" + edge.to + ")");
    }
    covered[edge.to].insert(edge.slot);
  }
  for (const auto& n : g.nodes) {
    for (const auto& slot : n.inputs) {
      if (!covered[n.id].count(slot)) {
        out.push_back("input slot '" + slot + "' of " + n.id + " is not fed by any edge");
      }
    }
  }

  // Kahn over the resolvable part of the graph.
  const std::size_t n = g.nodes.size();
  std::vector<std::size_t> indeg(n, 0);
  std::vector<std::vector<std::size_t>> succ(n);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (!resolved[e]) continue;
    auto a = index[g.edges[e].from];
    auto b = index[g.edges[e].to];
    succ[a].push_back(b);
    ++indeg[b];
  }
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indeg[i] == 0) ready.push_back(i);
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    auto i = ready.front();
    ready.pop_front();
    ++seen;
    for (auto j : succ[i]) {
      if (--indeg[j] == 0) ready.push_back(j);
    }
  }
  if (seen < n) {
    std::vector<std::string> stuck;
    for (std::size_t i = 0; i < n; ++i) {
      if (indeg[i] > 0) stuck.push_back(g.nodes[i].id);
    }
    std::sort(stuck.begin(), stuck.end());
    std::string msg = "cycle: ";
    for (std::size_t i = 0; i < stuck.size(); ++i) msg += (i ? "," : "") + stuck[i];
    out.push_back(msg);
  }
  return out;
}

std::vector<std::string> topological_order(const TaskGraph& g) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) index.emplace(g.nodes[i].id, i);
  std::vector<std::size_t> indeg(g.nodes.size(), 0);
  std::vector<std::vector<std::size_t>> succ(g.nodes.size());
  for (const auto& e : g.edges) {
    auto a = index.find(e.from);
    auto b = index.find(e.to);
    if (a == index.end() || b == index.end()) throw std::invalid_argument("unresolved edge");
    succ[a->second].push_back(b->second);
    ++indeg[b->second];
  }
  std::vector<std::string> order;
  std::vector<bool> done(g.nodes.size(), false);
  while (order.size() < g.nodes.size()) {
    bool progressed = false;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      if (done[i] || indeg[i] != 0) continue;
      done[i] = true;
      order.push_back(g.nodes[i].id);
      for (auto j : succ[i]) --indeg[j];
      progressed = true;
      break;
    }
    if (!progressed) throw std::invalid_argument("graph has a cycle");
  }
  return order;
}

void to_json(Json& j, const TaskNode& n) {
  Json params;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ProductSearchParams>) {
          params = Json{{"query", p.query}, {"constraints", p.constraints}};
        } else if constexpr (std::is_same_v<T, WebSearchParams>) {
          params = Json{{"need", p.need}};
        } else {
          params = Json{{"tool", p.tool}, {"args", p.args}};
        }
      },
      n.params);
  j = Json{{"id", n.id},
           {"kind", to_string(n.kind)},
           {"inputs", n.inputs},
           {"outputs", n.outputs},
           {"params", params}};
}

void from_json(const Json& j, TaskNode& n) {
  n.id = j.at("id").get<std::string>();
  n.kind = task_kind_from_string(j.at("kind").get<std::string>());
  n.inputs = j.value("inputs", std::set<std::string>{});
  n.outputs = j.value("outputs", std::set<std::string>{});
  const auto& p = j.at("params");
  switch (n.kind) {
    case TaskKind::kProductSearch:
      n.params = ProductSearchParams{p.at("query").get<std::string>(),
                                     p.value("constraints", std::vector<Constraint>{})};
      break;
    case TaskKind::kWebSearch:
      n.params = WebSearchParams{p.at("need").get<std::string>()};
      break;
    case TaskKind::kToolInvocation:
      n.params = ToolParams{p.at("tool").get<std::string>(), p.value("args", Json::object())};
      break;
  }
}

void to_json(Json& j, const TaskEdge& e) {
  j = Json{{"from", e.from}, {"to", e.to}, {"slot", e.slot}};
}

void from_json(const Json& j, TaskEdge& e) {
  e.from = j.at("from").get<std::string>();
  e.to = j.at("to").get<std::string>();
  e.slot = j.at("slot").get<std::string>();
}

void to_json(Json& j, const TaskGraph& g) { j = Json{{"nodes", g.nodes}, {"edges", g.edges}}; }

void from_json(const Json& j, TaskGraph& g) {
  g.nodes = j.at("nodes").get<std::vector<TaskNode>>();
  g.edges = j.value("edges", std::vector<TaskEdge>{});
}

}  // namespace cogsearch::planner
