#include "cogsearch/eval/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

#include "cogsearch/eval/metrics.hpp"

namespace cogsearch::eval {

namespace {

Json run_case(engine::Engine& eng, const BenchmarkCase& c, std::size_t k) {
  Json row{{"id", c.id},
           {"category", to_string(c.category)},
           {"query", c.query},
           {"gold_size", c.gold_items.size()}};
  try {
    const auto session = eng.create_session("bench-" + c.id);
    const Json profile = c.context ? c.context->user_profile : Json::object();
    const auto out = eng.run_turn(session, c.query, profile);
    const auto& st = out.state;
    std::vector<std::string> ranked;
    if (st.recommendation) {
      for (const auto& [id, _] : st.recommendation->ranked) ranked.push_back(id);
    }
    std::vector<std::string> top(ranked.begin(),
                                 ranked.begin() + static_cast<long>(std::min(k, ranked.size())));
    row["ranked"] = top;
    row["hit"] = acc_at_k(ranked, c.gold_items, k);
    row["best"] = st.recommendation ? Json(st.recommendation->best) : Json(nullptr);
    std::vector<std::string> cons, nodes;
    for (const auto& x : st.constraints) cons.push_back(x.describe());
    if (out.plan) {
      for (const auto& n : out.plan->graph.nodes) nodes.emplace_back(planner::to_string(n.kind));
    }
    row["constraints"] = cons;
    row["plan_nodes"] = nodes;
    row["evidence_docs"] = st.evidence.docs.size();
    row["evidence_empty"] = st.evidence.docs.empty();
    if (!eng.config().ablation.guider) {
      std::vector<std::string> facets;
      for (const auto& f : st.facets) facets.push_back(f.attribute);
      row["facets"] = facets;
    }
    if (!st.errors.empty()) {
      row["error"] = st.errors.front();
      row["failed"] = true;
    }
  } catch (const std::exception& e) {
    row["hit"] = 0;
    row["failed"] = true;
    row["error"] = e.what();
  }
  return row;
}

}  // namespace

Json run_benchmark(const std::vector<BenchmarkCase>& cases,
                   std::shared_ptr<const catalog::Catalog> cat, engine::EngineConfig config,
                   const BenchOptions& options) {
  if (!config.as_of) {
    Timestamp newest{};
    for (const auto& d : cat->webdocs()) newest = std::max(newest, d.published_at);
    config.as_of = newest;
  }
  const auto hash = engine::config_hash(config);
  const auto as_of = *config.as_of;
  auto memory = std::make_shared<memory::MemoryStore>([as_of] { return as_of; });
  engine::Engine eng(cat, config, memory, [as_of] { return as_of; });

  std::vector<Json> rows(cases.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) rows[i] = run_case(eng, cases[i], options.k);
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(options.parallelism, cases.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::map<std::string, std::vector<double>> hits;
  std::vector<double> all;
  std::size_t failures = 0;
  for (const auto& r : rows) {
    const double h = r.at("hit").get<int>();
    hits[r.at("category").get<std::string>()].push_back(h);
    all.push_back(h);
    failures += r.value("failed", false);
  }
  Json categories = Json::object();
  for (const auto& [name, v] : hits) {
    categories[name] = {{"cases", v.size()},
                        {"hits", static_cast<std::size_t>(std::count(v.begin(), v.end(), 1.0))},
                        {"acc_at_k", mean(v)}};
  }
  return Json{{"k", options.k},
              {"seed", options.seed},
              {"config_hash", hash},
              {"as_of", format_rfc3339(as_of)},
              {"ablation", config.ablation.names()},
              {"categories", categories},
              {"overall", {{"cases", all.size()}, {"acc_at_k", mean(all)}}},
              {"failures", failures},
              {"cases", rows}};
}

std::string format_summary(const Json& report) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-14s %6s %8s\n", "category", "cases",
                ("ACC@" + std::to_string(report.at("k").get<std::size_t>())).c_str());
  out += buf;
  for (const auto& [name, c] : report.at("categories").items()) {
    std::snprintf(buf, sizeof buf, "%-14s %6zu %8.3f\n", name.c_str(), c.at("cases").get<std::size_t>(),
                  c.at("acc_at_k").get<double>());
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%-14s %6zu %8.3f\n", "overall",
                report.at("overall").at("cases").get<std::size_t>(),
                report.at("overall").at("acc_at_k").get<double>());
  out += buf;
  return out;
}

}  // namespace cogsearch::eval
