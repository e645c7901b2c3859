// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Tolerances and time limits are pinned below.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "cogsearch/decider/decider.hpp"
#include "cogsearch/engine/engine.hpp"
#include "cogsearch/eval/bench.hpp"
#include "cogsearch/eval/metrics.hpp"
#include "cogsearch/eval/synthetic.hpp"
#include "cogsearch/executor/scheduler.hpp"
#include "cogsearch/executor/web_search.hpp"
#include "cogsearch/guider/facets.hpp"
#include "cogsearch/memory/memory_store.hpp"
#include "cogsearch/planner/planner.hpp"
#include "cogsearch/service/service.hpp"
#include "cogsearch/util/text.hpp"
#include "httplib.h"

using namespace cogsearch;
using Json = nlohmann::json;
using Clk = std::chrono::steady_clock;

namespace {

constexpr double kEntropyTol = 1e-9;
constexpr double kScoreTol = 1e-9;
constexpr double kPlanFuzzLimitS = 30;
constexpr double kSchedulerLimitS = 60;
constexpr double kBenchLimitS = 300;

const Timestamp kAsOf = parse_rfc3339("2026-06-01T00:00:00Z");

using Rng = std::mt19937_64;

double uniform(Rng& r, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(r); }
std::size_t below(Rng& r, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(r); }
bool coin(Rng& r, double p) { return uniform(r, 0, 1) < p; }
template <class T>
const T& pick(Rng& r, const std::vector<T>& v) { return v[below(r, v.size())]; }

double seconds_since(Clk::time_point t0) {
  return std::chrono::duration<double>(Clk::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Check {
  bool ok = true;
  std::vector<std::string> why;
  void expect(bool cond, const std::string& msg) {
    if (!cond) {
      ok = false;
      if (why.size() < 3) why.push_back(msg);
    }
  }
};

int failures = 0;

void report(int n, const std::string& name, const Check& c, const std::string& detail) {
  std::printf("%s %d %s: %s", c.ok ? "PASS" : "FAIL", n, name.c_str(), detail.c_str());
  for (const auto& w : c.why) std::printf(" | %s", w.c_str());
  std::printf("\n");
  std::fflush(stdout);
  if (!c.ok) ++failures;
}

// 1 ---------------------------------------------------------------------

std::string random_query(Rng& r) {
  static const std::vector<std::string> words = {
      "headphones", "earbuds", "tent", "shoes", "camera", "laptop", "running", "trail", "wireless",
      "best", "for", "travel", "hiking", "commuting", "under", "below", "over", "above", "at", "least",
      "most", "without", "no", "not", "with", "color", "red", "black", "blue", "brand", "Sony", "Bose",
      "battery", "weight", "waterproof", "review", "vs", "compare", "cheap", "budget", "$", "$200", "200",
      "USD", "dollars", "8h", "≥8h", "200g", "<200g", "≤", "≥", "<", ">", "=", "1.5kg", "-5", "0", "1e9",
      "recommend", "which", "should", "I", "buy", "?", "!", ",", "and", "or", "the", "a", "über", "日本",
      "price", "rating", "4.5", "stars", "shipping", "delivery", "coupon", "size", "10", "\t", "  "};
  std::string q;
  const std::size_t n = 1 + below(r, 13);
  for (std::size_t i = 0; i < n; ++i) {
    if (i && coin(r, 0.85)) q += ' ';
    if (coin(r, 0.05)) {
      q += std::to_string(static_cast<long long>(uniform(r, -1e4, 1e6)));
    } else {
      q += pick(r, words);
    }
  }
  return q;
}

void criterion_plan_fuzz() {
  const auto t0 = Clk::now();
  eval::SyntheticOptions so;
  so.products = 300;
  const auto cat = eval::build_catalog(eval::generate_synthetic_catalog(so));
  const auto cfg = planner::PlannerConfig::defaults().with_schema(cat->attribute_schema());
  Rng r(101);
  Check c;
  std::size_t n = 0, blank = 0;
  for (; n < 10'000; ++n) {
    memory::SessionContext ctx;
    ctx.session_id = "fuzz";
    ctx.query = random_query(r);
    for (std::size_t h = below(r, 3); h > 0; --h) ctx.search_history.push_back(random_query(r));
    ctx.turn_index = ctx.search_history.size();
    if (coin(r, 0.3)) ctx.user_profile = {{"zip", "94110"}, {"budget", uniform(r, 0, 500)}};
    if (text::trim(ctx.query).empty()) {
      // Blank input is rejected up front; the engine reports it as an event.
      ++blank;
      bool rejected = false;
      try {
        planner::plan(ctx, cfg);
      } catch (const ValidationError&) {
        rejected = true;
      }
      c.expect(rejected, "blank query was not rejected");
      continue;
    }
    try {
      const auto res = planner::plan(ctx, cfg);
      const auto errs = planner::validate_graph(res.graph);
      c.expect(errs.empty(), "\"" + ctx.query + "\": " + (errs.empty() ? "" : errs.front()));
    } catch (const std::exception& e) {
      c.expect(false, "\"" + ctx.query + "\" threw " + e.what());
    }
  }
  const double s = seconds_since(t0);
  c.expect(s < kPlanFuzzLimitS, "took " + fmt("%.1fs", s));
  report(1, "plan fuzz", c, std::to_string(n) + " random queries, " + std::to_string(n - blank) +
                                " graphs valid, " + std::to_string(blank) + " blank rejected, " +
                                fmt("%.2fs", s) + " (limit 30s)");
}

// 2 ---------------------------------------------------------------------

void criterion_scheduler() {
  const auto t0 = Clk::now();
  Rng r(202);
  Check c;
  std::size_t graphs = 0, skipped_total = 0, failed_total = 0;
  for (; graphs < 1000; ++graphs) {
    const std::size_t n = 1 + below(r, 12);
    planner::TaskGraph g;
    std::vector<std::vector<std::size_t>> parents(n);
    for (std::size_t i = 0; i < n; ++i) {
      planner::TaskNode node;
      node.id = "n" + std::to_string(i);
      node.kind = planner::TaskKind::kToolInvocation;
      node.outputs = {"s" + std::to_string(i)};
      node.params = planner::ToolParams{"noop", Json::object()};
      g.nodes.push_back(node);
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < j; ++i) {
        if (!coin(r, 0.3)) continue;
        parents[j].push_back(i);
        g.nodes[j].inputs.insert("s" + std::to_string(i));
        g.edges.push_back({g.nodes[i].id, g.nodes[j].id, "s" + std::to_string(i)});
      }
    }
    std::set<std::string> fails;
    std::map<std::string, int> delay_us;
    for (std::size_t i = 0; i < n; ++i) {
      if (coin(r, 0.15)) fails.insert(g.nodes[i].id);
      delay_us[g.nodes[i].id] = static_cast<int>(below(r, 800));
    }
    std::shuffle(g.nodes.begin(), g.nodes.end(), r);

    executor::NodeRunner runner = [&](const planner::TaskNode& node, const executor::Upstream&) {
      std::this_thread::sleep_for(std::chrono::microseconds(delay_us.at(node.id)));
      if (fails.count(node.id)) throw std::runtime_error("injected");
      executor::TaskResult res;
      res.node_id = node.id;
      res.status = executor::TaskStatus::kOk;
      res.payload = Json{{"node", node.id}};
      return res;
    };
    const std::size_t par = 1 + below(r, 4);
    const auto sched = executor::run_graph(g, runner, par);

    // Expected statuses, derived on the index order (a topological order).
    std::vector<executor::TaskStatus> expect(n);
    for (std::size_t i = 0; i < n; ++i) {
      bool parents_ok = true;
      for (auto p : parents[i]) parents_ok = parents_ok && expect[p] == executor::TaskStatus::kOk;
      const auto id = "n" + std::to_string(i);
      expect[i] = !parents_ok ? executor::TaskStatus::kSkipped
                  : fails.count(id) ? executor::TaskStatus::kFailed
                                    : executor::TaskStatus::kOk;
    }
    std::map<std::string, std::uint64_t> start, finish;
    for (const auto& ev : sched.trace) {
      (ev.type == executor::TraceEvent::Type::kStart ? start : finish)[ev.node_id] = ev.seq;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto id = "n" + std::to_string(i);
      const auto it = sched.results.find(id);
      if (it == sched.results.end()) {
        c.expect(false, "graph " + std::to_string(graphs) + ": no result for " + id);
        continue;
      }
      c.expect(it->second.status == expect[i],
               "graph " + std::to_string(graphs) + ": " + id + " is " +
                   std::string(executor::to_string(it->second.status)) + ", expected " +
                   std::string(executor::to_string(expect[i])));
      skipped_total += expect[i] == executor::TaskStatus::kSkipped;
      failed_total += expect[i] == executor::TaskStatus::kFailed;
      c.expect((expect[i] == executor::TaskStatus::kSkipped) != (start.count(id) == 1),
               "graph " + std::to_string(graphs) + ": " + id + " start event mismatch");
      if (!start.count(id)) continue;
      for (auto p : parents[i]) {
        const auto pid = "n" + std::to_string(p);
        c.expect(finish.count(pid) && finish[pid] < start[id],
                 "graph " + std::to_string(graphs) + ": " + id + " started before " + pid + " finished");
      }
    }
  }
  const double s = seconds_since(t0);
  c.expect(s < kSchedulerLimitS, "took " + fmt("%.1fs", s));
  report(2, "scheduler", c, std::to_string(graphs) + " random DAGs (<=12 nodes, " + std::to_string(failed_total) +
                                " injected failures, " + std::to_string(skipped_total) +
                                " skipped descendants), order and skips hold, " + fmt("%.2fs", s) +
                                " (limit 60s)");
}

// 3 ---------------------------------------------------------------------

// Independent bucketing: equal-width over the observed range, value in
// bucket k when lo + k*w <= v < lo + (k+1)*w, the top bucket closed.
double brute_entropy(const std::vector<std::optional<catalog::AttributeValue>>& values,
                     const std::vector<double>& w) {
  std::map<std::string, double> mass;
  bool numeric = true, any = false;
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& v : values) {
    if (!v) continue;
    any = true;
    if (!v->is_number()) {
      numeric = false;
      continue;
    }
    lo = std::min(lo, v->number());
    hi = std::max(hi, v->number());
  }
  numeric = numeric && any;
  const int nb = hi > lo ? 4 : 1;
  const double width = (hi - lo) / nb;
  double total = 0;
  for (double x : w) total += x;
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::string key;
    if (!values[i]) {
      key = "\x01unknown";
    } else if (numeric) {
      int k = 0;
      while (k + 1 < nb && !(values[i]->number() < lo + width * (k + 1))) ++k;
      key = std::to_string(k);
    } else {
      key = values[i]->display();
    }
    mass[key] += w[i];
  }
  double h = 0;
  for (const auto& [_, m] : mass) {
    const double p = m / total;
    if (p > 0) h -= p * std::log2(p);
  }
  return h;
}

void criterion_info_gain() {
  Rng r(303);
  Check c;
  double worst = 0;
  std::size_t comparisons = 0;
  const std::vector<std::string> words = {"red", "blue", "green", "black", "white", "steel", "oak", "nylon"};
  const auto config = guider::FacetConfig::defaults();
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + below(r, 1000);
    const std::size_t attrs = 1 + below(r, 8);
    std::vector<bool> numeric(attrs);
    std::vector<std::size_t> arity(attrs);
    for (std::size_t a = 0; a < attrs; ++a) numeric[a] = coin(r, 0.5), arity[a] = 1 + below(r, words.size());
    executor::CandidateSet cands;
    guider::UserState state;
    std::vector<double> weights;
    for (std::size_t i = 0; i < n; ++i) {
      catalog::Product p;
      p.id = "p" + std::to_string(i);
      p.title = "item " + std::to_string(i);
      p.category_path = {"Root", "leaf"};
      p.price = coin(r, 0.5) ? std::round(uniform(r, 1, 500)) : uniform(r, 1, 500);
      for (std::size_t a = 0; a < attrs; ++a) {
        if (coin(r, 0.1)) continue;  // missing
        const auto name = "a" + std::to_string(a);
        if (numeric[a]) {
          p.attributes[name] = catalog::AttributeValue(coin(r, 0.5) ? std::floor(uniform(r, 0, 20)) : uniform(r, -5, 5), "u");
        } else {
          p.attributes[name] = catalog::AttributeValue(words[below(r, arity[a])]);
        }
      }
      cands.items.push_back({p.id, 1.0 - static_cast<double>(i) * 1e-4});
      cands.enriched[p.id] = {p, {}, {}};
      const double w = coin(r, 0.3) ? 1.0 : uniform(r, 0.01, 10);
      state.weights[p.id] = w;
      weights.push_back(w);
    }
    std::vector<std::string> names{"price"};
    for (std::size_t a = 0; a < attrs; ++a) names.push_back("a" + std::to_string(a));
    for (const auto& name : names) {
      std::vector<std::optional<catalog::AttributeValue>> values;
      for (const auto& it : cands.items) {
        const auto& p = cands.enriched.at(it.product_id).product;
        if (name == "price") {
          values.emplace_back(catalog::AttributeValue(p.price, "$"));
        } else {
          const auto f = p.attributes.find(name);
          values.push_back(f == p.attributes.end() ? std::nullopt : std::optional(f->second));
        }
      }
      const double want = brute_entropy(values, weights);
      const double got = guider::info_gain(name, cands, state, config);
      worst = std::max(worst, std::abs(want - got));
      ++comparisons;
      c.expect(std::abs(want - got) <= kEntropyTol,
               "catalog " + std::to_string(t) + " " + name + ": " + fmt("%.17g", got) + " vs " + fmt("%.17g", want));
    }
    // Positive scaling of every weight leaves the facet order alone.
    const double k = std::exp(uniform(r, std::log(1e-3), std::log(1e3)));
    auto scaled = state;
    for (auto& [_, w] : scaled.weights) w *= k;
    auto order = [&](const guider::UserState& s) {
      std::vector<std::string> out;
      for (const auto& f : guider::generate_facets(cands, s, {}, config)) out.push_back(f.attribute);
      return out;
    };
    c.expect(order(state) == order(scaled), "catalog " + std::to_string(t) + ": order changed under scale " + fmt("%g", k));
  }
  report(3, "info gain", c, std::to_string(comparisons) + " facet entropies over 500 random catalogs, max |err| " +
                                fmt("%.2e", worst) + " (tol 1e-9); facet order unchanged under weight scaling");
}

// 4 ---------------------------------------------------------------------

void criterion_score() {
  Rng r(404);
  Check c;
  eval::SyntheticOptions so;
  so.products = 1500;
  so.docs_per_leaf = 20;
  const auto cat = eval::build_catalog(eval::generate_synthetic_catalog(so));
  executor::LocalCorpusSource source(cat);
  std::vector<std::string> leaves(cat->leaf_categories().begin(), cat->leaf_categories().end());
  const std::vector<std::string> extra = {"review", "best", "durable", "battery", "light", "waterproof", "vs"};
  std::size_t docs = 0, runs = 0;
  double worst = 0;
  for (int t = 0; t < 300; ++t) {
    auto cfg = executor::WebSearchConfig::defaults();
    if (t % 3 == 1) {
      const double a = uniform(r, 0, 1), b = uniform(r, 0, 1 - a);
      cfg.weights = {a, b, 1 - a - b};
    } else if (t % 3 == 2) {
      cfg.weights = {1, 0, 0};
    }
    std::string need = pick(r, leaves) + " " + pick(r, extra);
    const Timestamp as_of = kAsOf + std::chrono::hours(24 * static_cast<int>(below(r, 400)));
    const auto ev = executor::web_search(need, source, cat->embedder(), cfg, as_of);
    ++runs;
    for (const auto& d : ev.docs) {
      ++docs;
      const auto& w = cfg.weights;
      const double re = w.alpha * d.rel + w.beta * d.auth + w.gamma * d.fresh;
      worst = std::max(worst, std::abs(re - d.score));
      c.expect(std::abs(re - d.score) <= kScoreTol, d.doc_id + ": score does not recombine");
      c.expect(d.score >= cfg.threshold, d.doc_id + ": below threshold");
      c.expect(d.rel >= 0 && d.rel <= 1 && d.fresh > 0 && d.fresh <= 1, d.doc_id + ": component out of range");
      if (w.alpha == 1 && w.beta == 0 && w.gamma == 0) c.expect(d.score == d.rel, d.doc_id + ": Score != Rel");
    }
  }
  c.expect(docs > 0, "no documents scored");
  c.expect(executor::freshness(kAsOf, kAsOf, 30) == 1.0, "Fresh(0) != 1");
  c.expect(executor::freshness(kAsOf + std::chrono::hours(48), kAsOf, 30) == 1.0, "future doc fresh != 1");
  const double f10 = executor::freshness(kAsOf - std::chrono::hours(240), kAsOf, 30);
  c.expect(std::abs(f10 - 0.7165313105737893) <= 1e-12, "Fresh(10d) = " + fmt("%.17g", f10));
  report(4, "evidence score", c, std::to_string(docs) + " scored docs over " + std::to_string(runs) +
                                     " searches, max recombination err " + fmt("%.2e", worst) +
                                     " (tol 1e-9); (1,0,0) gives Score=Rel; none below theta; Fresh(0)=1");
}

// 5 ---------------------------------------------------------------------

decider::DecisionContext random_decision(Rng& r) {
  static const std::vector<std::string> colors = {"black", "white", "red"};
  static const std::vector<std::string> brands = {"Acme", "Borto", "Cirra", "Dunmo"};
  static const std::vector<std::string> nouns = {"kettle", "lamp", "drill", "jacket", "router"};
  decider::DecisionContext d;
  const std::size_t n = 1 + below(r, 10);
  for (std::size_t i = 0; i < n; ++i) {
    catalog::Product p;
    p.id = "c" + std::to_string(i);
    p.title = pick(r, brands) + " X" + std::to_string(i) + " " + pick(r, nouns);
    p.category_path = {"Root", "leaf"};
    p.price = std::round(uniform(r, 5, 400));
    p.rating = coin(r, 0.1) ? 0.0 : std::round(uniform(r, 1, 5) * 10) / 10;
    if (coin(r, 0.8)) p.attributes["color"] = pick(r, colors);
    p.attributes["brand"] = p.title.substr(0, p.title.find(' '));
    executor::Enrichment e{p, {}, {}};
    for (std::size_t k = below(r, 4); k > 0; --k) e.pros.push_back("good thing " + std::to_string(k));
    for (std::size_t k = below(r, 3); k > 0; --k) e.cons.push_back("bad thing " + std::to_string(k));
    d.candidates.items.push_back({p.id, 1.0 - 0.01 * static_cast<double>(i)});
    d.candidates.enriched[p.id] = e;
  }
  for (std::size_t k = below(r, 6); k > 0; --k) {
    const auto& p = d.candidates.enriched.at(d.candidates.items[below(r, n)].product_id).product;
    d.evidence.docs.push_back({"w" + std::to_string(k), uniform(r, 0.3, 1), uniform(r, 0, 1), uniform(r, 0, 1),
                               uniform(r, 0, 1), "doc", "src", "https://example.test/" + std::to_string(k),
                               coin(r, 0.7) ? "notes on the " + p.title : "unrelated text"});
  }
  auto hard = [&] { return coin(r, 0.5) ? planner::Hardness::kHard : planner::Hardness::kSoft; };
  if (coin(r, 0.6)) d.constraints.push_back({"price", planner::ConstraintOp::kLe, std::round(uniform(r, 20, 300)), hard()});
  if (coin(r, 0.4)) d.constraints.push_back({"color", planner::ConstraintOp::kEq, pick(r, colors), hard()});
  if (coin(r, 0.3)) d.constraints.push_back({"rating", planner::ConstraintOp::kGe, uniform(r, 2, 4.5), hard()});
  if (coin(r, 0.3)) d.constraints.push_back({"brand", planner::ConstraintOp::kNe, pick(r, brands), hard()});
  return d;
}

void criterion_decider() {
  Rng r(505);
  Check c;
  const auto proto = decider::EvalProtocol::defaults();
  std::size_t citations = 0, unresolved = 0, gated_sets = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto d = random_decision(r);
    const auto rec = decider::decide(d, proto);
    const auto tag = "set " + std::to_string(t);
    // Gate dominance: every feasible item outranks every gated one.
    bool seen_gated = false;
    for (const auto& [id, u] : rec.ranked) {
      const auto& p = d.candidates.enriched.at(id).product;
      bool feasible = true;
      for (const auto& con : d.constraints) feasible = feasible && (!con.hard() || planner::satisfies(p, con));
      c.expect(u.constraint_ok == (feasible ? 1 : 0), tag + ": gate of " + id);
      if (!feasible) {
        seen_gated = true;
        c.expect(u.total == 0.0, tag + ": gated total nonzero");
      } else {
        c.expect(!seen_gated, tag + ": feasible " + id + " ranked below a gated item");
      }
    }
    gated_sets += seen_gated;
    // Positive scaling keeps the ranking.
    auto scaled = proto;
    scaled.require_simplex = false;
    const double k = std::exp(uniform(r, std::log(1e-2), std::log(1e2)));
    scaled.w_functional *= k, scaled.w_economic *= k, scaled.w_reliability *= k;
    const auto rec2 = decider::decide(d, scaled);
    std::vector<std::string> a, b;
    for (const auto& x : rec.ranked) a.push_back(x.first);
    for (const auto& x : rec2.ranked) b.push_back(x.first);
    c.expect(a == b, tag + ": ranking changed under scale " + fmt("%g", k));
    // Citations resolve.
    for (const auto& l : rec.rationale) citations += l.citations.size();
    const auto bad = decider::verify_citations(rec, d);
    unresolved += bad.size();
    c.expect(bad.empty(), tag + ": " + (bad.empty() ? "" : bad.front()));
    // Economic utility never rises with price.
    auto dd = d;
    const auto id = d.candidates.items.front().product_id;
    double prev = INFINITY;
    for (double price = 1; price <= 1000; price *= 1.37) {
      dd.candidates.enriched[id].product.price = price;
      const double e = decider::score_item(id, dd, proto).economic;
      c.expect(e <= prev, tag + ": economic rose with price at " + fmt("%g", price));
      prev = e;
    }
  }
  const double resolved = citations ? 100.0 * static_cast<double>(citations - unresolved) / static_cast<double>(citations) : 0;
  c.expect(citations > 0, "no citations produced");
  report(5, "decider", c, "1000 random candidate sets (" + std::to_string(gated_sets) +
                              " with gated items): gate dominance, scale invariance, economic monotone in price, " +
                              std::to_string(citations) + " citations " + fmt("%.1f%%", resolved) + " resolved");
}

// 6 ---------------------------------------------------------------------

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

// Straight scan over the products, written without the library's
// constraint evaluator.
std::set<std::string> exhaustive_filter(const catalog::Catalog& cat, const eval::BenchmarkCase& bc) {
  std::set<std::string> out;
  for (const auto& p : cat.products()) {
    if (p.category_path.empty() || p.category_path.back() != bc.leaf) continue;
    bool ok = true;
    for (const auto& pr : bc.predicates) {
      const catalog::AttributeValue* v = nullptr;
      catalog::AttributeValue price(p.price);
      if (pr.attribute == "price") {
        v = &price;
      } else if (auto it = p.attributes.find(pr.attribute); it != p.attributes.end()) {
        v = &it->second;
      }
      switch (pr.op) {
        case planner::ConstraintOp::kLe:
          ok = ok && v && v->is_number() && v->number() <= std::get<double>(pr.value);
          break;
        case planner::ConstraintOp::kGe:
          ok = ok && v && v->is_number() && v->number() >= std::get<double>(pr.value);
          break;
        case planner::ConstraintOp::kEq:
          ok = ok && v && lower(v->display()) == lower(std::get<std::string>(pr.value));
          break;
        case planner::ConstraintOp::kNe:
          ok = ok && (!v || lower(v->display()) != lower(std::get<std::string>(pr.value)));
          break;
        default:
          ok = false;
      }
    }
    if (ok) out.insert(p.id);
  }
  return out;
}

void criterion_benchmark() {
  Check c;
  const auto t0 = Clk::now();
  const auto cat = eval::build_catalog(eval::generate_synthetic_catalog({}));
  c.expect(cat->products().size() == 10'000, "catalog has " + std::to_string(cat->products().size()) + " items");
  std::vector<std::string> notes;
  const auto cases = eval::generate_synthetic_benchmark(*cat, 2026, {100, 100, 100}, &notes);
  c.expect(cases.size() == 300, std::to_string(cases.size()) + " cases built");
  std::size_t complex = 0;
  for (const auto& bc : cases) {
    if (bc.category != eval::CaseCategory::kComplex) continue;
    ++complex;
    c.expect(bc.gold_items == exhaustive_filter(*cat, bc), bc.id + ": gold differs from exhaustive filter");
  }
  const double build_s = seconds_since(t0);

  const auto config = engine::EngineConfig::defaults();
  const auto t1 = Clk::now();
  const auto a = eval::run_benchmark(cases, cat, config, {5, 1, 2026});
  const double run1 = seconds_since(t1);
  const auto t2 = Clk::now();
  const std::size_t par = std::max(2u, std::thread::hardware_concurrency());
  const auto b = eval::run_benchmark(cases, cat, config, {5, par, 2026});
  const double run2 = seconds_since(t2);

  c.expect(a.dump() == b.dump(), "reports differ between seeded runs");
  c.expect(run1 < kBenchLimitS, "serial bench took " + fmt("%.1fs", run1));
  const double simple = a["categories"]["simple"]["acc_at_k"].get<double>();
  c.expect(simple == 1.0, "simple ACC@5 " + fmt("%.3f", simple));
  c.expect(a["failures"].get<int>() == 0, std::to_string(a["failures"].get<int>()) + " case failures");
  std::ostringstream detail;
  detail << "10000 items, " << cases.size() << " cases; simple ACC@5 " << fmt("%.3f", simple) << ", complex "
         << fmt("%.3f", a["categories"]["complex"]["acc_at_k"].get<double>()) << ", consultative "
         << fmt("%.3f", a["categories"]["consultative"]["acc_at_k"].get<double>()) << "; " << complex
         << " complex gold sets equal exhaustive filter; bench " << fmt("%.1fs", run1) << " serial / "
         << fmt("%.1fs", run2) << " parallel (limit 300s), setup " << fmt("%.1fs", build_s)
         << "; reports byte-identical";
  report(6, "synthetic benchmark", c, detail.str());
}

// 7 ---------------------------------------------------------------------

eval::SessionLog log_of(int searches, int clicks, int tx) {
  eval::SessionLog l;
  for (int i = 0; i < searches; ++i) l.events.push_back({eval::LogEventKind::kSearch, "", kAsOf});
  for (int i = 0; i < clicks; ++i) l.events.push_back({eval::LogEventKind::kClick, "p", kAsOf});
  for (int i = 0; i < tx; ++i) l.events.push_back({eval::LogEventKind::kTransaction, "p", kAsOf});
  return l;
}

void criterion_metrics() {
  Rng r(707);
  Check c;
  for (int t = 0; t < 10'000; ++t) {
    std::vector<std::string> ranked;
    for (std::size_t i = below(r, 15); i > 0; --i) ranked.push_back("i" + std::to_string(below(r, 30)));
    std::set<std::string> gold;
    for (std::size_t i = 1 + below(r, 3); i > 0; --i) gold.insert("i" + std::to_string(below(r, 30)));
    int prev = 0;
    for (std::size_t k = 1; k <= 20; ++k) {
      const int v = eval::acc_at_k(ranked, gold, k);
      c.expect(v >= prev, "trial " + std::to_string(t) + ": drop at k=" + std::to_string(k));
      prev = v;
    }
  }
  const double one = eval::decision_cost({log_of(2, 3, 1)});
  const double two = eval::decision_cost({log_of(1, 3, 1), log_of(2, 4, 1)});
  c.expect(one == 5.0, "one-log fixture " + fmt("%.17g", one));
  c.expect(two == 5.0, "two-log fixture " + fmt("%.17g", two));
  report(7, "metrics", c, "acc_at_k monotone in k over 10000 random rankings; decision_cost fixtures " +
                              fmt("%g", one) + " and " + fmt("%g", two) + " (expected 5.0 exactly)");
}

// 8 ---------------------------------------------------------------------

Json random_payload(Rng& r, int depth = 0) {
  switch (below(r, depth > 2 ? 4 : 6)) {
    case 0: return uniform(r, -1e6, 1e6);
    case 1: return static_cast<std::int64_t>(below(r, 1'000'000));
    case 2: return std::string("text ") + std::to_string(below(r, 1000)) + (coin(r, 0.3) ? " \"q\" ünï ☃\n" : "");
    case 3: return coin(r, 0.5);
    case 4: {
      Json a = Json::array();
      for (std::size_t i = below(r, 4); i > 0; --i) a.push_back(random_payload(r, depth + 1));
      return a;
    }
    default: {
      Json o = Json::object();
      for (std::size_t i = below(r, 4); i > 0; --i) o["k" + std::to_string(below(r, 50))] = random_payload(r, depth + 1);
      return o;
    }
  }
}

void criterion_memory() {
  Rng r(808);
  Check c;
  auto now = kAsOf;
  std::mutex clock_mu;
  auto clock = [&] {
    std::lock_guard lock(clock_mu);
    return now += std::chrono::milliseconds(1);
  };
  memory::MemoryStore store(clock);
  const std::vector<memory::RecordKind> kinds = {memory::RecordKind::kTurn, memory::RecordKind::kAgentState,
                                                 memory::RecordKind::kTaskGraph};
  for (int s = 0; s < 25; ++s) store.create_session("s" + std::to_string(s));
  for (int i = 0; i < 1000; ++i) {
    store.append("s" + std::to_string(below(r, 25)), pick(r, kinds), random_payload(r));
  }
  const auto dir = std::filesystem::temp_directory_path() / ("cogsearch_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  store.snapshot(dir / "a.json");
  memory::MemoryStore restored(clock);
  restored.restore(dir / "a.json");
  restored.snapshot(dir / "b.json");
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const auto a = slurp(dir / "a.json"), b = slurp(dir / "b.json");
  c.expect(!a.empty() && a == b, "snapshot bytes differ after restore");
  std::size_t count = 0;
  for (const auto& sid : restored.sessions()) {
    for (auto k : kinds) count += restored.records(sid, k).size();
  }
  c.expect(count == 1000, std::to_string(count) + " records after restore");
  std::filesystem::remove_all(dir);

  // Concurrent sessions: writers and readers interleaved.
  memory::MemoryStore live(clock);
  constexpr int kThreads = 8, kPerThread = 2000, kSessions = 6;
  for (int s = 0; s < kSessions; ++s) live.create_session("c" + std::to_string(s));
  std::atomic<bool> torn{false};
  std::vector<std::thread> pool;
  for (int t = 0; t < kThreads; ++t) {
    pool.emplace_back([&, t] {
      Rng tr(9000 + t);
      for (int i = 0; i < kPerThread; ++i) {
        const auto sid = "c" + std::to_string(below(tr, kSessions));
        const auto kind = kinds[below(tr, kinds.size())];
        if (coin(tr, 0.2)) {
          const auto recs = live.records(sid, kind);
          for (std::size_t j = 0; j < recs.size(); ++j) {
            if (recs[j].version != j + 1) torn = true;
          }
        } else {
          live.append(sid, kind, Json{{"t", t}, {"i", i}});
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  std::size_t total = 0;
  for (int s = 0; s < kSessions; ++s) {
    for (auto k : kinds) {
      const auto recs = live.records("c" + std::to_string(s), k);
      total += recs.size();
      for (std::size_t j = 0; j < recs.size(); ++j) c.expect(recs[j].version == j + 1, "version gap");
    }
  }
  c.expect(!torn, "a reader saw a version gap");
  report(8, "memory store", c, "1000-record snapshot/restore byte-identical (" + std::to_string(a.size()) +
                                   " bytes); " + std::to_string(total) + " concurrent appends across " +
                                   std::to_string(kThreads) + " threads, versions gapless");
}

// 9 ---------------------------------------------------------------------

std::vector<Json> ndjson(const std::string& body) {
  std::vector<Json> out;
  std::istringstream in(body);
  for (std::string l; std::getline(in, l);) {
    if (!l.empty()) out.push_back(Json::parse(l));
  }
  return out;
}

void criterion_service() {
  Check c;
  eval::SyntheticOptions so;
  so.products = 800;
  const auto cat = eval::build_catalog(eval::generate_synthetic_catalog(so));
  auto cfg = engine::EngineConfig::defaults();
  cfg.as_of = kAsOf;
  auto eng = std::make_shared<engine::Engine>(cat, cfg, nullptr, [] { return kAsOf; });
  service::Service svc(eng, [] { return kAsOf; });
  const int port = svc.start_background();
  c.expect(port > 0, "service did not bind");
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(std::chrono::seconds(30));
  auto health = client.Get("/health");
  c.expect(health && health->status == 200, "health check failed");

  auto new_session = [&] { return Json::parse(client.Post("/sessions")->body).at("session_id").get<std::string>(); };
  std::vector<std::string> leaves(cat->leaf_categories().begin(), cat->leaf_categories().end());
  std::vector<std::string> queries;
  for (std::size_t i = 0; i < leaves.size() && queries.size() < 12; ++i) {
    queries.push_back(i % 3 == 0 ? "best " + leaves[i] + " for travel"
                      : i % 3 == 1 ? leaves[i] + " under $120"
                                   : leaves[i]);
  }
  std::size_t streams = 0, events = 0, equivalent = 0;
  for (const auto& q : queries) {
    const auto body = Json{{"query", q}}.dump();
    const auto full = new_session();
    auto res = client.Post("/sessions/" + full + "/turns", body, "application/json");
    const auto ev = ndjson(res ? res->body : "");
    ++streams;
    events += ev.size();
    c.expect(!ev.empty() && ev.front()["type"] == "plan", q + ": first event is not plan");
    c.expect(!ev.empty() && ev.back()["type"] == "done", q + ": last event is not done");
    for (std::size_t i = 0; i < ev.size(); ++i) c.expect(ev[i]["seq"] == i + 1, q + ": seq gap");

    // Same turn, client hangs up after the first chunk.
    const auto cut = new_session();
    httplib::Request req;
    req.method = "POST";
    req.path = "/sessions/" + cut + "/turns";
    req.body = body;
    req.set_header("Content-Type", "application/json");
    req.content_receiver = [](const char*, std::size_t, std::uint64_t, std::uint64_t) { return false; };
    httplib::Client hang("127.0.0.1", port);
    hang.send(req);
    svc.drain();
    const auto sa = Json::parse(client.Get("/sessions/" + full + "/state")->body)["state"];
    const auto sb = Json::parse(client.Get("/sessions/" + cut + "/state")->body)["state"];
    const bool same = !sa.is_null() && sa == sb;
    equivalent += same;
    c.expect(same, q + ": state after disconnect differs");
  }
  svc.stop();
  report(9, "service stream", c, std::to_string(streams) + " ndjson streams (" + std::to_string(events) +
                                     " events) plan-first, done-last, seq gapless; " + std::to_string(equivalent) +
                                     " disconnected turns left state equal to completed ones; served standalone");
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria = {
      criterion_plan_fuzz, criterion_scheduler, criterion_info_gain, criterion_score, criterion_decider,
      criterion_benchmark, criterion_metrics,   criterion_memory,    criterion_service};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      Check c;
      c.expect(false, e.what());
      report(static_cast<int>(i + 1), "criterion", c, "threw");
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures ? 1 : 0;
}
