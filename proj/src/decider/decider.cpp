#include "cogsearch/decider/decider.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cogsearch/util/text.hpp"

namespace cogsearch::decider {

DecisionContext fuse_context(const std::map<std::string, executor::TaskResult>& results,
                             const memory::SessionContext& ctx,
                             std::vector<planner::Constraint> constraints,
                             guider::PurchaseStrategy strategy, const CandidateSet* narrowed) {
  DecisionContext d;
  bool have_products = narrowed != nullptr;
  if (narrowed) d.candidates = *narrowed;

  std::map<std::string, executor::CandidateItem> items;
  std::map<std::string, executor::EvidenceEntry> docs;
  for (const auto& [_, r] : results) {
    if (!r.ok()) continue;
    if (const auto* c = r.candidates(); c && !narrowed) {
      have_products = true;
      for (const auto& it : c->items) {
        auto [pos, fresh] = items.emplace(it.product_id, it);
        if (!fresh && it.score > pos->second.score) pos->second = it;
      }
      for (const auto& [id, e] : c->enriched) d.candidates.enriched.emplace(id, e);
    } else if (const auto* ev = r.evidence()) {
      for (const auto& e : ev->docs) {
        auto [pos, fresh] = docs.emplace(e.doc_id, e);
        if (!fresh && e.score > pos->second.score) pos->second = e;
      }
      for (const auto& q : ev->expansion_queries) {
        auto& qs = d.evidence.expansion_queries;
        if (std::find(qs.begin(), qs.end(), q) == qs.end()) qs.push_back(q);
      }
    }
  }
  if (!have_products) throw ValidationError("nothing to decide");

  auto by_score = [](const auto& a, const auto& b, auto id) {
    return a.score != b.score ? a.score > b.score : id(a) < id(b);
  };
  if (!narrowed) {
    for (auto& [_, it] : items) d.candidates.items.push_back(it);
    std::sort(d.candidates.items.begin(), d.candidates.items.end(), [&](const auto& a, const auto& b) {
      return by_score(a, b, [](const auto& x) { return x.product_id; });
    });
  }
  for (auto& [_, e] : docs) d.evidence.docs.push_back(e);
  std::sort(d.evidence.docs.begin(), d.evidence.docs.end(), [&](const auto& a, const auto& b) {
    return by_score(a, b, [](const auto& x) { return x.doc_id; });
  });

  d.trajectory = ctx.click_history;
  d.profile = ctx.user_profile;
  d.constraints = std::move(constraints);
  d.strategy = std::move(strategy);
  return d;
}

EvalProtocol EvalProtocol::defaults() {
  EvalProtocol p;
  p.templates = {
      {"functional_pro", "Reviewers highlight \"{phrase}\""},
      {"functional_soft", "It matches {k} of {n} stated preferences"},
      {"functional_none", "No review sentiment is available for it yet"},
      {"economic_under", "At {price} it is {margin} under the {budget} budget"},
      {"economic_over", "At {price} it is {margin} over the {budget} budget"},
      {"economic_none", "No budget was given; it costs {price}"},
      {"reliability_doc", "Rated {rating}/5 and covered by {source} in \"{title}\""},
      {"reliability_none", "Rated {rating}/5 with no external coverage"},
      {"constraints_all", "It meets every hard constraint: {list}"},
      {"constraints_none", "No hard constraints were given"},
      {"constraints_gated", "No candidate satisfies all hard constraints"},
      {"violation", "{title} violates {constraint}"},
      {"tradeoff", "Trade-off: {statement}"},
  };
  return p;
}

void EvalProtocol::validate() const {
  if (w_functional < 0 || w_economic < 0 || w_reliability < 0) {
    throw ValidationError("protocol weights must be >= 0");
  }
  const double sum = w_functional + w_economic + w_reliability;
  if (require_simplex && std::fabs(sum - 1.0) > 1e-9) {
    throw ValidationError("protocol weights must sum to 1");
  }
  if (sum <= 0) throw ValidationError("protocol weights must not all be 0");
}

const std::string& EvalProtocol::tmpl(const std::string& name) const {
  auto it = templates.find(name);
  if (it == templates.end()) throw ValidationError("missing template '" + name + "'");
  return it->second;
}

void to_json(Json& j, const EvalProtocol& p) {
  j = Json{{"weights",
            {{"functional", p.w_functional},
             {"economic", p.w_economic},
             {"reliability", p.w_reliability}}},
           {"mention_share", p.mention_share},
           {"templates", p.templates}};
}

void from_json(const Json& j, EvalProtocol& p) {
  const auto& w = j.at("weights");
  p.w_functional = w.at("functional").get<double>();
  p.w_economic = w.at("economic").get<double>();
  p.w_reliability = w.at("reliability").get<double>();
  p.mention_share = j.at("mention_share").get<double>();
  p.templates = j.at("templates").get<std::map<std::string, std::string>>();
}

bool mentions(const executor::EvidenceEntry& doc, const std::string& title, double share) {
  const auto t = text::tokenize(title);
  const std::set<std::string> want(t.begin(), t.end());
  if (want.empty()) return false;
  const auto d = text::tokenize(doc.title + " " + doc.body);
  const std::set<std::string> have(d.begin(), d.end());
  std::size_t hit = 0;
  for (const auto& w : want) hit += have.count(w);
  const auto need = static_cast<std::size_t>(std::ceil(share * static_cast<double>(want.size())));
  return hit >= std::max<std::size_t>(1, need);
}

namespace {

std::string money(double v) { return "$" + text::format_number(std::round(v * 100.0) / 100.0); }

const executor::Enrichment& enrichment(const DecisionContext& d, const std::string& id) {
  const auto* e = d.candidates.find(id);
  if (!e) throw ValidationError("candidate '" + id + "' is not enriched");
  return *e;
}

}  // namespace

UtilityVector score_item(const std::string& item_id, const DecisionContext& dctx,
                         const EvalProtocol& protocol) {
  const auto& e = enrichment(dctx, item_id);
  const auto& p = e.product;
  UtilityVector v;

  std::size_t soft = 0, soft_ok = 0;
  for (const auto& c : dctx.constraints) {
    if (c.hard()) {
      if (!planner::satisfies(p, c)) v.constraint_ok = 0;
      continue;
    }
    ++soft;
    soft_ok += planner::satisfies(p, c);
  }
  const double soft_match = soft == 0 ? 1.0 : static_cast<double>(soft_ok) / static_cast<double>(soft);
  const double np = static_cast<double>(e.pros.size()), nc = static_cast<double>(e.cons.size());
  const double sentiment = np + nc == 0 ? 0.5 : np / (np + nc);
  v.functional = 0.5 * soft_match + 0.5 * sentiment;

  v.economic = 1.0;
  if (auto budget = planner::price_ceiling(dctx.constraints); budget && *budget > 0) {
    v.economic = std::clamp(1.0 - std::max(0.0, p.price - *budget) / *budget, 0.0, 1.0);
  } else if (budget) {
    v.economic = p.price <= *budget ? 1.0 : 0.0;
  }

  double auth = 0.0;
  std::size_t n = 0;
  for (const auto& d : dctx.evidence.docs) {
    if (mentions(d, p.title, protocol.mention_share)) auth += d.auth, ++n;
  }
  v.reliability = 0.5 * std::clamp(p.rating / 5.0, 0.0, 1.0) + 0.5 * (n ? auth / static_cast<double>(n) : 0.5);

  v.pre_gate = protocol.w_functional * v.functional + protocol.w_economic * v.economic +
               protocol.w_reliability * v.reliability;
  v.total = v.constraint_ok * v.pre_gate;
  return v;
}

std::string_view to_string(Citation::Kind k) {
  switch (k) {
    case Citation::Kind::kReviewPhrase: return "review_phrase";
    case Citation::Kind::kEvidenceDoc: return "evidence_doc";
    case Citation::Kind::kConstraint: return "constraint";
    case Citation::Kind::kTradeoff: return "tradeoff";
  }
  return "?";
}

std::string Recommendation::rationale_text() const {
  std::vector<std::string> parts;
  for (const auto& l : rationale) parts.push_back(l.text);
  return text::join(parts, ". ") + (parts.empty() ? "" : ".");
}

namespace {

bool near(double a, double b) {
  return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

using Ranked = std::vector<std::pair<std::string, UtilityVector>>;

// Sorts by key desc, then re-sorts runs of near-equal keys with `next`.
template <class Key, class Next>
void sort_with_ties(Ranked::iterator first, Ranked::iterator last, Key key, Next next) {
  std::sort(first, last, [&](const auto& a, const auto& b) {
    return key(a) != key(b) ? key(a) > key(b) : a.first < b.first;
  });
  for (auto i = first; i != last;) {
    auto j = i + 1;
    while (j != last && near(key(*i), key(*j))) ++j;
    next(i, j);
    i = j;
  }
}

std::vector<RationaleLine> build_rationale(const DecisionContext& dctx, const EvalProtocol& protocol,
                                           const Ranked& ranked, bool all_gated) {
  using K = Citation::Kind;
  const auto& best = ranked.front().first;
  const auto& e = enrichment(dctx, best);
  const auto& p = e.product;
  std::vector<RationaleLine> out;

  {
    RationaleLine l{"functional", {}, {}};
    std::size_t soft = 0, soft_ok = 0;
    for (const auto& c : dctx.constraints) {
      if (!c.hard()) ++soft, soft_ok += planner::satisfies(p, c);
    }
    if (!e.pros.empty()) {
      l.text = text::render_template(protocol.tmpl("functional_pro"), {{"phrase", e.pros.front()}});
      l.citations.push_back({K::kReviewPhrase, e.pros.front(), best});
    } else if (soft > 0) {
      l.text = text::render_template(protocol.tmpl("functional_soft"),
                                     {{"k", std::to_string(soft_ok)}, {"n", std::to_string(soft)}});
      for (const auto& c : dctx.constraints) {
        if (!c.hard()) l.citations.push_back({K::kConstraint, c.describe(), best});
      }
    } else {
      l.text = protocol.tmpl("functional_none");
    }
    out.push_back(std::move(l));
  }

  {
    RationaleLine l{"economic", {}, {}};
    const auto budget = planner::price_ceiling(dctx.constraints);
    if (budget) {
      const bool under = p.price <= *budget;
      l.text = text::render_template(protocol.tmpl(under ? "economic_under" : "economic_over"),
                                     {{"price", money(p.price)},
                                      {"margin", money(std::fabs(*budget - p.price))},
                                      {"budget", money(*budget)}});
      for (const auto& c : dctx.constraints) {
        if (c.attribute == "price" && c.op == planner::ConstraintOp::kLe && c.numeric() &&
            std::get<double>(c.value) == *budget) {
          l.citations.push_back({K::kConstraint, c.describe(), best});
          break;
        }
      }
    } else {
      l.text = text::render_template(protocol.tmpl("economic_none"), {{"price", money(p.price)}});
    }
    out.push_back(std::move(l));
  }

  {
    RationaleLine l{"reliability", {}, {}};
    const executor::EvidenceEntry* support = nullptr;
    for (const auto& d : dctx.evidence.docs) {
      if (mentions(d, p.title, protocol.mention_share) && (!support || d.auth > support->auth)) {
        support = &d;
      }
    }
    const auto rating = text::format_number(p.rating);
    if (support) {
      l.text = text::render_template(
          protocol.tmpl("reliability_doc"),
          {{"rating", rating}, {"source", support->source}, {"title", support->title}});
      l.citations.push_back({K::kEvidenceDoc, support->doc_id, best});
    } else {
      l.text = text::render_template(protocol.tmpl("reliability_none"), {{"rating", rating}});
    }
    out.push_back(std::move(l));
  }

  {
    RationaleLine l{"constraints", {}, {}};
    std::vector<std::string> hard;
    for (const auto& c : dctx.constraints) {
      if (c.hard()) hard.push_back(c.describe());
    }
    if (all_gated) {
      std::vector<std::string> parts{protocol.tmpl("constraints_gated")};
      for (const auto& [id, _] : ranked) {
        const auto& item = enrichment(dctx, id).product;
        for (const auto& c : dctx.constraints) {
          if (!c.hard() || planner::satisfies(item, c)) continue;
          parts.push_back(text::render_template(protocol.tmpl("violation"),
                                                {{"title", item.title}, {"constraint", c.describe()}}));
          l.citations.push_back({K::kConstraint, c.describe(), id});
        }
      }
      l.text = text::join(parts, "; ");
    } else if (hard.empty()) {
      l.text = protocol.tmpl("constraints_none");
    } else {
      l.text = text::render_template(protocol.tmpl("constraints_all"), {{"list", text::join(hard, ", ")}});
      for (const auto& h : hard) l.citations.push_back({K::kConstraint, h, best});
    }
    out.push_back(std::move(l));
  }

  for (const auto& t : dctx.strategy.tradeoffs) {
    if (t.item_a != best && t.item_b != best) continue;
    out.push_back({"tradeoff",
                   text::render_template(protocol.tmpl("tradeoff"), {{"statement", t.statement}}),
                   {{K::kTradeoff, t.statement, best}}});
    break;
  }
  return out;
}

}  // namespace

Recommendation decide(const DecisionContext& dctx, const EvalProtocol& protocol) {
  protocol.validate();
  if (dctx.candidates.empty()) throw ValidationError("no candidates to decide between");
  Recommendation rec;
  for (const auto& it : dctx.candidates.items) {
    rec.ranked.emplace_back(it.product_id, score_item(it.product_id, dctx, protocol));
  }
  auto by_id = [](Ranked::iterator a, Ranked::iterator b) {
    std::sort(a, b, [](const auto& x, const auto& y) { return x.first < y.first; });
  };
  auto by_pre_gate = [&](Ranked::iterator a, Ranked::iterator b) {
    sort_with_ties(a, b, [](const auto& x) { return x.second.pre_gate; }, by_id);
  };
  sort_with_ties(rec.ranked.begin(), rec.ranked.end(), [](const auto& x) { return x.second.total; },
                 by_pre_gate);
  rec.best = rec.ranked.front().first;
  rec.all_gated = std::all_of(rec.ranked.begin(), rec.ranked.end(),
                              [](const auto& r) { return r.second.constraint_ok == 0; });
  rec.rationale = build_rationale(dctx, protocol, rec.ranked, rec.all_gated);
  return rec;
}

std::vector<std::string> verify_citations(const Recommendation& rec, const DecisionContext& dctx) {
  std::vector<std::string> problems;
  std::set<std::string> constraints;
  for (const auto& c : dctx.constraints) constraints.insert(c.describe());
  for (const auto& line : rec.rationale) {
    for (const auto& c : line.citations) {
      bool ok = false;
      switch (c.kind) {
        case Citation::Kind::kReviewPhrase:
          if (const auto* e = dctx.candidates.find(c.item_id)) {
            ok = std::find(e->pros.begin(), e->pros.end(), c.ref) != e->pros.end() ||
                 std::find(e->cons.begin(), e->cons.end(), c.ref) != e->cons.end();
          }
          break;
        case Citation::Kind::kEvidenceDoc:
          ok = dctx.evidence.find(c.ref) != nullptr;
          break;
        case Citation::Kind::kConstraint:
          ok = constraints.count(c.ref) > 0;
          break;
        case Citation::Kind::kTradeoff:
          ok = std::any_of(dctx.strategy.tradeoffs.begin(), dctx.strategy.tradeoffs.end(),
                           [&](const auto& t) { return t.statement == c.ref; });
          break;
      }
      if (ok && !c.item_id.empty() && !dctx.candidates.find(c.item_id)) ok = false;
      if (!ok) {
        problems.push_back(line.dimension + ": unresolved " + std::string(to_string(c.kind)) +
                           " '" + c.ref + "'");
      }
    }
  }
  return problems;
}

Recommendation rewrite_rationale(Recommendation rec, const DecisionContext& dctx,
                                 GenerativeBackend& backend) {
  const Json prompt{{"schema", "cogsearch.rationale_rewrite/v1"},
                    {"instructions",
                     "Reword each line's text. Keep every dimension and citation unchanged."},
                    {"best", rec.best},
                    {"lines", rec.rationale}};
  std::vector<RationaleLine> lines;
  try {
    const auto reply = Json::parse(backend.complete(prompt.dump(), std::chrono::seconds(5)));
    lines = reply.at("lines").get<std::vector<RationaleLine>>();
  } catch (const std::exception& e) {
    rec.rewrite_fallback = std::string("backend reply rejected: ") + e.what();
    return rec;
  }
  if (lines.size() != rec.rationale.size()) {
    rec.rewrite_fallback = "line count changed";
    return rec;
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].dimension != rec.rationale[i].dimension ||
        lines[i].citations != rec.rationale[i].citations || text::trim(lines[i].text).empty()) {
      rec.rewrite_fallback = "structure changed in line " + std::to_string(i);
      return rec;
    }
  }
  Recommendation candidate = rec;
  candidate.rationale = std::move(lines);
  if (!verify_citations(candidate, dctx).empty()) {
    rec.rewrite_fallback = "citations do not resolve";
    return rec;
  }
  return candidate;
}

void to_json(Json& j, const UtilityVector& v) {
  j = Json{{"functional", v.functional},     {"economic", v.economic},
           {"reliability", v.reliability},   {"constraint_ok", v.constraint_ok},
           {"pre_gate", v.pre_gate},         {"total", v.total}};
}

void from_json(const Json& j, UtilityVector& v) {
  v.functional = j.at("functional").get<double>();
  v.economic = j.at("economic").get<double>();
  v.reliability = j.at("reliability").get<double>();
  v.constraint_ok = j.at("constraint_ok").get<int>();
  v.pre_gate = j.value("pre_gate", 0.0);
  v.total = j.at("total").get<double>();
}

void to_json(Json& j, const Citation& c) {
  j = Json{{"kind", to_string(c.kind)}, {"ref", c.ref}, {"item_id", c.item_id}};
}

void from_json(const Json& j, Citation& c) {
  const auto k = j.at("kind").get<std::string>();
  if (k == "review_phrase") {
    c.kind = Citation::Kind::kReviewPhrase;
  } else if (k == "evidence_doc") {
    c.kind = Citation::Kind::kEvidenceDoc;
  } else if (k == "constraint") {
    c.kind = Citation::Kind::kConstraint;
  } else if (k == "tradeoff") {
    c.kind = Citation::Kind::kTradeoff;
  } else {
    throw ValidationError("unknown citation kind '" + k + "'");
  }
  c.ref = j.at("ref").get<std::string>();
  c.item_id = j.value("item_id", std::string{});
}

void to_json(Json& j, const RationaleLine& l) {
  j = Json{{"dimension", l.dimension}, {"text", l.text}, {"citations", l.citations}};
}

void from_json(const Json& j, RationaleLine& l) {
  l.dimension = j.at("dimension").get<std::string>();
  l.text = j.at("text").get<std::string>();
  l.citations = j.at("citations").get<std::vector<Citation>>();
}

void to_json(Json& j, const Recommendation& r) {
  Json ranked = Json::array();
  for (const auto& [id, v] : r.ranked) ranked.push_back({{"id", id}, {"utility", v}});
  j = Json{{"best", r.best},
           {"ranked", ranked},
           {"rationale", r.rationale},
           {"rationale_text", r.rationale_text()},
           {"all_gated", r.all_gated}};
  if (r.rewrite_fallback) j["rewrite_fallback"] = *r.rewrite_fallback;
}

void from_json(const Json& j, Recommendation& r) {
  r.best = j.at("best").get<std::string>();
  r.ranked.clear();
  for (const auto& x : j.at("ranked")) {
    r.ranked.emplace_back(x.at("id").get<std::string>(), x.at("utility").get<UtilityVector>());
  }
  r.rationale = j.at("rationale").get<std::vector<RationaleLine>>();
  r.all_gated = j.value("all_gated", false);
  r.rewrite_fallback.reset();
  if (j.contains("rewrite_fallback")) r.rewrite_fallback = j["rewrite_fallback"].get<std::string>();
}

}  // namespace cogsearch::decider
