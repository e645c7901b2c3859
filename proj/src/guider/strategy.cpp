#include "cogsearch/guider/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cogsearch/util/text.hpp"

namespace cogsearch::guider {

StrategyConfig StrategyConfig::defaults() {
  StrategyConfig c;
  c.kpi_synonyms = {{"battery_life", {"battery", "runtime", "battery life"}},
                    {"weight", {"weight", "weighs", "heavy", "light", "lightweight"}},
                    {"price", {"price", "cost", "value", "budget"}},
                    {"screen_size", {"screen", "display size"}},
                    {"display_type", {"display", "panel", "oled", "lcd"}},
                    {"noise_cancelling", {"noise cancelling", "anc", "noise"}},
                    {"connectivity", {"bluetooth", "wireless", "wired"}},
                    {"storage", {"storage", "ssd"}},
                    {"water_resistance", {"waterproof", "water resistance", "ip rating"}}};
  c.templates = {
      {"kpi_mentioned", "{label} comes up in {n} of {m} expert sources"},
      {"kpi_gain", "{label} best separates the current candidates"},
      {"tradeoff_numeric", "{a} has {dir} {label} than {b} ({va} vs {vb})"},
      {"tradeoff_text", "{a} has {label} {va} while {b} has {vb}"},
      {"budget_both", "both candidates fit the {budget} budget"},
      {"budget_all", "all {n} candidates fit the {budget} budget"},
      {"budget_some", "{k} of {n} candidates fit the {budget} budget"},
      {"budget_none", "no candidate fits the {budget} budget; the cheapest is {cheapest}"},
  };
  return c;
}

const std::string& StrategyConfig::tmpl(const std::string& name) const {
  auto it = templates.find(name);
  if (it == templates.end()) throw ValidationError("missing template '" + name + "'");
  return it->second;
}

void to_json(Json& j, const StrategyConfig& c) {
  j = Json{{"kpi_count", c.kpi_count},
           {"tradeoff_min_relative", c.tradeoff_min_relative},
           {"kpi_synonyms", c.kpi_synonyms},
           {"templates", c.templates}};
}

void from_json(const Json& j, StrategyConfig& c) {
  c.kpi_count = j.at("kpi_count").get<std::size_t>();
  c.tradeoff_min_relative = j.at("tradeoff_min_relative").get<double>();
  c.kpi_synonyms = j.at("kpi_synonyms").get<std::map<std::string, std::vector<std::string>>>();
  c.templates = j.at("templates").get<std::map<std::string, std::string>>();
}

namespace {

// Whole-token phrase containment over pre-tokenized text.
bool has_phrase(const std::vector<std::string>& toks, const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > toks.size()) return false;
  for (std::size_t i = 0; i + phrase.size() <= toks.size(); ++i) {
    if (std::equal(phrase.begin(), phrase.end(), toks.begin() + static_cast<long>(i))) return true;
  }
  return false;
}

std::string money(double v) { return "$" + text::format_number(std::round(v * 100.0) / 100.0); }

}  // namespace

PurchaseStrategy generate_strategy(const CandidateSet& cands, const EvidenceSet& evidence,
                                   const UserState& state,
                                   const std::vector<planner::Constraint>& constraints,
                                   const StrategyConfig& config, const FacetConfig& facets) {
  PurchaseStrategy out;
  if (cands.empty()) return out;

  std::set<std::string> attrs{"price"};
  for (const auto& [_, e] : cands.enriched) {
    for (const auto& [name, __] : e.product.attributes) attrs.insert(name);
  }

  std::vector<std::vector<std::string>> docs;
  for (const auto& d : evidence.docs) docs.push_back(text::tokenize(d.title + " " + d.body));

  std::vector<Kpi> kpis;
  for (const auto& a : attrs) {
    std::vector<std::vector<std::string>> phrases{text::tokenize(facets.label_for(a))};
    if (auto it = config.kpi_synonyms.find(a); it != config.kpi_synonyms.end()) {
      for (const auto& s : it->second) phrases.push_back(text::tokenize(s));
    }
    Kpi k;
    k.attribute = a;
    for (const auto& d : docs) {
      k.mentions += std::any_of(phrases.begin(), phrases.end(),
                                [&](const auto& p) { return has_phrase(d, p); });
    }
    k.info_gain = info_gain(partition(a, cands, facets), state);
    const auto label = facets.label_for(a);
    k.why = k.mentions > 0
                ? text::render_template(config.tmpl("kpi_mentioned"),
                                        {{"label", label},
                                         {"n", std::to_string(k.mentions)},
                                         {"m", std::to_string(docs.size())}})
                : text::render_template(config.tmpl("kpi_gain"), {{"label", label}});
    kpis.push_back(std::move(k));
  }
  std::sort(kpis.begin(), kpis.end(), [](const Kpi& a, const Kpi& b) {
    if (a.mentions != b.mentions) return a.mentions > b.mentions;
    if (std::fabs(a.info_gain - b.info_gain) > 1e-12) return a.info_gain > b.info_gain;
    return a.attribute < b.attribute;
  });
  if (kpis.size() > config.kpi_count) kpis.resize(config.kpi_count);
  out.category_kpis = std::move(kpis);

  if (cands.items.size() >= 2) {
    const auto& ida = cands.items[0].product_id;
    const auto& idb = cands.items[1].product_id;
    const auto* ea = cands.find(ida);
    const auto* eb = cands.find(idb);
    if (ea && eb) {
      for (const auto& a : attrs) {
        auto va = facet_value(ea->product, a);
        auto vb = facet_value(eb->product, a);
        if (!va || !vb) continue;
        const auto label = facets.label_for(a);
        if (va->is_number() && vb->is_number()) {
          const double x = va->number(), y = vb->number();
          const double scale = std::max(std::fabs(x), std::fabs(y));
          if (scale == 0.0 || std::fabs(x - y) / scale < config.tradeoff_min_relative) continue;
          out.tradeoffs.push_back(
              {ida, idb, a,
               text::render_template(config.tmpl("tradeoff_numeric"),
                                     {{"a", ea->product.title},
                                      {"b", eb->product.title},
                                      {"dir", x > y ? "higher" : "lower"},
                                      {"label", label},
                                      {"va", va->display()},
                                      {"vb", vb->display()}})});
        } else if (text::to_lower(va->display()) != text::to_lower(vb->display())) {
          out.tradeoffs.push_back({ida, idb, a,
                                   text::render_template(config.tmpl("tradeoff_text"),
                                                         {{"a", ea->product.title},
                                                          {"b", eb->product.title},
                                                          {"label", label},
                                                          {"va", va->display()},
                                                          {"vb", vb->display()}})});
        }
      }
    }
  }

  if (auto ceiling = planner::price_ceiling(constraints)) {
    std::size_t fit = 0, n = 0;
    double cheapest = INFINITY;
    for (const auto& it : cands.items) {
      const auto* e = cands.find(it.product_id);
      if (!e) continue;
      ++n;
      fit += e->product.price <= *ceiling;
      cheapest = std::min(cheapest, e->product.price);
    }
    std::string name = fit == 0 ? "budget_none" : fit < n ? "budget_some" : n == 2 ? "budget_both" : "budget_all";
    if (n > 0) {
      out.budget_note = text::render_template(
          config.tmpl(name), {{"budget", money(*ceiling)},
                              {"n", std::to_string(n)},
                              {"k", std::to_string(fit)},
                              {"cheapest", money(cheapest)}});
    }
  }
  return out;
}

void to_json(Json& j, const Kpi& k) {
  j = Json{{"attribute", k.attribute},
           {"why", k.why},
           {"mentions", k.mentions},
           {"info_gain", k.info_gain}};
}

void from_json(const Json& j, Kpi& k) {
  k.attribute = j.at("attribute").get<std::string>();
  k.why = j.at("why").get<std::string>();
  k.mentions = j.value("mentions", std::size_t{0});
  k.info_gain = j.value("info_gain", 0.0);
}

void to_json(Json& j, const Tradeoff& t) {
  j = Json{{"item_a", t.item_a},
           {"item_b", t.item_b},
           {"dimension", t.dimension},
           {"statement", t.statement}};
}

void from_json(const Json& j, Tradeoff& t) {
  t.item_a = j.at("item_a").get<std::string>();
  t.item_b = j.at("item_b").get<std::string>();
  t.dimension = j.at("dimension").get<std::string>();
  t.statement = j.at("statement").get<std::string>();
}

void to_json(Json& j, const PurchaseStrategy& s) {
  j = Json{{"category_kpis", s.category_kpis}, {"tradeoffs", s.tradeoffs}};
  j["budget_note"] = s.budget_note ? Json(*s.budget_note) : Json(nullptr);
}

void from_json(const Json& j, PurchaseStrategy& s) {
  s.category_kpis = j.at("category_kpis").get<std::vector<Kpi>>();
  s.tradeoffs = j.at("tradeoffs").get<std::vector<Tradeoff>>();
  s.budget_note.reset();
  if (j.contains("budget_note") && !j["budget_note"].is_null()) {
    s.budget_note = j["budget_note"].get<std::string>();
  }
}

}  // namespace cogsearch::guider
