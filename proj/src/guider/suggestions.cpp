#include "cogsearch/guider/suggestions.hpp"

#include <algorithm>
#include <cmath>

#include "cogsearch/util/text.hpp"

namespace cogsearch::guider {

std::string_view to_string(SuggestionKind k) {
  return k == SuggestionKind::kConvergent ? "convergent" : "stimulative";
}

SuggestionConfig SuggestionConfig::defaults() {
  SuggestionConfig c;
  c.co_purchase = {{"mirrorless camera", {"camera stabilizer", "memory card"}},
                   {"laptop", {"laptop sleeve", "usb c hub"}},
                   {"headphones", {"headphone case"}},
                   {"earbuds", {"earbuds case"}},
                   {"hiking boots", {"trekking poles", "hiking socks"}},
                   {"tent", {"sleeping bag"}},
                   {"smartphone", {"phone case", "screen protector"}}};
  c.templates = {{"below", "{query} under {hi} {label}"},
                 {"between", "{query} {lo} to {hi} {label}"},
                 {"above", "{query} ≥{lo} {label}"},
                 {"price_below", "{query} under {hi}"},
                 {"price_between", "{query} {lo} to {hi}"},
                 {"price_above", "{query} over {lo}"},
                 {"categorical", "{query} with {label} {value}"}};
  return c;
}

const std::string& SuggestionConfig::tmpl(const std::string& name) const {
  auto it = templates.find(name);
  if (it == templates.end()) throw ValidationError("missing template '" + name + "'");
  return it->second;
}

void to_json(Json& j, const SuggestionConfig& c) {
  j = Json{{"max_convergent", c.max_convergent},
           {"max_stimulative", c.max_stimulative},
           {"co_purchase", c.co_purchase},
           {"templates", c.templates}};
}

void from_json(const Json& j, SuggestionConfig& c) {
  c.max_convergent = j.at("max_convergent").get<std::size_t>();
  c.max_stimulative = j.at("max_stimulative").get<std::size_t>();
  c.co_purchase = j.at("co_purchase").get<std::map<std::string, std::vector<std::string>>>();
  c.templates = j.at("templates").get<std::map<std::string, std::string>>();
}

namespace {

std::string measure(double v, const std::string& unit) {
  const auto n = text::format_number(std::round(v * 100.0) / 100.0);
  return unit == "$" ? "$" + n : n + unit;
}

bool has_phrase(const std::vector<std::string>& toks, const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > toks.size()) return false;
  for (std::size_t i = 0; i + phrase.size() <= toks.size(); ++i) {
    if (std::equal(phrase.begin(), phrase.end(), toks.begin() + static_cast<long>(i))) return true;
  }
  return false;
}

std::string convergent_text(const std::string& query, const Facet& f, const Bucket& b,
                            const SuggestionConfig& config) {
  const bool price = f.attribute == "price";
  if (!b.numeric) {
    return text::render_template(config.tmpl("categorical"),
                                 {{"query", query}, {"label", f.label}, {"value", b.value}});
  }
  const auto* first = &f.buckets.front();
  const Bucket* last = nullptr;
  for (const auto& x : f.buckets) {
    if (!x.unknown) last = &x;
  }
  std::string name;
  if (&b == last || b.lo == b.hi) {
    name = "above";
  } else if (&b == first) {
    name = "below";
  } else {
    name = "between";
  }
  if (b.closed_hi && b.lo != b.hi && &b == first) name = "between";
  return text::render_template(config.tmpl(price ? "price_" + name : name),
                               {{"query", query},
                                {"label", f.label},
                                {"lo", measure(b.lo, f.unit)},
                                {"hi", measure(b.hi, f.unit)}});
}

}  // namespace

std::vector<QuerySuggestion> suggest_queries(const memory::SessionContext& ctx,
                                             const CandidateSet& cands,
                                             const std::vector<Facet>& facets,
                                             const executor::EvidenceSet& evidence,
                                             const std::set<std::string>& catalog_leaves,
                                             const SuggestionConfig& config) {
  std::vector<QuerySuggestion> out;
  std::set<std::string> seen{text::normalize(ctx.query)};
  for (const auto& q : ctx.search_history) seen.insert(text::normalize(q));
  auto push = [&](std::string textv, SuggestionKind kind, std::string prov) {
    if (text::trim(textv).empty() || !seen.insert(text::normalize(textv)).second) return false;
    out.push_back({std::move(textv), kind, std::move(prov)});
    return true;
  };

  const auto base = text::trim(ctx.query);
  std::size_t convergent = 0;
  for (const auto& f : facets) {
    if (convergent >= config.max_convergent) break;
    const Bucket* best = nullptr;
    for (const auto& b : f.buckets) {
      if (!b.unknown && (!best || b.count > best->count)) best = &b;
    }
    if (!best) continue;
    convergent += push(convergent_text(base, f, *best, config), SuggestionKind::kConvergent,
                       "facet:" + f.attribute + "=" + best->label);
  }

  std::vector<std::string> leaves;
  for (const auto& it : cands.items) {
    const auto* e = cands.find(it.product_id);
    if (!e || e->product.category_path.empty()) continue;
    const auto leaf = text::to_lower(e->product.leaf_category());
    if (std::find(leaves.begin(), leaves.end(), leaf) == leaves.end()) leaves.push_back(leaf);
  }
  std::size_t stimulative = 0;
  for (const auto& leaf : leaves) {
    auto it = config.co_purchase.find(leaf);
    if (it == config.co_purchase.end()) continue;
    for (const auto& comp : it->second) {
      if (stimulative >= config.max_stimulative) break;
      stimulative += push(comp, SuggestionKind::kStimulative, "co_purchase:" + leaf);
    }
  }

  // Other catalog categories that the evidence mentions: count docs, keep
  // the first doc id as provenance.
  std::vector<std::tuple<std::size_t, std::string, std::string>> mentioned;
  for (const auto& leaf : catalog_leaves) {
    const auto lower = text::to_lower(leaf);
    if (std::find(leaves.begin(), leaves.end(), lower) != leaves.end()) continue;
    const auto phrase = text::tokenize(leaf);
    std::size_t n = 0;
    std::string first;
    for (const auto& d : evidence.docs) {
      if (!has_phrase(text::tokenize(d.title + " " + d.body), phrase)) continue;
      if (n++ == 0) first = d.doc_id;
    }
    if (n > 0) mentioned.emplace_back(n, lower, first);
  }
  std::sort(mentioned.begin(), mentioned.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) > std::get<0>(b)
                                            : std::get<1>(a) < std::get<1>(b);
  });
  for (const auto& [n, leaf, doc] : mentioned) {
    if (stimulative >= config.max_stimulative) break;
    stimulative += push(leaf, SuggestionKind::kStimulative, "evidence:" + doc);
  }
  return out;
}

void to_json(Json& j, const QuerySuggestion& s) {
  j = Json{{"text", s.text}, {"kind", to_string(s.kind)}, {"provenance", s.provenance}};
}

void from_json(const Json& j, QuerySuggestion& s) {
  s.text = j.at("text").get<std::string>();
  s.kind = j.at("kind").get<std::string>() == "stimulative" ? SuggestionKind::kStimulative
                                                            : SuggestionKind::kConvergent;
  s.provenance = j.value("provenance", std::string{});
}

}  // namespace cogsearch::guider
