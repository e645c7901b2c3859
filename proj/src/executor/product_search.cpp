#include "cogsearch/executor/product_search.hpp"

#include <algorithm>
#include <unordered_map>

#include "cogsearch/util/text.hpp"

namespace cogsearch::executor {

std::vector<catalog::ScoredDoc> rrf_fuse(const std::vector<std::vector<catalog::ScoredDoc>>& lists,
                                         double k) {
  std::unordered_map<std::string, double> fused;
  for (const auto& list : lists) {
    for (std::size_t r = 0; r < list.size(); ++r) {
      fused[list[r].id] += 1.0 / (k + static_cast<double>(r + 1));
    }
  }
  std::vector<catalog::ScoredDoc> out;
  out.reserve(fused.size());
  for (auto& [id, s] : fused) out.push_back({id, s});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
  return out;
}

EnrichConfig EnrichConfig::defaults() {
  EnrichConfig c;
  c.lexicon = {"amazing",  "awful",   "bad",      "bright",   "broken",   "cheap",
               "clear",    "comfortable", "decent", "disappointing", "durable", "excellent",
               "fast",     "flimsy",  "fragile",  "good",     "great",    "heavy",
               "light",    "lightweight", "loud",  "noisy",    "perfect",  "poor",
               "quiet",    "reliable", "responsive", "sharp", "slow",     "smooth",
               "solid",    "sturdy",  "terrible", "uncomfortable", "weak", "worse",
               "worst",    "best",    "better",   "nice",     "long",     "short"};
  return c;
}

void to_json(Json& j, const EnrichConfig& c) {
  j = Json{{"max_phrases", c.max_phrases},
           {"pro_min_stars", c.pro_min_stars},
           {"con_max_stars", c.con_max_stars},
           {"lexicon", c.lexicon}};
}

void from_json(const Json& j, EnrichConfig& c) {
  c.max_phrases = j.at("max_phrases").get<std::size_t>();
  c.pro_min_stars = j.at("pro_min_stars").get<int>();
  c.con_max_stars = j.at("con_max_stars").get<int>();
  c.lexicon = j.at("lexicon").get<std::set<std::string>>();
}

namespace {

std::vector<std::string> rank_phrases(const std::map<std::string, std::size_t>& counts,
                                      std::size_t limit) {
  std::vector<std::pair<std::string, std::size_t>> v(counts.begin(), counts.end());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first < b.first;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size() && i < limit; ++i) out.push_back(v[i].first);
  return out;
}

}  // namespace

EnrichmentResult enrich_candidates(const catalog::Catalog& cat, const std::vector<std::string>& ids,
                                   const EnrichConfig& config) {
  EnrichmentResult out;
  for (const auto& id : ids) {
    const auto* p = cat.find(id);
    if (!p) {
      out.warnings.push_back("unknown product id '" + id + "'");
      continue;
    }
    std::map<std::string, std::size_t> pros, cons;
    for (const auto* r : cat.reviews_for(id)) {
      const bool pro = r->stars >= config.pro_min_stars;
      const bool con = r->stars <= config.con_max_stars;
      if (!pro && !con) continue;
      for (const auto& sentence : text::split_sentences(r->text)) {
        const auto toks = text::tokenize(sentence);
        const bool sentiment = std::any_of(toks.begin(), toks.end(),
                                           [&](const auto& t) { return config.lexicon.count(t); });
        if (!sentiment) continue;
        const auto phrase = text::join(toks, " ");
        if (pro) ++pros[phrase];
        if (con) ++cons[phrase];
      }
    }
    out.entries.emplace(id, Enrichment{*p, rank_phrases(pros, config.max_phrases),
                                       rank_phrases(cons, config.max_phrases)});
  }
  return out;
}

CandidateSet product_search(const catalog::Catalog& cat, const std::string& query,
                            const std::vector<planner::Constraint>& constraints,
                            const ProductSearchOptions& options) {
  CandidateSet out;
  if (options.k == 0 || cat.products().empty()) return out;
  const std::size_t depth = 2 * options.k;
  auto lexical = cat.bm25_search(query, depth);
  auto vec = cat.vector_search(query, depth);
  std::erase_if(vec, [](const auto& d) { return d.score <= 0.0; });
  auto fused = rrf_fuse({lexical, vec}, options.rrf_k);

  std::vector<std::string> ids;
  for (const auto& d : fused) {
    if (out.items.size() == options.k) break;
    const auto* p = cat.find(d.id);
    bool keep = p != nullptr;
    for (const auto& c : constraints) {
      if (!keep) break;
      if (c.hardness == planner::Hardness::kHard) keep = planner::satisfies(*p, c);
    }
    if (!keep) continue;
    out.items.push_back({d.id, d.score});
    ids.push_back(d.id);
  }
  out.enriched = enrich_candidates(cat, ids, options.enrich).entries;
  return out;
}

}  // namespace cogsearch::executor
