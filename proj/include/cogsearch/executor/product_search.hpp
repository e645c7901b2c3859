#pragma once

#include <set>
#include <string>
#include <vector>

#include "cogsearch/catalog/catalog.hpp"
#include "cogsearch/executor/types.hpp"
#include "cogsearch/planner/constraint.hpp"

namespace cogsearch::executor {

// Reciprocal rank fusion: fused(d) = sum over lists of 1 / (k + rank), ranks
// 1-based. Descending by fused score, ties by ascending id.
std::vector<catalog::ScoredDoc> rrf_fuse(const std::vector<std::vector<catalog::ScoredDoc>>& lists,
                                         double k = 60.0);

struct EnrichConfig {
  std::size_t max_phrases = 5;
  int pro_min_stars = 4;
  int con_max_stars = 2;
  // Sentiment-bearing adjectives; a review sentence is kept only if it
  // contains one of these as a whole token.
  std::set<std::string> lexicon;

  static EnrichConfig defaults();
};

void to_json(Json& j, const EnrichConfig& c);
void from_json(const Json& j, EnrichConfig& c);

struct EnrichmentResult {
  std::map<std::string, Enrichment> entries;
  std::vector<std::string> warnings;
};

// Attribute snapshot plus pros (stars >= 4) and cons (stars <= 2): review
// sentences containing a lexicon word, normalized, ranked by frequency, then
// shorter first, then lexicographically.
EnrichmentResult enrich_candidates(const catalog::Catalog& cat, const std::vector<std::string>& ids,
                                   const EnrichConfig& config);

struct ProductSearchOptions {
  std::size_t k = 5;
  double rrf_k = 60.0;
  EnrichConfig enrich = EnrichConfig::defaults();
};

// BM25 and vector search, each to depth 2k, fused by RRF. Vector hits with
// cosine <= 0 share nothing with the query and are dropped before fusion.
// Hard constraints then filter; soft ones are left to the decider.
CandidateSet product_search(const catalog::Catalog& cat, const std::string& query,
                            const std::vector<planner::Constraint>& constraints,
                            const ProductSearchOptions& options);

}  // namespace cogsearch::executor
