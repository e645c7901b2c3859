#include "cogsearch/catalog/lexical_index.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "cogsearch/util/text.hpp"

namespace cogsearch::catalog {

namespace {

void rank(std::vector<ScoredDoc>& docs, std::size_t k) {
  auto cmp = [](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  };
  if (docs.size() > k) {
    std::partial_sort(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(k), docs.end(),
                      cmp);
    docs.resize(k);
  } else {
    std::sort(docs.begin(), docs.end(), cmp);
  }
}

}  // namespace

LexicalIndex::LexicalIndex(const std::vector<std::pair<std::string, std::string>>& docs,
                           Bm25Params params)
    : params_(params) {
  ids_.reserve(docs.size());
  lengths_.reserve(docs.size());
  double total = 0.0;
  for (const auto& [id, body] : docs) {
    const auto ordinal = static_cast<std::uint32_t>(ids_.size());
    ids_.push_back(id);
    auto tokens = text::tokenize(body);
    lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
    total += static_cast<double>(tokens.size());
    std::map<std::string, std::uint32_t> tf;
    for (auto& t : tokens) ++tf[t];
    for (auto& [term, count] : tf) postings_[term].push_back({ordinal, count});
  }
  avg_len_ = ids_.empty() ? 0.0 : total / static_cast<double>(ids_.size());
}

const std::vector<LexicalIndex::Posting>* LexicalIndex::postings(const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? nullptr : &it->second;
}

std::vector<ScoredDoc> LexicalIndex::search(std::string_view query, std::size_t k) const {
  if (k == 0 || ids_.empty()) return {};
  auto terms = text::tokenize(query);
  std::set<std::string> unique(terms.begin(), terms.end());
  const double n = static_cast<double>(ids_.size());
  std::unordered_map<std::uint32_t, double> acc;
  for (const auto& term : unique) {
    const auto* plist = postings(term);
    if (!plist) continue;
    const double df = static_cast<double>(plist->size());
    const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    for (const auto& p : *plist) {
      const double tf = p.tf;
      const double norm =
          params_.k1 * (1.0 - params_.b + params_.b * lengths_[p.doc] / avg_len_);
      acc[p.doc] += idf * tf * (params_.k1 + 1.0) / (tf + norm);
    }
  }
  std::vector<ScoredDoc> out;
  out.reserve(acc.size());
  for (const auto& [doc, score] : acc) out.push_back({ids_[doc], score});
  rank(out, k);
  return out;
}

}  // namespace cogsearch::catalog
