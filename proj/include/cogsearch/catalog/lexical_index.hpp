#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cogsearch::catalog {

struct ScoredDoc {
  std::string id;
  double score = 0.0;

  friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

// Okapi BM25 over an immutable document set.
//
//   idf(t)      = ln(1 + (N - df + 0.5) / (df + 0.5))
//   score(d, q) = sum over distinct query terms t of
//                 idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl))
class LexicalIndex {
 public:
  struct Posting {
    std::uint32_t doc;
    std::uint32_t tf;
  };

  LexicalIndex() = default;
  explicit LexicalIndex(const std::vector<std::pair<std::string, std::string>>& docs,
                        Bm25Params params = {});

  // Descending by score, ties by ascending doc id. Only docs sharing at
  // least one term with the query are returned.
  std::vector<ScoredDoc> search(std::string_view query, std::size_t k) const;

  std::size_t doc_count() const { return ids_.size(); }
  double avg_doc_length() const { return avg_len_; }
  std::uint32_t doc_length(std::size_t ordinal) const { return lengths_[ordinal]; }
  const std::string& doc_id(std::size_t ordinal) const { return ids_[ordinal]; }
  const std::vector<Posting>* postings(const std::string& term) const;
  const Bm25Params& params() const { return params_; }

 private:
  Bm25Params params_;
  std::vector<std::string> ids_;
  std::vector<std::uint32_t> lengths_;
  double avg_len_ = 0.0;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
};

}  // namespace cogsearch::catalog
