#include "cogsearch/catalog/vector_index.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "cogsearch/simd/kernels.hpp"

namespace cogsearch::catalog {

VectorIndex::VectorIndex(std::shared_ptr<const Embedder> embedder,
                         const std::vector<std::pair<std::string, std::string>>& docs)
    : embedder_(std::move(embedder)), dim_(embedder_->dim()) {
  ids_.reserve(docs.size());
  rows_.reserve(docs.size() * dim_);
  for (const auto& [id, body] : docs) {
    by_id_.emplace(id, ids_.size());
    ids_.push_back(id);
    auto v = embedder_->embed(body);
    rows_.insert(rows_.end(), v.begin(), v.end());
  }
}

std::vector<ScoredDoc> VectorIndex::search(std::string_view query, std::size_t k) const {
  if (!embedder_) return {};
  auto q = embedder_->embed(query);
  return search(std::span<const float>(q), k);
}

std::vector<ScoredDoc> VectorIndex::search(std::span<const float> query, std::size_t k) const {
  if (query.size() != dim_) throw std::invalid_argument("query dim mismatch");
  std::vector<double> scores(ids_.size());
  simd::dot_rows(rows_, query, scores);
  std::vector<std::size_t> order(ids_.size());
  std::iota(order.begin(), order.end(), 0);
  auto cmp = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids_[a] < ids_[b];
  };
  k = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    cmp);
  std::vector<ScoredDoc> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back({ids_[order[i]], scores[order[i]]});
  return out;
}

std::optional<std::span<const float>> VectorIndex::vector(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return std::span<const float>(rows_.data() + it->second * dim_, dim_);
}

}  // namespace cogsearch::catalog
