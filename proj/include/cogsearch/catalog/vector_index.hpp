#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cogsearch/catalog/embedding.hpp"
#include "cogsearch/catalog/lexical_index.hpp"

namespace cogsearch::catalog {

// Exact cosine search over a dense row-major matrix of unit vectors.
class VectorIndex {
 public:
  VectorIndex() = default;
  VectorIndex(std::shared_ptr<const Embedder> embedder,
              const std::vector<std::pair<std::string, std::string>>& docs);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }

  // Descending by cosine, ties by ascending doc id. Returns min(k, size())
  // entries; an empty query scores every doc 0.
  std::vector<ScoredDoc> search(std::string_view query, std::size_t k) const;
  std::vector<ScoredDoc> search(std::span<const float> query, std::size_t k) const;

  std::optional<std::span<const float>> vector(const std::string& id) const;

 private:
  std::shared_ptr<const Embedder> embedder_;
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> rows_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

}  // namespace cogsearch::catalog
