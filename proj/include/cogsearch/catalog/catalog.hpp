#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "cogsearch/catalog/embedding.hpp"
#include "cogsearch/catalog/lexical_index.hpp"
#include "cogsearch/catalog/types.hpp"
#include "cogsearch/catalog/vector_index.hpp"

namespace cogsearch::catalog {

struct Rejection {
  std::size_t line = 0;
  std::string id;
  std::string reason;
};

struct IngestReport {
  std::string source;
  std::size_t accepted = 0;
  std::vector<Rejection> rejected;
};

void to_json(Json& j, const IngestReport& r);

// Per-attribute shape observed across the catalog.
struct AttributeInfo {
  bool numeric = false;
  std::string unit;
  std::size_t count = 0;
};

// Immutable product catalog, review corpus and local web corpus with their
// lexical and vector indexes. Safe for concurrent readers.
class Catalog {
 public:
  const std::vector<Product>& products() const { return products_; }
  const std::vector<WebDocument>& webdocs() const { return webdocs_; }
  std::size_t review_count() const { return review_count_; }

  const Product* find(const std::string& id) const;
  const WebDocument* find_webdoc(const std::string& id) const;
  std::vector<const Review*> reviews_for(const std::string& product_id) const;

  std::vector<ScoredDoc> bm25_search(std::string_view query, std::size_t k) const {
    return product_lexical_.search(query, k);
  }
  std::vector<ScoredDoc> vector_search(std::string_view query, std::size_t k) const {
    return product_vectors_.search(query, k);
  }
  std::vector<ScoredDoc> web_bm25_search(std::string_view query, std::size_t k) const {
    return web_lexical_.search(query, k);
  }

  const LexicalIndex& product_lexical() const { return product_lexical_; }
  const VectorIndex& product_vectors() const { return product_vectors_; }
  const VectorIndex& web_vectors() const { return web_vectors_; }
  const Embedder& embedder() const { return *embedder_; }
  std::shared_ptr<const Embedder> embedder_ptr() const { return embedder_; }

  const std::map<std::string, AttributeInfo>& attribute_schema() const { return schema_; }
  // Distinct leaf categories, ascending.
  const std::set<std::string>& leaf_categories() const { return leaves_; }

  // Text a product is indexed under: title, category path, then text
  // attribute values in attribute-name order.
  static std::string indexed_text(const Product& p);
  static std::string indexed_text(const WebDocument& d);

 private:
  friend class CatalogBuilder;

  std::shared_ptr<const Embedder> embedder_;
  std::vector<Product> products_;
  std::unordered_map<std::string, std::size_t> product_pos_;
  std::unordered_map<std::string, std::vector<Review>> reviews_;
  std::size_t review_count_ = 0;
  std::vector<WebDocument> webdocs_;
  std::unordered_map<std::string, std::size_t> webdoc_pos_;
  LexicalIndex product_lexical_;
  VectorIndex product_vectors_;
  LexicalIndex web_lexical_;
  VectorIndex web_vectors_;
  std::map<std::string, AttributeInfo> schema_;
  std::set<std::string> leaves_;
};

// Single-writer builder. Records are validated on the way in; build()
// produces the immutable catalog with all indexes.
class CatalogBuilder {
 public:
  explicit CatalogBuilder(std::shared_ptr<const Embedder> embedder = nullptr);

  // Each throws std::runtime_error if the file cannot be opened. Bad lines
  // are reported, never dropped silently.
  IngestReport add_products_jsonl(const std::filesystem::path& path);
  IngestReport add_reviews_jsonl(const std::filesystem::path& path);
  IngestReport add_webdocs_jsonl(const std::filesystem::path& path, Timestamp ingestion_time);

  IngestReport add_products_jsonl(std::istream& in, std::string source);
  IngestReport add_reviews_jsonl(std::istream& in, std::string source);
  IngestReport add_webdocs_jsonl(std::istream& in, std::string source, Timestamp ingestion_time);

  // Throw std::invalid_argument on invalid or duplicate records.
  void add_product(Product p);
  void add_review(Review r);
  void add_webdoc(WebDocument d);

  std::shared_ptr<const Catalog> build();

 private:
  std::unique_ptr<Catalog> cat_;
};

std::shared_ptr<const Catalog> empty_catalog();

}  // namespace cogsearch::catalog
