#include "cogsearch/catalog/catalog.hpp"

#include <fstream>
#include <stdexcept>

#include "cogsearch/util/text.hpp"

namespace cogsearch::catalog {

void to_json(Json& j, const IngestReport& r) {
  Json rejected = Json::array();
  for (const auto& x : r.rejected) {
    rejected.push_back({{"line", x.line}, {"id", x.id}, {"reason", x.reason}});
  }
  j = Json{{"source", r.source}, {"accepted", r.accepted}, {"rejected", rejected.size()},
           {"rejections", rejected}};
}

const Product* Catalog::find(const std::string& id) const {
  auto it = product_pos_.find(id);
  return it == product_pos_.end() ? nullptr : &products_[it->second];
}

const WebDocument* Catalog::find_webdoc(const std::string& id) const {
  auto it = webdoc_pos_.find(id);
  return it == webdoc_pos_.end() ? nullptr : &webdocs_[it->second];
}

std::vector<const Review*> Catalog::reviews_for(const std::string& product_id) const {
  std::vector<const Review*> out;
  auto it = reviews_.find(product_id);
  if (it == reviews_.end()) return out;
  for (const auto& r : it->second) out.push_back(&r);
  return out;
}

std::string Catalog::indexed_text(const Product& p) {
  std::string out = p.title;
  for (const auto& c : p.category_path) out += " " + c;
  for (const auto& [name, v] : p.attributes) {
    if (!v.is_number()) out += " " + v.str();
  }
  return out;
}

std::string Catalog::indexed_text(const WebDocument& d) { return d.title + " " + d.body; }

CatalogBuilder::CatalogBuilder(std::shared_ptr<const Embedder> embedder)
    : cat_(std::make_unique<Catalog>()) {
  cat_->embedder_ = embedder ? std::move(embedder) : std::make_shared<HashingEmbedder>();
}

namespace {

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

template <typename Record, typename Add>
IngestReport ingest_lines(std::istream& in, std::string source, Add&& add) {
  IngestReport report;
  report.source = std::move(source);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    std::string id;
    try {
      auto j = Json::parse(line);
      if (j.is_object() && j.contains("id") && j["id"].is_string()) id = j["id"];
      Record rec = j.get<Record>();
      add(std::move(rec));
      ++report.accepted;
    } catch (const Json::parse_error&) {
      report.rejected.push_back({lineno, id, "malformed line"});
    } catch (const std::exception& e) {
      report.rejected.push_back({lineno, id, e.what()});
    }
  }
  return report;
}

}  // namespace

IngestReport CatalogBuilder::add_products_jsonl(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return add_products_jsonl(in, path.string());
}

IngestReport CatalogBuilder::add_reviews_jsonl(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return add_reviews_jsonl(in, path.string());
}

IngestReport CatalogBuilder::add_webdocs_jsonl(const std::filesystem::path& path,
                                               Timestamp ingestion_time) {
  auto in = open_or_throw(path);
  return add_webdocs_jsonl(in, path.string(), ingestion_time);
}

IngestReport CatalogBuilder::add_products_jsonl(std::istream& in, std::string source) {
  return ingest_lines<Product>(in, std::move(source), [&](Product p) { add_product(std::move(p)); });
}

IngestReport CatalogBuilder::add_reviews_jsonl(std::istream& in, std::string source) {
  return ingest_lines<Review>(in, std::move(source), [&](Review r) { add_review(std::move(r)); });
}

IngestReport CatalogBuilder::add_webdocs_jsonl(std::istream& in, std::string source,
                                               Timestamp ingestion_time) {
  return ingest_lines<WebDocument>(in, std::move(source), [&](WebDocument d) {
    if (d.published_at > ingestion_time) {
      throw std::invalid_argument("published_at after ingestion time");
    }
    add_webdoc(std::move(d));
  });
}

void CatalogBuilder::add_product(Product p) {
  if (!cat_) throw std::logic_error("builder already consumed");
  validate(p);
  if (cat_->product_pos_.count(p.id)) throw std::invalid_argument("duplicate id");
  cat_->product_pos_.emplace(p.id, cat_->products_.size());
  cat_->products_.push_back(std::move(p));
}

void CatalogBuilder::add_review(Review r) {
  if (!cat_) throw std::logic_error("builder already consumed");
  validate(r);
  if (!cat_->product_pos_.count(r.product_id)) {
    throw std::invalid_argument("unknown product_id " + r.product_id);
  }
  auto& bucket = cat_->reviews_[r.product_id];
  for (const auto& existing : bucket) {
    if (existing.id == r.id) throw std::invalid_argument("duplicate id");
  }
  bucket.push_back(std::move(r));
  ++cat_->review_count_;
}

void CatalogBuilder::add_webdoc(WebDocument d) {
  if (!cat_) throw std::logic_error("builder already consumed");
  if (d.id.empty()) throw std::invalid_argument("empty id");
  if (cat_->webdoc_pos_.count(d.id)) throw std::invalid_argument("duplicate id");
  cat_->webdoc_pos_.emplace(d.id, cat_->webdocs_.size());
  cat_->webdocs_.push_back(std::move(d));
}

std::shared_ptr<const Catalog> CatalogBuilder::build() {
  if (!cat_) throw std::logic_error("builder already consumed");
  auto& c = *cat_;
  std::vector<std::pair<std::string, std::string>> docs;
  docs.reserve(c.products_.size());
  for (const auto& p : c.products_) {
    docs.emplace_back(p.id, Catalog::indexed_text(p));
    c.leaves_.insert(p.leaf_category());
    for (const auto& [name, v] : p.attributes) {
      auto& info = c.schema_[name];
      if (info.count == 0) {
        info.numeric = v.is_number();
        info.unit = v.unit;
      } else if (info.numeric != v.is_number()) {
        info.numeric = false;
      }
      ++info.count;
    }
  }
  c.product_lexical_ = LexicalIndex(docs);
  c.product_vectors_ = VectorIndex(c.embedder_, docs);

  docs.clear();
  for (const auto& d : c.webdocs_) docs.emplace_back(d.id, Catalog::indexed_text(d));
  c.web_lexical_ = LexicalIndex(docs);
  c.web_vectors_ = VectorIndex(c.embedder_, docs);

  return std::shared_ptr<const Catalog>(cat_.release());
}

std::shared_ptr<const Catalog> empty_catalog() { return CatalogBuilder().build(); }

}  // namespace cogsearch::catalog
