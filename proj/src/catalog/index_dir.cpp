#include "cogsearch/catalog/index_dir.hpp"

#include <fstream>

#include "cogsearch/error.hpp"

namespace cogsearch::catalog {

namespace {

template <class T>
void dump(const std::filesystem::path& path, const std::vector<T>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : rows) out << Json(r).dump() << '\n';
}

void require_clean(const IngestReport& r) {
  if (!r.rejected.empty()) {
    const auto& x = r.rejected.front();
    throw ValidationError(r.source + ":" + std::to_string(x.line) + ": " + x.reason);
  }
}

}  // namespace

void save_index(const std::filesystem::path& dir, const Catalog& cat, Timestamp ingested_at) {
  std::filesystem::create_directories(dir);
  std::vector<Review> reviews;
  for (const auto& p : cat.products()) {
    for (const auto* r : cat.reviews_for(p.id)) reviews.push_back(*r);
  }
  dump(dir / "products.jsonl", cat.products());
  dump(dir / "reviews.jsonl", reviews);
  dump(dir / "webdocs.jsonl", cat.webdocs());
  const Json manifest{{"format_version", kIndexFormatVersion},
                      {"ingested_at", format_rfc3339(ingested_at)},
                      {"counts",
                       {{"products", cat.products().size()},
                        {"reviews", reviews.size()},
                        {"webdocs", cat.webdocs().size()}}}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

std::shared_ptr<const Catalog> load_index(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("no index at " + dir.string() + " (manifest.json missing)");
  Json manifest;
  try {
    manifest = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ValidationError("manifest.json: " + std::string(e.what()));
  }
  if (manifest.value("format_version", 0) != kIndexFormatVersion) {
    throw ValidationError("manifest.json: unsupported format_version");
  }
  const auto ingested = parse_rfc3339(manifest.at("ingested_at").get<std::string>());
  CatalogBuilder b;
  require_clean(b.add_products_jsonl(dir / "products.jsonl"));
  require_clean(b.add_reviews_jsonl(dir / "reviews.jsonl"));
  require_clean(b.add_webdocs_jsonl(dir / "webdocs.jsonl", ingested));
  return b.build();
}

}  // namespace cogsearch::catalog
