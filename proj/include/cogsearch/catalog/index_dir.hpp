#pragma once

#include <filesystem>
#include <memory>
#include <optional>

#include "cogsearch/catalog/catalog.hpp"

namespace cogsearch::catalog {

inline constexpr int kIndexFormatVersion = 1;

// An index directory holds the accepted records as products.jsonl,
// reviews.jsonl and webdocs.jsonl plus manifest.json
// {"format_version", "ingested_at", "counts"}. Indexes are rebuilt on load,
// which is deterministic and fast at catalog scale.
void save_index(const std::filesystem::path& dir, const Catalog& cat, Timestamp ingested_at);

// Throws std::runtime_error on a missing or unreadable directory and
// ValidationError when the manifest or any record is invalid.
std::shared_ptr<const Catalog> load_index(const std::filesystem::path& dir);

}  // namespace cogsearch::catalog
