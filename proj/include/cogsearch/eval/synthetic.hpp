#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cogsearch/catalog/catalog.hpp"
#include "cogsearch/memory/session_context.hpp"
#include "cogsearch/planner/constraint.hpp"

namespace cogsearch::eval {

using Json = nlohmann::json;

struct SyntheticOptions {
  std::size_t products = 10'000;
  std::uint64_t seed = 7;
  std::size_t max_reviews_per_product = 3;
  std::size_t docs_per_leaf = 12;
  Timestamp as_of = parse_rfc3339("2026-06-01T00:00:00Z");
};

struct SyntheticData {
  std::vector<catalog::Product> products;
  std::vector<catalog::Review> reviews;
  std::vector<catalog::WebDocument> webdocs;
};

// Seeded product catalog over a fixed set of leaf categories. Titles are
// "<Brand> <CODE> <leaf>" with a unique code; brand names never occur inside
// any other text field, so "without <Brand>" filters exactly that brand.
SyntheticData generate_synthetic_catalog(const SyntheticOptions& options);

std::shared_ptr<const catalog::Catalog> build_catalog(const SyntheticData& data);

// products.jsonl, reviews.jsonl, webdocs.jsonl under dir.
void write_jsonl(const std::filesystem::path& dir, const SyntheticData& data);

enum class CaseCategory { kSimple, kComplex, kConsultative };

std::string_view to_string(CaseCategory c);
CaseCategory case_category_from_string(std::string_view s);

struct BenchmarkCase {
  std::string id;
  std::string query;
  CaseCategory category = CaseCategory::kSimple;
  std::set<std::string> gold_items;
  std::optional<memory::SessionContext> context;
  // Complex cases: the leaf category and the predicates the gold set was
  // filtered by, so the gold set can be re-derived.
  std::string leaf;
  std::vector<planner::Constraint> predicates;
};

void to_json(Json& j, const BenchmarkCase& c);
void from_json(const Json& j, BenchmarkCase& c);

std::vector<BenchmarkCase> read_benchmark(const std::filesystem::path& path);
void write_benchmark(const std::filesystem::path& path, const std::vector<BenchmarkCase>& cases);

struct BenchmarkCounts {
  std::size_t simple = 100;
  std::size_t complex = 100;
  std::size_t consultative = 100;
};

// Products of `leaf` satisfying every predicate (exhaustive scan).
std::set<std::string> filter_gold(const catalog::Catalog& cat, const std::string& leaf,
                                  const std::vector<planner::Constraint>& predicates);

// simple: verbatim titles, every 4th case a bare leaf category (gold = the
// whole category). complex: "<leaf> under $X without <Brand>", "<leaf> with
// color <c> under $X" or "<leaf> >=<v><unit> <attr> without <Brand>", gold =
// exhaustive filter. consultative: "best <leaf> for <activity>", gold = the
// category's 5 highest-rated items. Cases that cannot be built (no eligible
// items) are skipped and explained in `notes`. Throws ValidationError on an
// empty catalog.
std::vector<BenchmarkCase> generate_synthetic_benchmark(const catalog::Catalog& cat,
                                                        std::uint64_t seed,
                                                        const BenchmarkCounts& counts,
                                                        std::vector<std::string>* notes = nullptr);

}  // namespace cogsearch::eval
