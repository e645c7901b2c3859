#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "cogsearch/catalog/index_dir.hpp"
#include "fixtures.hpp"

using namespace cogsearch;
using namespace cogsearch::catalog;

// Reference values below come from tests/oracles/oracles.py (frozen.json).

TEST(Embedding, MatchesOracleBuckets) {
  HashingEmbedder e(256);
  const auto v = e.embed("red shoes");
  const double m = 0.35355339059327373;
  const std::map<int, double> want = {{45, m},  {89, m},   {95, -m},  {120, -m},
                                      {186, m}, {206, m},  {211, -m}, {228, m}};
  for (int i = 0; i < 256; ++i) {
    const auto it = want.find(i);
    EXPECT_NEAR(v[i], it == want.end() ? 0.0 : it->second, 1e-7) << "bucket " << i;
  }
}

TEST(Embedding, CosineMatchesOracle) {
  HashingEmbedder e;
  EXPECT_NEAR(cosine(e.embed("wireless noise cancelling headphones"),
                     e.embed("noise cancelling wireless earbuds")),
              0.7548398491282623, 1e-6);
}

TEST(Embedding, DeterministicUnitNormAndEmptyIsZero) {
  HashingEmbedder e;
  const auto a = e.embed("Wireless Headphones"), b = e.embed("wireless headphones");
  EXPECT_EQ(a, b);
  double n = 0;
  for (float x : a) n += double(x) * x;
  EXPECT_NEAR(n, 1.0, 1e-6);
  for (float x : e.embed(" ,. ")) EXPECT_EQ(x, 0.0f);
  EXPECT_EQ(cosine(e.embed(""), a), 0.0);
}

TEST(Catalog, Bm25MatchesOracle) {
  LexicalIndex idx({{"d1", "red running shoes"},
                    {"d2", "blue running shoes for trail running"},
                    {"d3", "red dress"},
                    {"d4", "wireless headphones red edition"}});
  const auto hits = idx.search("red running", 10);
  ASSERT_EQ(hits.size(), 4u);
  const std::vector<std::pair<std::string, double>> want = {{"d1", 1.1433706306421243},
                                                            {"d2", 0.8154672712469945},
                                                            {"d3", 0.44083420037371424},
                                                            {"d4", 0.34720569763947406}};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(hits[i].id, want[i].first);
    EXPECT_NEAR(hits[i].score, want[i].second, 1e-12);
  }
  const auto trail = idx.search("trail", 10);
  ASSERT_EQ(trail.size(), 1u);
  EXPECT_NEAR(trail[0].score, 0.9666934925244742, 1e-12);
  EXPECT_NEAR(idx.avg_doc_length(), 15.0 / 4.0, 1e-12);
  EXPECT_TRUE(idx.search("zebra", 10).empty());
}

TEST(Catalog, Bm25TiesByAscendingId) {
  LexicalIndex idx({{"b", "same text"}, {"a", "same text"}, {"c", "same text"}});
  const auto hits = idx.search("same", 10);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].id, "a");
  EXPECT_EQ(hits[1].id, "b");
  EXPECT_EQ(hits[2].id, "c");
  EXPECT_EQ(idx.search("same", 2).size(), 2u);
}

TEST(Catalog, Bm25MoreMatchingTermsNeverScoresLower) {
  // Same length docs; adding a query term occurrence must not lower the score.
  LexicalIndex idx({{"x", "red shoes cheap fast"}, {"y", "red red cheap fast"}, {"z", "blue a b c"}});
  const auto hits = idx.search("red", 10);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].id, "y");
}

TEST(VectorIndex, ExactCosineOrdering) {
  auto e = std::make_shared<HashingEmbedder>();
  VectorIndex idx(e, {{"b", "wireless headphones"}, {"a", "wireless headphones"}, {"c", "red dress"}});
  const auto hits = idx.search("wireless headphones", 3);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].id, "a");  // exact tie with b, lower id first
  EXPECT_EQ(hits[1].id, "b");
  EXPECT_NEAR(hits[0].score, 1.0, 1e-6);
  EXPECT_LT(hits[2].score, hits[1].score);
  for (const auto& h : idx.search("", 3)) EXPECT_EQ(h.score, 0.0);
}

TEST(Catalog, IngestReportsBadLinesWithLineNumbers) {
  CatalogBuilder b;
  std::istringstream in(
      R"({"id":"p1","title":"A","category_path":["x"],"price":1,"rating":4})"
      "\n"
      R"({"id":"p1","title":"dup","category_path":["x"],"price":1,"rating":4})"
      "\n"
      "not json\n"
      R"({"id":"p2","title":"B","category_path":["x"],"price":-3,"rating":4})"
      "\n"
      "\n"
      R"({"id":"p3","title":"C","category_path":["x"],"price":3,"rating":4})"
      "\n");
  const auto r = b.add_products_jsonl(in, "mem");
  EXPECT_EQ(r.accepted, 2u);
  ASSERT_EQ(r.rejected.size(), 3u);
  EXPECT_EQ(r.rejected[0].line, 2u);
  EXPECT_NE(r.rejected[0].reason.find("duplicate"), std::string::npos);
  EXPECT_EQ(r.rejected[1].line, 3u);
  EXPECT_EQ(r.rejected[2].line, 4u);
  const auto cat = b.build();
  EXPECT_EQ(cat->products().size(), 2u);
  EXPECT_NE(cat->find("p3"), nullptr);
}

TEST(Catalog, ReviewsAndWebdocsValidated) {
  CatalogBuilder b;
  b.add_product(fixtures::product("p1", "T", "leaf", 1.0));
  std::istringstream reviews(R"({"id":"r1","product_id":"p1","text":"ok","stars":4})"
                             "\n"
                             R"({"id":"r2","product_id":"nope","text":"ok","stars":4})"
                             "\n"
                             R"({"id":"r3","product_id":"p1","text":"ok","stars":9})"
                             "\n");
  const auto rr = b.add_reviews_jsonl(reviews, "reviews");
  EXPECT_EQ(rr.accepted, 1u);
  EXPECT_EQ(rr.rejected.size(), 2u);
  const auto now = parse_rfc3339("2026-01-01T00:00:00Z");
  std::istringstream docs(R"({"id":"w1","url":"u","source":"s","title":"t","body":"b","published_at":"2025-12-01T00:00:00Z"})"
                          "\n"
                          R"({"id":"w2","url":"u","source":"s","title":"t","body":"b","published_at":"2027-01-01T00:00:00Z"})"
                          "\n");
  const auto wr = b.add_webdocs_jsonl(docs, "docs", now);
  EXPECT_EQ(wr.accepted, 1u);
  ASSERT_EQ(wr.rejected.size(), 1u);
  EXPECT_EQ(wr.rejected[0].line, 2u);
}

TEST(Catalog, SchemaAndLeaves) {
  const auto cat = fixtures::small_catalog();
  EXPECT_EQ(cat->leaf_categories(), (std::set<std::string>{"earbuds", "headphones"}));
  const auto& s = cat->attribute_schema();
  EXPECT_TRUE(s.at("weight").numeric);
  EXPECT_EQ(s.at("weight").unit, "g");
  EXPECT_FALSE(s.at("color").numeric);
  EXPECT_EQ(cat->reviews_for("h1").size(), 3u);
}

TEST(Catalog, IndexDirRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "cogsearch_index_rt";
  std::filesystem::remove_all(dir);
  const auto cat = fixtures::small_catalog();
  save_index(dir, *cat, parse_rfc3339("2026-06-01T00:00:00Z"));
  const auto back = load_index(dir);
  EXPECT_EQ(back->products(), cat->products());
  EXPECT_EQ(back->review_count(), cat->review_count());
  ASSERT_EQ(back->webdocs().size(), cat->webdocs().size());
  EXPECT_EQ(back->bm25_search("wireless headphones", 5), cat->bm25_search("wireless headphones", 5));
  std::filesystem::remove(dir / "manifest.json");
  EXPECT_THROW(load_index(dir), std::runtime_error);
  std::filesystem::remove_all(dir);
}
