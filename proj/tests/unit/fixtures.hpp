#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cogsearch/catalog/catalog.hpp"
#include "cogsearch/eval/synthetic.hpp"
#include "cogsearch/executor/types.hpp"

namespace fixtures {

using cogsearch::catalog::AttributeValue;
using cogsearch::catalog::Attributes;
using cogsearch::catalog::Product;

inline Product product(std::string id, std::string title, std::string leaf, double price,
                       double rating = 4.0, Attributes attrs = {}) {
  Product p;
  p.id = std::move(id);
  p.title = std::move(title);
  p.category_path = {"Electronics", std::move(leaf)};
  p.price = price;
  p.rating = rating;
  p.attributes = std::move(attrs);
  return p;
}

// Six headphones/earbuds with reviews and two web docs.
inline std::shared_ptr<const cogsearch::catalog::Catalog> small_catalog() {
  cogsearch::catalog::CatalogBuilder b;
  b.add_product(product("h1", "Sony WH-1000XM5 wireless headphones", "headphones", 349.0, 4.7,
                        {{"color", "black"}, {"weight", AttributeValue(250.0, "g")},
                         {"battery_life", AttributeValue(30.0, "h")}, {"brand", "Sony"}}));
  b.add_product(product("h2", "Bose QuietComfort wireless headphones", "headphones", 299.0, 4.5,
                        {{"color", "white"}, {"weight", AttributeValue(240.0, "g")},
                         {"battery_life", AttributeValue(24.0, "h")}, {"brand", "Bose"}}));
  b.add_product(product("h3", "Anker Soundcore Q30 headphones", "headphones", 79.0, 4.3,
                        {{"color", "black"}, {"weight", AttributeValue(260.0, "g")},
                         {"battery_life", AttributeValue(40.0, "h")}, {"brand", "Anker"}}));
  b.add_product(product("h4", "JBL Tune 510 wired headphones", "headphones", 49.0, 4.1,
                        {{"color", "blue"}, {"weight", AttributeValue(160.0, "g")},
                         {"brand", "JBL"}}));
  b.add_product(product("e1", "Sony WF-1000XM4 earbuds", "earbuds", 279.0, 4.4,
                        {{"color", "black"}, {"battery_life", AttributeValue(8.0, "h")},
                         {"brand", "Sony"}}));
  b.add_product(product("e2", "Apple AirPods Pro earbuds", "earbuds", 249.0, 4.6,
                        {{"color", "white"}, {"battery_life", AttributeValue(6.0, "h")},
                         {"brand", "Apple"}}));
  auto review = [&](std::string id, std::string pid, int stars, std::string text) {
    b.add_review({std::move(id), std::move(pid), std::move(text), stars});
  };
  review("r1", "h1", 5, "Great noise cancelling. Very comfortable.");
  review("r2", "h1", 5, "Great noise cancelling. Battery is long.");
  review("r3", "h1", 1, "Flimsy hinge. It broke.");
  review("r4", "h3", 4, "Excellent value.");
  review("r5", "h4", 2, "Sound is poor.");
  const auto t = cogsearch::parse_rfc3339("2026-05-01T00:00:00Z");
  b.add_webdoc({"w1", "https://www.rtings.com/headphones", "rtings", "Best wireless headphones",
                "The Sony WH-1000XM5 wireless headphones lead on noise cancelling and battery "
                "life. The Bose QuietComfort is lighter.",
                t});
  b.add_webdoc({"w2", "https://forum.example/thread", "forum", "Cheap headphones thread",
                "Anker Soundcore Q30 is the budget pick for headphones.", t});
  return b.build();
}

// A cached 2,000-item synthetic catalog shared by the heavier tests.
inline std::shared_ptr<const cogsearch::catalog::Catalog> synthetic_catalog() {
  static const auto cat = [] {
    cogsearch::eval::SyntheticOptions o;
    o.products = 2000;
    o.seed = 3;
    return cogsearch::eval::build_catalog(cogsearch::eval::generate_synthetic_catalog(o));
  }();
  return cat;
}

inline cogsearch::executor::CandidateSet candidates(const cogsearch::catalog::Catalog& cat,
                                                    const std::vector<std::string>& ids) {
  cogsearch::executor::CandidateSet cs;
  double score = 1.0;
  for (const auto& id : ids) {
    cs.items.push_back({id, score});
    score -= 0.01;
    cs.enriched[id] = {*cat.find(id), {}, {}};
  }
  return cs;
}

}  // namespace fixtures
