#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "cogsearch/util/time.hpp"
#include "json.hpp"

namespace cogsearch::catalog {

using Json = nlohmann::json;

// A product attribute: free text, or a number with an optional unit tag.
struct AttributeValue {
  std::variant<std::string, double> value;
  std::string unit;

  AttributeValue() = default;
  AttributeValue(std::string s) : value(std::move(s)) {}
  AttributeValue(const char* s) : value(std::string(s)) {}
  AttributeValue(double v, std::string u = {}) : value(v), unit(std::move(u)) {}

  bool is_number() const { return std::holds_alternative<double>(value); }
  double number() const { return std::get<double>(value); }
  const std::string& str() const { return std::get<std::string>(value); }

  // "200g", "red", "8.5h".
  std::string display() const;

  friend bool operator==(const AttributeValue&, const AttributeValue&) = default;
};

using Attributes = std::map<std::string, AttributeValue>;

struct Product {
  std::string id;
  std::string title;
  std::vector<std::string> category_path;
  Attributes attributes;
  double price = 0.0;
  double rating = 0.0;
  std::vector<std::string> review_ids;

  const std::string& leaf_category() const { return category_path.back(); }

  friend bool operator==(const Product&, const Product&) = default;
};

struct Review {
  std::string id;
  std::string product_id;
  std::string text;
  int stars = 0;
};

struct WebDocument {
  std::string id;
  std::string url;
  std::string source;
  std::string title;
  std::string body;
  Timestamp published_at{};
};

// Throws std::invalid_argument with a human-readable reason when an
// invariant does not hold.
void validate(const Product& p);
void validate(const Review& r);

void to_json(Json& j, const AttributeValue& v);
void from_json(const Json& j, AttributeValue& v);
void to_json(Json& j, const Product& p);
void from_json(const Json& j, Product& p);
void to_json(Json& j, const Review& r);
void from_json(const Json& j, Review& r);
void to_json(Json& j, const WebDocument& d);
void from_json(const Json& j, WebDocument& d);

}  // namespace cogsearch::catalog
