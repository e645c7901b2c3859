#include "cogsearch/catalog/types.hpp"

#include <cmath>
#include <stdexcept>

#include "cogsearch/util/text.hpp"

namespace cogsearch::catalog {

std::string AttributeValue::display() const {
  if (is_number()) return text::format_number(number()) + unit;
  return str();
}

void validate(const Product& p) {
  if (p.id.empty()) throw std::invalid_argument("empty id");
  if (p.category_path.empty()) throw std::invalid_argument("empty category_path");
  if (!std::isfinite(p.price) || p.price < 0) throw std::invalid_argument("price must be >= 0");
  if (!std::isfinite(p.rating) || p.rating < 0 || p.rating > 5) {
    throw std::invalid_argument("rating must be in [0,5]");
  }
}

void validate(const Review& r) {
  if (r.id.empty()) throw std::invalid_argument("empty id");
  if (r.stars < 1 || r.stars > 5) throw std::invalid_argument("stars must be in 1..5");
}

void to_json(Json& j, const AttributeValue& v) {
  if (!v.is_number()) {
    j = v.str();
  } else if (v.unit.empty()) {
    j = v.number();
  } else {
    j = Json{{"value", v.number()}, {"unit", v.unit}};
  }
}

void from_json(const Json& j, AttributeValue& v) {
  if (j.is_string()) {
    v = AttributeValue(j.get<std::string>());
  } else if (j.is_number()) {
    v = AttributeValue(j.get<double>());
  } else if (j.is_object() && j.contains("value") && j.at("value").is_number()) {
    v = AttributeValue(j.at("value").get<double>(), j.value("unit", std::string{}));
  } else {
    throw std::invalid_argument("attribute value must be string, number or {value,unit}");
  }
}

void to_json(Json& j, const Product& p) {
  j = Json{{"id", p.id},
           {"title", p.title},
           {"category_path", p.category_path},
           {"attributes", p.attributes},
           {"price", p.price},
           {"rating", p.rating},
           {"review_ids", p.review_ids}};
}

void from_json(const Json& j, Product& p) {
  p.id = j.at("id").get<std::string>();
  p.title = j.at("title").get<std::string>();
  p.category_path = j.at("category_path").get<std::vector<std::string>>();
  p.attributes.clear();
  if (j.contains("attributes")) {
    const auto& attrs = j.at("attributes");
    if (!attrs.is_object()) throw std::invalid_argument("attributes must be a flat object");
    for (auto it = attrs.begin(); it != attrs.end(); ++it) {
      p.attributes[it.key()] = it.value().get<AttributeValue>();
    }
  }
  p.price = j.at("price").get<double>();
  p.rating = j.at("rating").get<double>();
  p.review_ids = j.value("review_ids", std::vector<std::string>{});
}

void to_json(Json& j, const Review& r) {
  j = Json{{"id", r.id}, {"product_id", r.product_id}, {"text", r.text}, {"stars", r.stars}};
}

void from_json(const Json& j, Review& r) {
  r.id = j.at("id").get<std::string>();
  r.product_id = j.at("product_id").get<std::string>();
  r.text = j.at("text").get<std::string>();
  r.stars = j.at("stars").get<int>();
}

void to_json(Json& j, const WebDocument& d) {
  j = Json{{"id", d.id},       {"url", d.url},   {"source", d.source},
           {"title", d.title}, {"body", d.body}, {"published_at", format_rfc3339(d.published_at)}};
}

void from_json(const Json& j, WebDocument& d) {
  d.id = j.at("id").get<std::string>();
  d.url = j.value("url", std::string{});
  d.source = j.at("source").get<std::string>();
  d.title = j.at("title").get<std::string>();
  d.body = j.at("body").get<std::string>();
  d.published_at = parse_rfc3339(j.at("published_at").get<std::string>());
}

}  // namespace cogsearch::catalog
