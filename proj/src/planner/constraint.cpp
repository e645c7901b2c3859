#include "cogsearch/planner/constraint.hpp"

#include <optional>
#include <stdexcept>

#include "cogsearch/util/text.hpp"

namespace cogsearch::planner {

namespace {

constexpr std::array<std::string_view, 6> kOpNames = {"<=", ">=", "=", "!=", "contains",
                                                      "not_contains"};

bool text_matches(ConstraintOp op, const std::string& field, const std::string& want) {
  switch (op) {
    case ConstraintOp::kEq:
    case ConstraintOp::kNe:
      return text::to_lower(field) == text::to_lower(want);
    default:
      return text::icontains(field, want);
  }
}

bool is_negative(ConstraintOp op) {
  return op == ConstraintOp::kNe || op == ConstraintOp::kNotContains;
}

bool compare_number(ConstraintOp op, double have, double want) {
  switch (op) {
    case ConstraintOp::kLe: return have <= want;
    case ConstraintOp::kGe: return have >= want;
    case ConstraintOp::kEq: return have == want;
    case ConstraintOp::kNe: return have != want;
    default: return false;
  }
}

// Positive test of one field; negative ops are handled by the caller.
bool field_test(ConstraintOp positive_op, const catalog::AttributeValue& v, const Constraint& c) {
  if (c.numeric()) {
    if (!v.is_number()) return false;
    return compare_number(positive_op, v.number(), std::get<double>(c.value));
  }
  const std::string& want = std::get<std::string>(c.value);
  return text_matches(positive_op, v.display(), want);
}

ConstraintOp positive(ConstraintOp op) {
  if (op == ConstraintOp::kNe) return ConstraintOp::kEq;
  if (op == ConstraintOp::kNotContains) return ConstraintOp::kContains;
  return op;
}

}  // namespace

std::string_view to_string(ConstraintOp op) { return kOpNames[static_cast<int>(op)]; }

ConstraintOp constraint_op_from_string(std::string_view s) {
  for (int i = 0; i < 6; ++i) {
    if (kOpNames[i] == s) return static_cast<ConstraintOp>(i);
  }
  if (s == "≤") return ConstraintOp::kLe;
  if (s == "≥") return ConstraintOp::kGe;
  if (s == "≠") return ConstraintOp::kNe;
  throw std::invalid_argument("unknown constraint op '" + std::string(s) + "'");
}

std::string Constraint::describe() const {
  std::string v = numeric() ? text::format_number(std::get<double>(value))
                            : std::get<std::string>(value);
  return attribute + " " + std::string(to_string(op)) + " " + v;
}

void validate(const Constraint& c) {
  if (c.attribute.empty()) throw std::invalid_argument("constraint attribute is empty");
  if ((c.op == ConstraintOp::kLe || c.op == ConstraintOp::kGe) && !c.numeric()) {
    throw std::invalid_argument("ordering op on non-numeric value");
  }
  if ((c.op == ConstraintOp::kContains || c.op == ConstraintOp::kNotContains) && c.numeric()) {
    throw std::invalid_argument("containment op on numeric value");
  }
}

bool satisfies(const catalog::Product& p, const Constraint& c) {
  const ConstraintOp pos = positive(c.op);
  const bool negative = is_negative(c.op);
  bool hit = false;
  if (c.attribute == "price") {
    hit = field_test(pos, catalog::AttributeValue(p.price), c);
  } else if (c.attribute == "rating") {
    hit = field_test(pos, catalog::AttributeValue(p.rating), c);
  } else if (c.attribute == "title") {
    hit = field_test(pos, catalog::AttributeValue(p.title), c);
  } else if (c.attribute == "category") {
    for (const auto& cat : p.category_path) {
      hit = hit || field_test(pos, catalog::AttributeValue(cat), c);
    }
  } else if (c.attribute == "*") {
    hit = field_test(pos, catalog::AttributeValue(p.title), c);
    for (const auto& cat : p.category_path) {
      hit = hit || field_test(pos, catalog::AttributeValue(cat), c);
    }
    for (const auto& [_, v] : p.attributes) hit = hit || field_test(pos, v, c);
  } else {
    auto it = p.attributes.find(c.attribute);
    if (it == p.attributes.end()) return negative;
    hit = field_test(pos, it->second, c);
  }
  return negative ? !hit : hit;
}

std::optional<double> price_ceiling(const std::vector<Constraint>& cs) {
  std::optional<double> out;
  for (const auto& c : cs) {
    if (c.attribute == "price" && c.op == ConstraintOp::kLe && c.numeric()) {
      double v = std::get<double>(c.value);
      if (!out || v < *out) out = v;
    }
  }
  return out;
}

void to_json(Json& j, const Constraint& c) {
  j = Json{{"attribute", c.attribute},
           {"op", to_string(c.op)},
           {"hardness", c.hard() ? "hard" : "soft"}};
  if (c.numeric()) {
    j["value"] = std::get<double>(c.value);
  } else {
    j["value"] = std::get<std::string>(c.value);
  }
}

void from_json(const Json& j, Constraint& c) {
  c.attribute = j.at("attribute").get<std::string>();
  c.op = constraint_op_from_string(j.at("op").get<std::string>());
  const auto& v = j.at("value");
  if (v.is_number()) {
    c.value = v.get<double>();
  } else {
    c.value = v.get<std::string>();
  }
  const auto h = j.value("hardness", std::string("hard"));
  if (h != "hard" && h != "soft") throw std::invalid_argument("hardness must be hard or soft");
  c.hardness = h == "hard" ? Hardness::kHard : Hardness::kSoft;
  validate(c);
}

}  // namespace cogsearch::planner
