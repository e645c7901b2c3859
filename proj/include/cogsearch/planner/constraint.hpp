#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cogsearch/catalog/types.hpp"
#include "json.hpp"

namespace cogsearch::planner {

using Json = nlohmann::json;

enum class ConstraintOp { kLe, kGe, kEq, kNe, kContains, kNotContains };
enum class Hardness { kHard, kSoft };

std::string_view to_string(ConstraintOp op);
ConstraintOp constraint_op_from_string(std::string_view s);

// A predicate over one product field.
//
// `attribute` names a product attribute, or one of the built-in fields
// "price", "rating", "title", "category", or "*" (title, categories and every
// text attribute). String comparisons are case-insensitive. A missing
// attribute satisfies only the negative ops (!=, not_contains).
struct Constraint {
  std::string attribute;
  ConstraintOp op = ConstraintOp::kEq;
  std::variant<std::string, double> value;
  Hardness hardness = Hardness::kHard;

  bool numeric() const { return std::holds_alternative<double>(value); }
  bool hard() const { return hardness == Hardness::kHard; }
  // "price <= 200", "display_type not_contains OLED".
  std::string describe() const;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

// Throws std::invalid_argument when ordering ops carry a text value.
void validate(const Constraint& c);

bool satisfies(const catalog::Product& p, const Constraint& c);

// Tightest price <= bound among the constraints, if any.
std::optional<double> price_ceiling(const std::vector<Constraint>& cs);

void to_json(Json& j, const Constraint& c);
void from_json(const Json& j, Constraint& c);

}  // namespace cogsearch::planner
