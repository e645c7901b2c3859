#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cogsearch/error.hpp"
#include "cogsearch/executor/types.hpp"

namespace cogsearch::executor {

enum class FieldType { kString, kNumber, kBool, kArray, kObject, kAny };

std::string_view to_string(FieldType t);
FieldType field_type_from_string(std::string_view s);

// Required fields and their types. Extra fields are allowed.
using Schema = std::map<std::string, FieldType>;

// Returns the first violation, or empty if `value` is an object matching
// the schema.
std::string check_schema(const Json& value, const Schema& schema);

struct ToolSpec {
  std::string name;
  Schema args;
  Schema result;
  std::chrono::milliseconds timeout{2000};
  std::function<Json(const Json&)> handler;
};

class ToolError : public Error {
 public:
  ToolError(TaskErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  TaskErrorKind kind() const { return kind_; }

 private:
  TaskErrorKind kind_;
};

// Deterministic fixture tables behind the shipped stubs.
struct StubFixtures {
  // zip -> eta days; "*" is the fallback for unknown zips.
  std::map<std::string, double> eta_days;
  // location -> {"condition", "temp_c", "delivery_delay_days"}; "*" fallback.
  std::map<std::string, Json> weather;
  std::vector<std::string> trends;

  static StubFixtures defaults();
};

void to_json(Json& j, const StubFixtures& f);
void from_json(const Json& j, StubFixtures& f);

class ToolRegistry {
 public:
  // Throws ValidationError on an empty name, missing handler or duplicate.
  void register_tool(ToolSpec spec);
  bool contains(const std::string& name) const { return tools_.count(name) > 0; }
  std::vector<std::string> names() const;

  // Validates args, runs the handler under the tool's timeout and validates
  // the result. Throws ToolError with kind unknown_tool, invalid_arguments,
  // timeout, schema_invalid or handler_error. A timed-out handler keeps
  // running detached; its result is discarded.
  Json invoke(const std::string& name, const Json& args) const;

  // logistics_eta, weather and price_history backed by `fixtures`.
  static ToolRegistry with_stubs(const StubFixtures& fixtures = StubFixtures::defaults());

 private:
  std::map<std::string, ToolSpec> tools_;
};

}  // namespace cogsearch::executor
