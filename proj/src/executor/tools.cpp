#include "cogsearch/executor/tools.hpp"

#include <algorithm>
#include <future>
#include <thread>

#include "cogsearch/util/text.hpp"

namespace cogsearch::executor {

std::string_view to_string(FieldType t) {
  switch (t) {
    case FieldType::kString: return "string";
    case FieldType::kNumber: return "number";
    case FieldType::kBool: return "bool";
    case FieldType::kArray: return "array";
    case FieldType::kObject: return "object";
    case FieldType::kAny: return "any";
  }
  return "?";
}

FieldType field_type_from_string(std::string_view s) {
  for (auto t : {FieldType::kString, FieldType::kNumber, FieldType::kBool, FieldType::kArray,
                 FieldType::kObject, FieldType::kAny}) {
    if (to_string(t) == s) return t;
  }
  throw ValidationError("unknown field type '" + std::string(s) + "'");
}

std::string check_schema(const Json& value, const Schema& schema) {
  if (!value.is_object()) return "expected an object";
  for (const auto& [field, type] : schema) {
    auto it = value.find(field);
    if (it == value.end()) return "missing field '" + field + "'";
    bool ok = true;
    switch (type) {
      case FieldType::kString: ok = it->is_string(); break;
      case FieldType::kNumber: ok = it->is_number(); break;
      case FieldType::kBool: ok = it->is_boolean(); break;
      case FieldType::kArray: ok = it->is_array(); break;
      case FieldType::kObject: ok = it->is_object(); break;
      case FieldType::kAny: break;
    }
    if (!ok) return "field '" + field + "' is not " + std::string(to_string(type));
  }
  return {};
}

StubFixtures StubFixtures::defaults() {
  StubFixtures f;
  f.eta_days = {{"100000", 2}, {"200000", 3}, {"310000", 3}, {"518000", 4}, {"*", 5}};
  f.weather = {
      {"beijing", {{"condition", "clear"}, {"temp_c", 12}, {"delivery_delay_days", 0}}},
      {"shanghai", {{"condition", "rain"}, {"temp_c", 18}, {"delivery_delay_days", 1}}},
      {"*", {{"condition", "unknown"}, {"temp_c", 15}, {"delivery_delay_days", 0}}}};
  f.trends = {"falling", "flat", "rising"};
  return f;
}

void to_json(Json& j, const StubFixtures& f) {
  j = Json{{"eta_days", f.eta_days}, {"weather", f.weather}, {"trends", f.trends}};
}

void from_json(const Json& j, StubFixtures& f) {
  f.eta_days = j.at("eta_days").get<std::map<std::string, double>>();
  f.weather = j.at("weather").get<std::map<std::string, Json>>();
  f.trends = j.at("trends").get<std::vector<std::string>>();
}

void ToolRegistry::register_tool(ToolSpec spec) {
  if (spec.name.empty()) throw ValidationError("tool name is empty");
  if (!spec.handler) throw ValidationError("tool '" + spec.name + "' has no handler");
  if (contains(spec.name)) throw ValidationError("duplicate tool '" + spec.name + "'");
  auto name = spec.name;
  tools_.emplace(std::move(name), std::move(spec));
}

std::vector<std::string> ToolRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [n, _] : tools_) out.push_back(n);
  return out;
}

Json ToolRegistry::invoke(const std::string& name, const Json& args) const {
  auto it = tools_.find(name);
  if (it == tools_.end()) throw ToolError(TaskErrorKind::kUnknownTool, "unknown tool");
  const auto& spec = it->second;
  if (auto v = check_schema(args, spec.args); !v.empty()) {
    throw ToolError(TaskErrorKind::kInvalidArguments, "invalid arguments: " + v);
  }

  auto promise = std::make_shared<std::promise<Json>>();
  auto future = promise->get_future();
  std::thread([handler = spec.handler, args, promise] {
    try {
      promise->set_value(handler(args));
    } catch (...) {
      promise->set_exception(std::current_exception());
    }
  }).detach();
  if (future.wait_for(spec.timeout) != std::future_status::ready) {
    throw ToolError(TaskErrorKind::kTimeout, "timeout");
  }
  Json result;
  try {
    result = future.get();
  } catch (const std::exception& e) {
    throw ToolError(TaskErrorKind::kHandlerError, e.what());
  }
  if (auto v = check_schema(result, spec.result); !v.empty()) {
    throw ToolError(TaskErrorKind::kSchemaInvalid, "schema-invalid output: " + v);
  }
  return result;
}

namespace {

template <class T>
const T& lookup_or_default(const std::map<std::string, T>& table, const std::string& key) {
  auto it = table.find(key);
  if (it != table.end()) return it->second;
  it = table.find("*");
  if (it == table.end()) throw std::runtime_error("no fixture for '" + key + "'");
  return it->second;
}

}  // namespace

ToolRegistry ToolRegistry::with_stubs(const StubFixtures& fixtures) {
  ToolRegistry reg;
  reg.register_tool({"logistics_eta",
                     {{"zip", FieldType::kString}},
                     {{"eta_days", FieldType::kNumber}},
                     std::chrono::milliseconds(2000),
                     [table = fixtures.eta_days](const Json& args) {
                       Json out{{"eta_days", lookup_or_default(table, args["zip"].get<std::string>())}};
                       if (args.contains("deadline")) out["deadline"] = args["deadline"];
                       return out;
                     }});
  reg.register_tool({"weather",
                     {{"location", FieldType::kString}},
                     {{"condition", FieldType::kString}, {"temp_c", FieldType::kNumber}},
                     std::chrono::milliseconds(2000),
                     [table = fixtures.weather](const Json& args) {
                       const auto loc = text::to_lower(args["location"].get<std::string>());
                       Json out = lookup_or_default(table, loc);
                       out["location"] = loc;
                       return out;
                     }});
  reg.register_tool(
      {"price_history",
       {{"query", FieldType::kString}},
       {{"trend", FieldType::kString}, {"lowest", FieldType::kNumber}, {"highest", FieldType::kNumber}},
       std::chrono::milliseconds(2000),
       [trends = fixtures.trends](const Json& args) {
         std::vector<double> prices;
         for (const auto& c : args.value("candidates", Json::array())) {
           if (c.contains("price") && c["price"].is_number()) prices.push_back(c["price"].get<double>());
         }
         std::sort(prices.begin(), prices.end());
         const auto q = text::normalize(args["query"].get<std::string>());
         Json out{{"trend", trends.empty() ? "flat" : trends[text::fnv1a64(q) % trends.size()]},
                  {"lowest", prices.empty() ? 0.0 : prices.front()},
                  {"highest", prices.empty() ? 0.0 : prices.back()},
                  {"samples", prices.size()}};
         return out;
       }});
  return reg;
}

}  // namespace cogsearch::executor
