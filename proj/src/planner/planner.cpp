#include "cogsearch/planner/planner.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>

#include "cogsearch/error.hpp"
#include "cogsearch/util/text.hpp"

namespace cogsearch::planner {

namespace {

enum class Tok { kWord, kNumber, kCurrency, kCmp, kPunct, kDash, kOther };

struct Token {
  Tok kind = Tok::kOther;
  std::string word;  // lowercase text for words; unit suffix for numbers
  std::string raw;   // exact source text (number literal without unit)
  std::string full;  // exact source text including any unit suffix
  double number = 0.0;
  ConstraintOp cmp = ConstraintOp::kLe;
  bool used = false;
};

bool starts_with_at(std::string_view s, std::size_t i, std::string_view p) {
  return s.substr(i, p.size()) == p;
}

bool is_ascii_alnum(unsigned char c) { return c < 0x80 && std::isalnum(c) != 0; }

std::vector<Token> lex(std::string_view q, const PlannerConfig& cfg) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto symbol_at = [&](std::size_t pos) -> std::optional<std::pair<Tok, std::size_t>> {
    if (starts_with_at(q, pos, "≤") || starts_with_at(q, pos, "≥")) return {{Tok::kCmp, 3}};
    for (const auto& c : cfg.currency_symbols) {
      if (!c.empty() && starts_with_at(q, pos, c)) return {{Tok::kCurrency, c.size()}};
    }
    return std::nullopt;
  };
  while (i < q.size()) {
    const auto c = static_cast<unsigned char>(q[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (auto sym = symbol_at(i)) {
      Token t;
      t.kind = sym->first;
      t.raw = t.full = std::string(q.substr(i, sym->second));
      if (t.kind == Tok::kCmp) t.cmp = starts_with_at(q, i, "≤") ? ConstraintOp::kLe : ConstraintOp::kGe;
      out.push_back(std::move(t));
      i += sym->second;
      continue;
    }
    if (c == '<' || c == '>') {
      Token t;
      t.kind = Tok::kCmp;
      t.cmp = c == '<' ? ConstraintOp::kLe : ConstraintOp::kGe;
      std::size_t len = (i + 1 < q.size() && q[i + 1] == '=') ? 2 : 1;
      t.raw = t.full = std::string(q.substr(i, len));
      out.push_back(std::move(t));
      i += len;
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < q.size()) {
        const auto d = static_cast<unsigned char>(q[j]);
        if (std::isdigit(d)) {
          ++j;
        } else if ((d == '.' || d == ',') && j + 1 < q.size() &&
                   std::isdigit(static_cast<unsigned char>(q[j + 1]))) {
          ++j;
        } else {
          break;
        }
      }
      std::size_t k = j;
      while (k < q.size() && std::isalpha(static_cast<unsigned char>(q[k])) &&
             static_cast<unsigned char>(q[k]) < 0x80) {
        ++k;
      }
      const bool code_like = k < q.size() && (is_ascii_alnum(static_cast<unsigned char>(q[k])) ||
                                              static_cast<unsigned char>(q[k]) >= 0x80);
      if (code_like) {
        // Model codes such as "7q2x" are words, not measurements.
        while (k < q.size() && (is_ascii_alnum(static_cast<unsigned char>(q[k])) ||
                                (static_cast<unsigned char>(q[k]) >= 0x80 && !symbol_at(k)))) {
          ++k;
        }
        Token t;
        t.kind = Tok::kWord;
        t.raw = t.full = std::string(q.substr(i, k - i));
        t.word = text::to_lower(t.raw);
        out.push_back(std::move(t));
        i = k;
        continue;
      }
      Token t;
      t.kind = Tok::kNumber;
      t.raw = std::string(q.substr(i, j - i));
      t.full = std::string(q.substr(i, k - i));
      t.word = text::to_lower(q.substr(j, k - j));
      std::string digits;
      for (char ch : t.raw) {
        if (ch != ',') digits.push_back(ch);
      }
      t.number = std::strtod(digits.c_str(), nullptr);
      out.push_back(std::move(t));
      i = k;
      continue;
    }
    if (is_ascii_alnum(c) || c >= 0x80) {
      std::size_t k = i;
      while (k < q.size() && (is_ascii_alnum(static_cast<unsigned char>(q[k])) ||
                              (static_cast<unsigned char>(q[k]) >= 0x80 && !symbol_at(k)))) {
        ++k;
      }
      Token t;
      t.kind = Tok::kWord;
      t.raw = t.full = std::string(q.substr(i, k - i));
      t.word = text::to_lower(t.raw);
      out.push_back(std::move(t));
      i = k;
      continue;
    }
    Token t;
    t.kind = (c == ',' || c == ';') ? Tok::kPunct : (c == '-' ? Tok::kDash : Tok::kOther);
    t.raw = t.full = std::string(1, static_cast<char>(c));
    out.push_back(std::move(t));
    ++i;
  }
  return out;
}

std::vector<std::string> words_of(const std::string& phrase) { return text::tokenize(phrase); }

// Length in tokens of `phrase` if it matches unused words starting at i.
std::size_t match_phrase(const std::vector<Token>& toks, std::size_t i,
                         const std::vector<std::string>& phrase) {
  if (phrase.empty() || i + phrase.size() > toks.size()) return 0;
  for (std::size_t k = 0; k < phrase.size(); ++k) {
    const auto& t = toks[i + k];
    if (t.used || t.kind != Tok::kWord || t.word != phrase[k]) return 0;
  }
  return phrase.size();
}

// If a cue phrase ends right before position `end`, returns its start.
std::optional<std::size_t> cue_before(const std::vector<Token>& toks, std::size_t end,
                                      const std::vector<std::string>& cues) {
  std::optional<std::size_t> best;
  for (const auto& cue : cues) {
    auto w = words_of(cue);
    if (w.empty() || w.size() > end) continue;
    std::size_t start = end - w.size();
    if (match_phrase(toks, start, w) == w.size()) {
      if (!best || start < *best) best = start;
    }
  }
  return best;
}

bool contains_word(const std::vector<std::string>& list, const std::string& w) {
  return std::find(list.begin(), list.end(), w) != list.end();
}

class RuleParser {
 public:
  RuleParser(const memory::SessionContext& ctx, const PlannerConfig& cfg)
      : ctx_(ctx), cfg_(cfg), toks_(lex(ctx.query, cfg)) {}

  PlanResult run();

 private:
  void tool_rule();
  void measure_rule();
  void negation_rule();
  void with_rule();
  bool consultative() const;
  std::string core_query() const;

  // Attribute label (e.g. "battery life") starting at i; returns
  // (attribute, token count).
  std::optional<std::pair<std::string, std::size_t>> label_at(std::size_t i) const;
  std::optional<std::string> unit_attribute(const std::string& unit) const;
  void add(Constraint c);
  void use(std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to && k < toks_.size(); ++k) toks_[k].used = true;
  }
  bool is_word(std::size_t i) const {
    return i < toks_.size() && !toks_[i].used && toks_[i].kind == Tok::kWord;
  }
  bool is_currency_word(std::size_t i) const {
    return is_word(i) && contains_word(cfg_.currency_words, toks_[i].word);
  }
  bool is_number(std::size_t i) const {
    return i < toks_.size() && !toks_[i].used && toks_[i].kind == Tok::kNumber;
  }
  bool is_range_joiner(std::size_t i) const {
    return i < toks_.size() && !toks_[i].used &&
           ((toks_[i].kind == Tok::kWord && toks_[i].word == "to") || toks_[i].kind == Tok::kDash);
  }

  const memory::SessionContext& ctx_;
  const PlannerConfig& cfg_;
  std::vector<Token> toks_;
  std::vector<Constraint> constraints_;
  std::vector<std::pair<std::string, Json>> tools_;  // tool name, captured args
};

void RuleParser::add(Constraint c) {
  if (std::find(constraints_.begin(), constraints_.end(), c) == constraints_.end()) {
    constraints_.push_back(std::move(c));
  }
}

std::optional<std::pair<std::string, std::size_t>> RuleParser::label_at(std::size_t i) const {
  std::optional<std::pair<std::string, std::size_t>> best;
  auto consider = [&](const std::string& attr, const std::string& label) {
    auto w = words_of(label);
    std::size_t n = match_phrase(toks_, i, w);
    if (n > 0 && (!best || n > best->second)) best = {{attr, n}};
  };
  for (const auto& [name, _] : cfg_.attributes) consider(name, name);
  for (const auto& [alias, attr] : cfg_.attribute_aliases) consider(attr, alias);
  return best;
}

std::optional<std::string> RuleParser::unit_attribute(const std::string& unit) const {
  auto it = cfg_.unit_attributes.find(unit);
  if (it != cfg_.unit_attributes.end()) return it->second;
  return std::nullopt;
}

void RuleParser::tool_rule() {
  for (const auto& trig : cfg_.tool_triggers) {
    auto w = words_of(trig.phrase);
    for (std::size_t i = 0; i < toks_.size(); ++i) {
      std::size_t n = match_phrase(toks_, i, w);
      if (n == 0) continue;
      Json captured = Json::object();
      use(i, i + n);
      if (!trig.capture_arg.empty() && i + n < toks_.size() && !toks_[i + n].used &&
          (toks_[i + n].kind == Tok::kWord || toks_[i + n].kind == Tok::kNumber)) {
        captured[trig.capture_arg] = toks_[i + n].full;
        use(i + n, i + n + 1);
      }
      auto it = std::find_if(tools_.begin(), tools_.end(),
                             [&](const auto& t) { return t.first == trig.tool; });
      if (it == tools_.end()) {
        tools_.emplace_back(trig.tool, captured);
      } else {
        it->second.update(captured);
      }
    }
  }
}

void RuleParser::measure_rule() {
  auto op_before = [&](std::size_t pos) -> std::optional<std::pair<ConstraintOp, std::size_t>> {
    if (pos > 0 && !toks_[pos - 1].used && toks_[pos - 1].kind == Tok::kCmp) {
      return {{toks_[pos - 1].cmp, pos - 1}};
    }
    if (auto s = cue_before(toks_, pos, cfg_.below_cues)) return {{ConstraintOp::kLe, *s}};
    if (auto s = cue_before(toks_, pos, cfg_.above_cues)) return {{ConstraintOp::kGe, *s}};
    return std::nullopt;
  };

  for (std::size_t i = 0; i < toks_.size(); ++i) {
    if (toks_[i].used) continue;

    // Currency-marked price: "$200", "under $200", "$100 to $150".
    if (toks_[i].kind == Tok::kCurrency && is_number(i + 1) && toks_[i + 1].word.empty()) {
      const double lo = toks_[i + 1].number;
      std::size_t end = i + 2;
      if (is_range_joiner(end)) {
        std::size_t j = end + 1;
        if (j < toks_.size() && !toks_[j].used && toks_[j].kind == Tok::kCurrency) ++j;
        if (is_number(j) && toks_[j].word.empty()) {
          add({"price", ConstraintOp::kGe, lo, Hardness::kHard});
          add({"price", ConstraintOp::kLe, toks_[j].number, Hardness::kHard});
          use(i, j + 1);
          continue;
        }
      }
      auto op = op_before(i);
      add({"price", op ? op->first : ConstraintOp::kLe, lo, Hardness::kHard});
      use(op ? op->second : i, end);
      continue;
    }

    if (toks_[i].kind != Tok::kNumber) continue;
    const Token& num = toks_[i];

    // "200 dollars", "200usd"
    if (!num.word.empty() && contains_word(cfg_.currency_words, num.word)) {
      auto op = op_before(i);
      add({"price", op ? op->first : ConstraintOp::kLe, num.number, Hardness::kHard});
      use(op ? op->second : i, i + 1);
      continue;
    }
    if (num.word.empty() && is_currency_word(i + 1)) {
      auto op = op_before(i);
      add({"price", op ? op->first : ConstraintOp::kLe, num.number, Hardness::kHard});
      use(op ? op->second : i, i + 2);
      continue;
    }

    // Measurements: unit suffix ("200g"), unit word ("8 hours") or an
    // attribute label after the number ("256 storage").
    std::string unit = num.word;
    std::size_t after = i + 1;
    if (unit.empty() && is_word(after) && cfg_.unit_attributes.count(toks_[after].word)) {
      unit = toks_[after].word;
      ++after;
    }
    // Range: "4h to 8h battery life"
    std::optional<double> hi;
    std::size_t range_end = after;
    if (is_range_joiner(after) && is_number(after + 1) &&
        (toks_[after + 1].word == unit || toks_[after + 1].word.empty())) {
      hi = toks_[after + 1].number;
      range_end = after + 2;
    }
    std::optional<std::string> attr;
    std::size_t end = hi ? range_end : after;
    if (auto lab = label_at(end)) {
      attr = lab->first;
      end += lab->second;
    } else if (!unit.empty()) {
      attr = unit_attribute(unit);
    }
    if (hi) {
      if (!attr) continue;
      add({*attr, ConstraintOp::kGe, num.number, Hardness::kHard});
      add({*attr, ConstraintOp::kLe, *hi, Hardness::kHard});
      use(i, end);
      continue;
    }
    auto op = op_before(i);
    if (!op) continue;
    if (!attr) {
      if (!unit.empty()) continue;  // unknown unit, leave it in the query
      attr = "price";               // bare "below 300"
    }
    add({*attr, op->first, num.number, Hardness::kHard});
    use(op->second, end);
  }
}

void RuleParser::negation_rule() {
  for (std::size_t i = 0; i < toks_.size(); ++i) {
    if (!is_word(i) || !contains_word(cfg_.negation_cues, toks_[i].word)) continue;
    std::size_t j = i + 1;
    if (j < toks_.size() && !toks_[j].used && toks_[j].kind == Tok::kDash) ++j;
    if (!is_word(j) || contains_word(cfg_.negation_cues, toks_[j].word)) continue;
    auto it = cfg_.negation_attributes.find(toks_[j].word);
    std::string attr = it == cfg_.negation_attributes.end() ? "*" : it->second;
    add({attr, ConstraintOp::kNotContains, toks_[j].raw, Hardness::kHard});
    use(i, j + 1);
  }
}

void RuleParser::with_rule() {
  auto stop_word = [&](const Token& t) {
    return t.word == "with" || t.word == "and" || contains_word(cfg_.negation_cues, t.word) ||
           contains_word(cfg_.below_cues, t.word) || contains_word(cfg_.above_cues, t.word);
  };
  for (std::size_t i = 0; i < toks_.size(); ++i) {
    if (!is_word(i) || toks_[i].word != "with") continue;
    auto lab = label_at(i + 1);
    if (!lab) continue;
    auto vocab = cfg_.attributes.find(lab->first);
    if (vocab != cfg_.attributes.end() && vocab->second.numeric) continue;
    std::size_t j = i + 1 + lab->second;
    std::vector<std::string> value;
    while (j < toks_.size() && !toks_[j].used &&
           (toks_[j].kind == Tok::kWord || toks_[j].kind == Tok::kNumber) && !stop_word(toks_[j])) {
      value.push_back(toks_[j].full);
      ++j;
    }
    if (value.empty()) continue;
    add({lab->first, ConstraintOp::kEq, text::join(value, " "), Hardness::kHard});
    use(i, j);
  }
}

bool RuleParser::consultative() const {
  for (const auto& trig : cfg_.consultative_triggers) {
    auto w = words_of(trig);
    if (w.empty()) continue;
    for (std::size_t i = 0; i < toks_.size(); ++i) {
      bool hit = i + w.size() <= toks_.size();
      for (std::size_t k = 0; hit && k < w.size(); ++k) {
        hit = toks_[i + k].kind == Tok::kWord && toks_[i + k].word == w[k];
      }
      if (hit) return true;
    }
  }
  for (std::size_t i = 0; i + 1 < toks_.size(); ++i) {
    if (toks_[i].kind == Tok::kWord && toks_[i].word == "for" && toks_[i + 1].kind == Tok::kWord &&
        contains_word(cfg_.activities, toks_[i + 1].word)) {
      return true;
    }
  }
  return false;
}

std::string RuleParser::core_query() const {
  std::vector<std::string> parts;
  for (const auto& t : toks_) {
    if (!t.used && (t.kind == Tok::kWord || t.kind == Tok::kNumber)) parts.push_back(t.full);
  }
  if (parts.empty()) {
    for (const auto& t : toks_) {
      if (t.kind == Tok::kWord || t.kind == Tok::kNumber) parts.push_back(t.full);
    }
  }
  if (parts.empty()) return text::trim(ctx_.query);
  return text::join(parts, " ");
}

PlanResult RuleParser::run() {
  tool_rule();
  measure_rule();
  negation_rule();
  with_rule();

  PlanResult out;
  out.core_query = core_query();
  out.constraints = constraints_;

  TaskNode product;
  product.id = kProductNode;
  product.kind = TaskKind::kProductSearch;
  product.outputs = {kCandidatesSlot};
  product.params = ProductSearchParams{out.core_query, constraints_};
  out.graph.nodes.push_back(std::move(product));

  if (consultative()) {
    TaskNode web;
    web.id = kWebNode;
    web.kind = TaskKind::kWebSearch;
    web.outputs = {kEvidenceSlot};
    web.params = WebSearchParams{out.core_query};
    out.graph.nodes.push_back(std::move(web));
  }

  for (const auto& [tool, captured] : tools_) {
    TaskNode node;
    node.id = tool_node_id(tool);
    node.kind = TaskKind::kToolInvocation;
    node.outputs = {kToolOutputSlot};
    Json args = Json::object();
    if (auto it = cfg_.tool_default_args.find(tool); it != cfg_.tool_default_args.end()) {
      args.update(it->second);
    }
    if (auto it = cfg_.tool_profile_args.find(tool); it != cfg_.tool_profile_args.end()) {
      for (const auto& [arg, key] : it->second) {
        if (ctx_.user_profile.is_object() && ctx_.user_profile.contains(key)) {
          const auto& v = ctx_.user_profile[key];
          args[arg] = v.is_string() ? v : Json(v.dump());
        }
      }
    }
    if (auto it = cfg_.tool_query_arg.find(tool); it != cfg_.tool_query_arg.end()) {
      args[it->second] = out.core_query;
    }
    args.update(captured);
    if (auto it = cfg_.tool_inputs.find(tool); it != cfg_.tool_inputs.end()) {
      for (const auto& slot : it->second) {
        node.inputs.insert(slot);
        // Only product candidates are produced upstream by the rule planner.
        if (slot == kCandidatesSlot) out.graph.edges.push_back({kProductNode, node.id, slot});
      }
    }
    node.params = ToolParams{tool, std::move(args)};
    out.graph.nodes.push_back(std::move(node));
  }
  return out;
}

Json vocab_json(const std::map<std::string, AttributeVocab>& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m) j[k] = {{"numeric", v.numeric}, {"unit", v.unit}};
  return j;
}

}  // namespace

std::string tool_node_id(const std::string& tool) { return "tool_" + tool; }

PlannerConfig PlannerConfig::defaults() {
  PlannerConfig c;
  c.consultative_triggers = {"best", "vs",        "versus", "compare", "comparison",
                             "which", "how to",   "recommend", "recommendation"};
  c.activities = {"hiking",  "running", "vlogging", "gaming", "travel",      "camping",
                  "cycling", "office",  "school",   "gym",    "commuting",   "photography",
                  "cooking", "kids",    "swimming", "work",   "streaming",   "studying"};
  c.tool_triggers = {{"delivery by", "logistics_eta", "deadline"},
                     {"arrive by", "logistics_eta", "deadline"},
                     {"delivered by", "logistics_eta", "deadline"},
                     {"shipping time", "logistics_eta", ""},
                     {"weather", "weather", ""},
                     {"price history", "price_history", ""},
                     {"price trend", "price_history", ""}};
  c.tool_inputs = {{"price_history", {kCandidatesSlot}}};
  c.tool_default_args = {{"logistics_eta", Json{{"zip", "100000"}}},
                         {"weather", Json{{"location", "beijing"}}}};
  c.tool_profile_args = {{"logistics_eta", {{"zip", "zip"}}}, {"weather", {{"location", "city"}}}};
  c.tool_query_arg = {{"price_history", "query"}};
  c.below_cues = {"under", "below", "less than", "cheaper than", "up to", "max", "within"};
  c.above_cues = {"over", "above", "at least", "more than", "min"};
  c.currency_symbols = {"$", "¥", "€", "£"};
  c.currency_words = {"dollars", "dollar", "usd", "bucks", "yuan", "rmb"};
  c.negation_cues = {"without", "no", "non", "not"};
  c.negation_attributes = {{"oled", "display_type"},    {"lcd", "display_type"},
                           {"bluetooth", "connectivity"}, {"wired", "connectivity"},
                           {"wireless", "connectivity"}};
  c.unit_attributes = {{"g", "weight"},       {"kg", "weight"},      {"h", "battery_life"},
                       {"hr", "battery_life"}, {"hours", "battery_life"}, {"in", "screen_size"},
                       {"inch", "screen_size"}, {"gb", "storage"},    {"tb", "storage"},
                       {"mah", "battery_capacity"}};
  c.attribute_aliases = {{"battery", "battery_life"}, {"screen", "screen_size"}};
  return c;
}

PlannerConfig PlannerConfig::with_schema(
    const std::map<std::string, catalog::AttributeInfo>& schema) const {
  PlannerConfig c = *this;
  for (const auto& [name, info] : schema) {
    c.attributes.emplace(name, AttributeVocab{info.numeric, info.unit});
    if (info.numeric && !info.unit.empty()) {
      c.unit_attributes.emplace(text::to_lower(info.unit), name);
    }
  }
  return c;
}

void to_json(Json& j, const PlannerConfig& c) {
  Json triggers = Json::array();
  for (const auto& t : c.tool_triggers) {
    triggers.push_back({{"phrase", t.phrase}, {"tool", t.tool}, {"capture_arg", t.capture_arg}});
  }
  j = Json{{"consultative_triggers", c.consultative_triggers},
           {"activities", c.activities},
           {"tool_triggers", triggers},
           {"tool_inputs", c.tool_inputs},
           {"tool_default_args", c.tool_default_args},
           {"tool_profile_args", c.tool_profile_args},
           {"tool_query_arg", c.tool_query_arg},
           {"below_cues", c.below_cues},
           {"above_cues", c.above_cues},
           {"currency_symbols", c.currency_symbols},
           {"currency_words", c.currency_words},
           {"negation_cues", c.negation_cues},
           {"negation_attributes", c.negation_attributes},
           {"unit_attributes", c.unit_attributes},
           {"attribute_aliases", c.attribute_aliases},
           {"attributes", vocab_json(c.attributes)}};
}

void from_json(const Json& j, PlannerConfig& c) {
  c = PlannerConfig::defaults();
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("consultative_triggers", c.consultative_triggers);
  get("activities", c.activities);
  if (j.contains("tool_triggers")) {
    c.tool_triggers.clear();
    for (const auto& t : j.at("tool_triggers")) {
      c.tool_triggers.push_back({t.at("phrase").get<std::string>(), t.at("tool").get<std::string>(),
                                 t.value("capture_arg", std::string{})});
    }
  }
  get("tool_inputs", c.tool_inputs);
  get("tool_default_args", c.tool_default_args);
  get("tool_profile_args", c.tool_profile_args);
  get("tool_query_arg", c.tool_query_arg);
  get("below_cues", c.below_cues);
  get("above_cues", c.above_cues);
  get("currency_symbols", c.currency_symbols);
  get("currency_words", c.currency_words);
  get("negation_cues", c.negation_cues);
  get("negation_attributes", c.negation_attributes);
  get("unit_attributes", c.unit_attributes);
  get("attribute_aliases", c.attribute_aliases);
  if (j.contains("attributes")) {
    c.attributes.clear();
    for (auto it = j.at("attributes").begin(); it != j.at("attributes").end(); ++it) {
      c.attributes[it.key()] = {it.value().value("numeric", false),
                                it.value().value("unit", std::string{})};
    }
  }
}

PlanResult plan(const memory::SessionContext& ctx, const PlannerConfig& config) {
  if (text::trim(ctx.query).empty()) throw ValidationError("empty query");
  return RuleParser(ctx, config).run();
}

std::string plan_prompt(const memory::SessionContext& ctx) {
  Json prompt{
      {"schema", "cogsearch.plan_request/v1"},
      {"instructions",
       "Decompose the shopping query into a task DAG. Node kinds: ProductSearch "
       "(params.query, params.constraints), WebSearch (params.need), ToolInvocation "
       "(params.tool, params.args). An edge (from, to, slot) requires slot in "
       "outputs(from) and in inputs(to). Reply with the graph JSON only."},
      {"context", ctx},
      {"response_schema", "cogsearch.task_graph/v1"}};
  return prompt.dump();
}

PlanResult plan_generative(const memory::SessionContext& ctx, GenerativeBackend& backend,
                           const PlannerConfig& config, memory::MemoryStore* memory,
                           std::chrono::milliseconds timeout) {
  if (text::trim(ctx.query).empty()) throw ValidationError("empty query");
  std::string reason;
  try {
    const std::string reply = backend.complete(plan_prompt(ctx), timeout);
    auto j = Json::parse(reply);
    if (j.is_object() && j.contains("graph")) j = j.at("graph");
    PlanResult out;
    out.graph = j.get<TaskGraph>();
    auto violations = validate_graph(out.graph);
    if (out.graph.count(TaskKind::kProductSearch) == 0) {
      violations.push_back("graph has no ProductSearch node");
    }
    if (violations.empty()) {
      for (const auto& n : out.graph.nodes) {
        if (const auto* p = std::get_if<ProductSearchParams>(&n.params)) {
          if (out.core_query.empty()) out.core_query = p->query;
          for (const auto& c : p->constraints) {
            if (std::find(out.constraints.begin(), out.constraints.end(), c) ==
                out.constraints.end()) {
              out.constraints.push_back(c);
            }
          }
        }
      }
      return out;
    }
    reason = "invalid graph: " + text::join(violations, "; ");
  } catch (const BackendError& e) {
    reason = std::string("backend error: ") + e.what();
  } catch (const std::exception& e) {
    reason = std::string("schema-invalid response: ") + e.what();
  }

  PlanResult out = plan(ctx, config);
  out.fallback = true;
  out.fallback_reason = reason;
  if (memory && !ctx.session_id.empty()) {
    try {
      memory->append(ctx.session_id, memory::RecordKind::kAgentState,
                     Json{{"agent", "planner"},
                          {"event", "fallback"},
                          {"backend", backend.name()},
                          {"reason", reason}});
    } catch (const NotFoundError&) {
      // Session vanished (evicted); the plan itself is still usable.
    }
  }
  return out;
}

std::unique_ptr<GenerativeBackend> make_rule_echo_backend(PlannerConfig config) {
  return std::make_unique<FunctionBackend>(
      "rule-echo", [config = std::move(config)](const std::string& prompt) {
        auto ctx = Json::parse(prompt).at("context").get<memory::SessionContext>();
        return Json(plan(ctx, config).graph).dump();
      });
}

}  // namespace cogsearch::planner
