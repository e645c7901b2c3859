#include "cogsearch/guider/facets.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cogsearch/util/text.hpp"

namespace cogsearch::guider {

double UserState::weight(const std::string& id) const {
  auto it = weights.find(id);
  return it == weights.end() ? 1.0 : it->second;
}

UserState derive_user_state(const memory::SessionContext& ctx, const CandidateSet& cands,
                            std::vector<FacetSelection> active_facets,
                            const std::map<std::string, std::vector<std::string>>& facet_members) {
  UserState s;
  for (const auto& it : cands.items) s.weights[it.product_id] = 1.0;
  for (const auto& in : ctx.click_history) {
    auto w = s.weights.find(in.item_id);
    if (w == s.weights.end()) continue;
    if (in.kind == memory::InteractionKind::kClick) w->second += 1.0;
    if (in.kind == memory::InteractionKind::kAddToCart) w->second += 3.0;
  }
  for (const auto& sel : active_facets) {
    auto m = facet_members.find(sel.attribute + "=" + sel.label);
    if (m == facet_members.end()) continue;
    for (const auto& id : m->second) {
      if (auto w = s.weights.find(id); w != s.weights.end()) w->second += 1.0;
    }
  }
  s.active_facets = std::move(active_facets);
  return s;
}

std::optional<catalog::AttributeValue> facet_value(const catalog::Product& p,
                                                   const std::string& attribute) {
  if (attribute == "price") return catalog::AttributeValue(p.price, "$");
  auto it = p.attributes.find(attribute);
  if (it == p.attributes.end()) return std::nullopt;
  return it->second;
}

bool Bucket::matches(const std::optional<catalog::AttributeValue>& v) const {
  if (unknown) return !v.has_value();
  if (!v) return false;
  if (numeric) {
    if (!v->is_number()) return false;
    const double x = v->number();
    return x >= lo && (closed_hi ? x <= hi : x < hi);
  }
  return v->display() == value;
}

const Bucket* Facet::find(const std::string& bucket_label) const {
  for (const auto& b : buckets) {
    if (b.label == bucket_label) return &b;
  }
  return nullptr;
}

FacetConfig FacetConfig::defaults() {
  FacetConfig c;
  c.labels = {{"battery_life", "battery"}};
  return c;
}

std::string FacetConfig::label_for(const std::string& attribute) const {
  auto it = labels.find(attribute);
  if (it != labels.end()) return it->second;
  std::string out = attribute;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

void to_json(Json& j, const FacetConfig& c) {
  j = Json{{"bucket_count", c.bucket_count},
           {"max_facets", c.max_facets},
           {"labels", c.labels},
           {"excluded", c.excluded}};
}

void from_json(const Json& j, FacetConfig& c) {
  c.bucket_count = j.at("bucket_count").get<std::size_t>();
  c.max_facets = j.at("max_facets").get<std::size_t>();
  c.labels = j.at("labels").get<std::map<std::string, std::string>>();
  c.excluded = j.at("excluded").get<std::vector<std::string>>();
}

namespace {

std::string measure(double v, const std::string& unit) {
  const auto n = text::format_number(std::round(v * 100.0) / 100.0);
  return unit == "$" ? "$" + n : n + unit;
}

const catalog::Product* product_of(const CandidateSet& cands, const std::string& id) {
  const auto* e = cands.find(id);
  return e ? &e->product : nullptr;
}

}  // namespace

Facet partition(const std::string& attribute, const CandidateSet& cands, const FacetConfig& config) {
  Facet f;
  f.attribute = attribute;
  f.label = config.label_for(attribute);

  std::vector<std::optional<catalog::AttributeValue>> values;
  bool any = false, all_numeric = true;
  for (const auto& it : cands.items) {
    const auto* p = product_of(cands, it.product_id);
    values.push_back(p ? facet_value(*p, attribute) : std::nullopt);
    if (values.back()) {
      any = true;
      all_numeric = all_numeric && values.back()->is_number();
      if (f.unit.empty()) f.unit = values.back()->unit;
    }
  }
  f.numeric = any && all_numeric;

  Bucket unknown;
  unknown.label = kUnknownBucket;
  unknown.unknown = true;
  unknown.numeric = f.numeric;

  if (f.numeric) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& v : values) {
      if (v) lo = std::min(lo, v->number()), hi = std::max(hi, v->number());
    }
    const std::size_t n = (hi > lo) ? std::max<std::size_t>(1, config.bucket_count) : 1;
    const double width = (hi - lo) / static_cast<double>(n);
    std::vector<Bucket> bs(n);
    for (std::size_t k = 0; k < n; ++k) {
      auto& b = bs[k];
      b.numeric = true;
      b.lo = k == 0 ? lo : lo + width * static_cast<double>(k);
      b.hi = k + 1 == n ? hi : lo + width * static_cast<double>(k + 1);
      b.closed_hi = k + 1 == n;
      if (n == 1) {
        b.label = measure(lo, f.unit);
      } else if (k == 0) {
        b.label = "<" + measure(b.hi, f.unit);
      } else if (k + 1 == n) {
        b.label = "≥" + measure(b.lo, f.unit);
      } else {
        b.label = measure(b.lo, f.unit) + " to " + measure(b.hi, f.unit);
      }
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto& id = cands.items[i].product_id;
      if (!values[i]) {
        unknown.members.push_back(id);
        continue;
      }
      std::size_t k = 0;
      while (k + 1 < n && !bs[k].matches(values[i])) ++k;
      bs[k].members.push_back(id);
    }
    for (auto& b : bs) {
      if (!b.members.empty()) f.buckets.push_back(std::move(b));
    }
  } else {
    std::map<std::string, Bucket> by_value;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto& id = cands.items[i].product_id;
      if (!values[i]) {
        unknown.members.push_back(id);
        continue;
      }
      const auto d = values[i]->display();
      auto& b = by_value[d];
      b.label = b.value = d;
      b.members.push_back(id);
    }
    for (auto& [_, b] : by_value) f.buckets.push_back(std::move(b));
    std::stable_sort(f.buckets.begin(), f.buckets.end(), [](const Bucket& a, const Bucket& b) {
      return a.members.size() > b.members.size();
    });
  }
  if (!unknown.members.empty()) f.buckets.push_back(std::move(unknown));
  for (auto& b : f.buckets) b.count = b.members.size();
  return f;
}

double info_gain(const Facet& facet, const UserState& state) {
  double total = 0.0;
  std::vector<double> mass;
  for (const auto& b : facet.buckets) {
    double m = 0.0;
    for (const auto& id : b.members) m += state.weight(id);
    mass.push_back(m);
    total += m;
  }
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double m : mass) {
    if (m <= 0.0) continue;
    const double p = m / total;
    h -= p * std::log2(p);
  }
  return std::max(0.0, h);
}

double info_gain(const std::string& attribute, const CandidateSet& cands, const UserState& state,
                 const FacetConfig& config) {
  if (cands.empty()) throw ValidationError("empty candidate set");
  return info_gain(partition(attribute, cands, config), state);
}

std::vector<Facet> generate_facets(const CandidateSet& cands, const UserState& state,
                                   const std::vector<planner::Constraint>& constraints,
                                   const FacetConfig& config) {
  std::set<std::string> fixed(config.excluded.begin(), config.excluded.end());
  for (const auto& s : state.active_facets) fixed.insert(s.attribute);
  for (const auto& c : constraints) {
    if (c.hard()) fixed.insert(c.attribute);
  }

  std::map<std::string, std::size_t> present;
  for (const auto& it : cands.items) {
    const auto* p = product_of(cands, it.product_id);
    if (!p) continue;
    ++present["price"];
    for (const auto& [name, _] : p->attributes) ++present[name];
  }

  std::vector<Facet> all;
  for (const auto& [name, n] : present) {
    if (n < 2 || fixed.count(name)) continue;
    Facet f = partition(name, cands, config);
    f.info_gain = info_gain(f, state);
    if (f.info_gain > 1e-12) all.push_back(std::move(f));
  }

  // Exact order first, then near-equal runs re-sorted by name so that
  // rounding noise from weight scaling cannot reorder them.
  std::sort(all.begin(), all.end(), [](const Facet& a, const Facet& b) {
    return a.info_gain != b.info_gain ? a.info_gain > b.info_gain : a.attribute < b.attribute;
  });
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i + 1;
    while (j < all.size() && all[i].info_gain - all[j].info_gain <= 1e-12) ++j;
    std::sort(all.begin() + i, all.begin() + j,
              [](const Facet& a, const Facet& b) { return a.attribute < b.attribute; });
    i = j;
  }
  if (all.size() > config.max_facets) all.resize(config.max_facets);
  return all;
}

CandidateSet apply_facet(const CandidateSet& cands, const std::vector<Facet>& facets,
                         const FacetSelection& selection, memory::MemoryStore* memory,
                         const std::string& session_id, Timestamp at) {
  const Bucket* bucket = nullptr;
  for (const auto& f : facets) {
    if (f.attribute == selection.attribute) bucket = f.find(selection.label);
  }
  if (!bucket) {
    throw StaleSelection("stale facet selection '" + selection.attribute + "=" + selection.label +
                         "'; regenerate facets");
  }
  const std::set<std::string> keep(bucket->members.begin(), bucket->members.end());
  CandidateSet out;
  for (const auto& it : cands.items) {
    if (!keep.count(it.product_id)) continue;
    out.items.push_back(it);
    if (const auto* e = cands.find(it.product_id)) out.enriched.emplace(it.product_id, *e);
  }
  if (memory) {
    memory::Interaction in{selection.attribute + "=" + selection.label,
                           memory::InteractionKind::kFacetClick, at};
    memory->append(session_id, memory::RecordKind::kTurn,
                   Json{{"type", "interaction"}, {"interaction", in}});
  }
  return out;
}

std::vector<planner::Constraint> selection_constraints(const Facet& facet, const Bucket& bucket) {
  using planner::ConstraintOp;
  using planner::Hardness;
  if (bucket.unknown) return {};
  if (!bucket.numeric) return {{facet.attribute, ConstraintOp::kEq, bucket.value, Hardness::kHard}};
  return {{facet.attribute, ConstraintOp::kGe, bucket.lo, Hardness::kHard},
          {facet.attribute, ConstraintOp::kLe, bucket.hi, Hardness::kHard}};
}

void to_json(Json& j, const FacetSelection& s) {
  j = Json{{"attribute", s.attribute}, {"label", s.label}};
}

void from_json(const Json& j, FacetSelection& s) {
  s.attribute = j.at("attribute").get<std::string>();
  s.label = j.at("label").get<std::string>();
}

void to_json(Json& j, const Bucket& b) {
  j = Json{{"label", b.label}, {"count", b.count}, {"members", b.members}};
  if (b.unknown) {
    j["unknown"] = true;
  } else if (b.numeric) {
    j["lo"] = b.lo;
    j["hi"] = b.hi;
    j["closed_hi"] = b.closed_hi;
  } else {
    j["value"] = b.value;
  }
}

void from_json(const Json& j, Bucket& b) {
  b.label = j.at("label").get<std::string>();
  b.count = j.at("count").get<std::size_t>();
  b.members = j.at("members").get<std::vector<std::string>>();
  b.unknown = j.value("unknown", false);
  b.numeric = j.contains("lo");
  b.lo = j.value("lo", 0.0);
  b.hi = j.value("hi", 0.0);
  b.closed_hi = j.value("closed_hi", false);
  b.value = j.value("value", std::string{});
}

void to_json(Json& j, const Facet& f) {
  j = Json{{"attribute", f.attribute}, {"label", f.label},     {"unit", f.unit},
           {"numeric", f.numeric},     {"buckets", f.buckets}, {"info_gain", f.info_gain}};
}

void from_json(const Json& j, Facet& f) {
  f.attribute = j.at("attribute").get<std::string>();
  f.label = j.at("label").get<std::string>();
  f.unit = j.value("unit", std::string{});
  f.numeric = j.at("numeric").get<bool>();
  f.buckets = j.at("buckets").get<std::vector<Bucket>>();
  f.info_gain = j.at("info_gain").get<double>();
}

}  // namespace cogsearch::guider
