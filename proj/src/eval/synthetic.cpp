#include "cogsearch/eval/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include "cogsearch/error.hpp"
#include "cogsearch/util/text.hpp"

namespace cogsearch::eval {

namespace {

// std distributions are not specified bit-for-bit across standard libraries;
// these are.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  std::uint64_t next() { return g_(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(g_() % n); }
  double unit() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[index(v.size())];
  }

 private:
  std::mt19937_64 g_;
};

struct AttrSpec {
  std::string name;
  std::string unit;
  double lo = 0, hi = 0, step = 1;         // numeric when values is empty
  std::vector<std::string> values;         // categorical
  std::vector<double> choices;             // numeric from a fixed set
};

AttrSpec num(std::string name, std::string unit, double lo, double hi, double step) {
  AttrSpec a;
  a.name = std::move(name);
  a.unit = std::move(unit);
  a.lo = lo;
  a.hi = hi;
  a.step = step;
  return a;
}

AttrSpec cat(std::string name, std::vector<std::string> values) {
  AttrSpec a;
  a.name = std::move(name);
  a.values = std::move(values);
  return a;
}

AttrSpec fixed(std::string name, std::string unit, std::vector<double> choices) {
  AttrSpec a;
  a.name = std::move(name);
  a.unit = std::move(unit);
  a.choices = std::move(choices);
  return a;
}

struct LeafSpec {
  std::vector<std::string> path;
  double price_lo, price_hi;
  std::vector<AttrSpec> attrs;
};

const std::vector<std::string> kColors = {"black", "white", "silver", "blue", "red", "green"};
const std::vector<std::string> kWater = {"IPX4", "IPX5", "IPX7", "none"};

const std::vector<LeafSpec>& leaves() {
  static const std::vector<LeafSpec> specs = {
      {{"Electronics", "Audio", "headphones"}, 25, 450,
       {num("weight", "g", 150, 400, 5),
        num("battery_life", "h", 10, 60, 1),
        cat("noise_cancelling", {"yes", "no"}),
        cat("connectivity", {"wireless", "wired"}),
        cat("color", kColors)}},
      {{"Electronics", "Audio", "earbuds"}, 15, 300,
       {num("battery_life", "h", 4, 12, 1),
        cat("water_resistance", kWater),
        cat("color", kColors)}},
      {{"Electronics", "Audio", "speaker"}, 20, 400,
       {num("weight", "g", 200, 2000, 10),
        num("battery_life", "h", 6, 30, 1),
        cat("water_resistance", kWater),
        cat("color", kColors)}},
      {{"Electronics", "Computers", "laptop"}, 350, 2800,
       {num("screen_size", "in", 13, 17, 0.1),
        fixed("storage", "gb", {256, 512, 1024, 2048}),
        cat("display_type", {"OLED", "LCD", "IPS"}),
        num("weight", "g", 900, 2800, 10),
        cat("color", {"black", "silver", "white"})}},
      {{"Electronics", "Computers", "tablet"}, 120, 1300,
       {num("screen_size", "in", 8, 13, 0.1),
        fixed("storage", "gb", {64, 128, 256, 512}),
        cat("display_type", {"OLED", "LCD", "IPS"}),
        num("weight", "g", 300, 700, 5)}},
      {{"Electronics", "Computers", "monitor"}, 100, 1200,
       {num("screen_size", "in", 21, 34, 0.5),
        cat("display_type", {"OLED", "LCD", "IPS"}),
        fixed("refresh_rate", "hz", {60, 75, 120, 144, 165, 240})}},
      {{"Electronics", "Phones", "smartphone"}, 150, 1500,
       {fixed("storage", "gb", {64, 128, 256, 512}),
        num("screen_size", "in", 5.8, 6.9, 0.1),
        num("battery_capacity", "mah", 3000, 5500, 50),
        cat("color", kColors)}},
      {{"Electronics", "Wearables", "smartwatch"}, 60, 800,
       {num("battery_life", "h", 18, 240, 6),
        cat("water_resistance", kWater),
        cat("color", kColors)}},
      {{"Electronics", "Cameras", "mirrorless camera"}, 450, 3500,
       {num("weight", "g", 350, 900, 5),
        fixed("megapixels", "mp", {20, 24, 26, 33, 45, 61}),
        cat("color", {"black", "silver"})}},
      {{"Electronics", "Cameras", "camera stabilizer"}, 60, 600,
       {num("weight", "g", 300, 1200, 10), num("battery_life", "h", 6, 14, 1)}},
      {{"Electronics", "Cameras", "memory card"}, 8, 200,
       {fixed("storage", "gb", {64, 128, 256, 512}),
        fixed("read_speed", "mbps", {100, 170, 200, 300})}},
      {{"Outdoor", "Footwear", "hiking boots"}, 60, 350,
       {num("weight", "g", 700, 1500, 10),
        cat("water_resistance", {"waterproof", "water resistant", "none"}),
        cat("color", {"brown", "black", "green"})}},
      {{"Outdoor", "Camping", "tent"}, 80, 900,
       {num("weight", "g", 1000, 4000, 50),
        num("capacity", "", 1, 4, 1),
        cat("season", {"3-season", "4-season"})}},
      {{"Outdoor", "Camping", "sleeping bag"}, 40, 500,
       {num("weight", "g", 600, 2000, 10), num("temperature_rating", "c", -10, 10, 1)}},
      {{"Outdoor", "Packs", "backpack"}, 30, 350,
       {num("volume", "l", 20, 70, 5), num("weight", "g", 700, 2200, 10), cat("color", kColors)}},
      {{"Outdoor", "Packs", "trekking poles"}, 25, 220,
       {num("weight", "g", 200, 600, 10), cat("material", {"aluminum", "carbon"})}},
  };
  return specs;
}

// Distinct made-up names; none is a substring of another or of any generated
// text, so text negation and brand inequality agree.
const std::vector<std::string> kBrands = {"Zorvex", "Quillon", "Brakka", "Tessary",
                                          "Vomir",  "Nuvaro",  "Kelbrix", "Ostrel",
                                          "Pyxen",  "Drummel", "Falqor", "Yrreth"};

const std::vector<std::string> kActivities = {"hiking", "running", "travel",  "camping",
                                              "gaming", "office",  "commuting", "photography"};

const std::vector<std::string> kSources = {"consumerreports", "rtings", "wirecutter", "techradar",
                                           "cnet",            "reddit", "forum",      "blog"};

const std::vector<std::string> kPros = {
    "Great battery life.",  "Very comfortable to use all day.", "Build feels sturdy.",
    "Excellent value for the price.", "Sound is clear and sharp.", "Setup was fast and smooth.",
    "Lightweight and easy to carry.", "Reliable so far."};
const std::vector<std::string> kCons = {
    "Terrible battery life.", "Feels flimsy.", "Too heavy for travel.", "Poor customer support.",
    "The app is slow.", "Broken after a month.", "Uncomfortable after an hour."};
const std::vector<std::string> kNeutral = {"It does the job.", "Arrived on time.",
                                           "Looks as pictured."};

std::string make_code(Rng& rng) {
  static const char* letters = "ABCDEFGHJKLMNPQRSTUVWXYZ";
  std::string s;
  for (int i = 0; i < 5; ++i) {
    s += (i % 2 == 0) ? letters[rng.index(24)] : static_cast<char>('0' + rng.index(10));
  }
  return s;
}

double snap(double v, double step) { return std::round(v / step) * step; }

}  // namespace

SyntheticData generate_synthetic_catalog(const SyntheticOptions& options) {
  Rng rng(options.seed);
  SyntheticData data;
  std::set<std::string> codes;
  const auto& specs = leaves();
  std::map<std::string, std::vector<std::size_t>> by_leaf;

  for (std::size_t i = 0; i < options.products; ++i) {
    const auto& spec = specs[i % specs.size()];
    catalog::Product p;
    char id[16];
    std::snprintf(id, sizeof id, "p%06zu", i + 1);
    p.id = id;
    std::string code;
    do {
      code = make_code(rng);
    } while (!codes.insert(code).second);
    const auto& brand = rng.pick(kBrands);
    const auto& leaf = spec.path.back();
    p.title = brand + " " + code + " " + leaf;
    p.category_path = spec.path;
    p.price = std::floor(rng.range(spec.price_lo, spec.price_hi)) + 0.99;
    p.rating = std::round(rng.range(2.0, 5.0) * 10.0) / 10.0;
    p.attributes["brand"] = brand;
    for (const auto& a : spec.attrs) {
      // About one value in twelve is missing, so facets see "unknown".
      if (a.name != "color" && rng.index(12) == 0) continue;
      if (!a.values.empty()) {
        p.attributes[a.name] = rng.pick(a.values);
      } else if (!a.choices.empty()) {
        p.attributes[a.name] = catalog::AttributeValue(rng.pick(a.choices), a.unit);
      } else {
        const double v = snap(rng.range(a.lo, a.hi), a.step);
        p.attributes[a.name] = catalog::AttributeValue(std::round(v * 100.0) / 100.0, a.unit);
      }
    }

    const std::size_t n_reviews = rng.index(options.max_reviews_per_product + 1);
    for (std::size_t r = 0; r < n_reviews; ++r) {
      catalog::Review rev;
      rev.id = p.id + "-r" + std::to_string(r + 1);
      rev.product_id = p.id;
      const double jitter = rng.range(-1.5, 1.5);
      rev.stars = std::clamp(static_cast<int>(std::lround(p.rating + jitter)), 1, 5);
      const auto& pool = rev.stars >= 4 ? kPros : rev.stars <= 2 ? kCons : kNeutral;
      rev.text = rng.pick(pool);
      if (rng.index(2) == 0) rev.text += " " + rng.pick(pool);
      p.review_ids.push_back(rev.id);
      data.reviews.push_back(std::move(rev));
    }
    by_leaf[leaf].push_back(data.products.size());
    data.products.push_back(std::move(p));
  }

  // Web corpus: buying guides per leaf naming a few products, the attributes
  // that matter, and a neighbouring category.
  std::size_t doc_no = 0;
  for (std::size_t li = 0; li < specs.size(); ++li) {
    const auto& spec = specs[li];
    const auto& leaf = spec.path.back();
    const auto& members = by_leaf[leaf];
    if (members.empty()) continue;
    const auto& neighbour = specs[(li + 1) % specs.size()].path.back();
    for (std::size_t d = 0; d < options.docs_per_leaf; ++d) {
      catalog::WebDocument doc;
      char id[16];
      std::snprintf(id, sizeof id, "w%05zu", ++doc_no);
      doc.id = id;
      doc.source = rng.pick(kSources);
      const auto& activity = rng.pick(kActivities);
      std::vector<std::string> picks;
      for (int k = 0; k < 3; ++k) picks.push_back(data.products[members[rng.index(members.size())]].title);
      switch (d % 3) {
        case 0: doc.title = "Best " + leaf + " for " + activity; break;
        case 1: doc.title = leaf + " buying guide"; break;
        default: doc.title = picks[0] + " review"; break;
      }
      const auto& a1 = spec.attrs[rng.index(spec.attrs.size())];
      const auto& a2 = spec.attrs[rng.index(spec.attrs.size())];
      const bool two = a1.name != a2.name;
      auto label = [](std::string s) {
        std::replace(s.begin(), s.end(), '_', ' ');
        return s;
      };
      doc.body = "We tested " + leaf + " for " + activity + ". " + "Our top pick is the " +
                 picks[0] + ", with the " + picks[1] + " and the " + picks[2] +
                 " close behind. Pay attention to " + label(a1.name) + (two ? " and " + label(a2.name) : "") +
                 " before you buy. Many buyers also pick up " + neighbour + " too.";
      doc.url = "https://" + doc.source + ".example/" + doc.id;
      const auto age_ms = static_cast<std::int64_t>(rng.range(0.0, 400.0) * 86'400'000.0);
      doc.published_at = options.as_of - std::chrono::milliseconds(age_ms);
      data.webdocs.push_back(std::move(doc));
    }
  }
  return data;
}

std::shared_ptr<const catalog::Catalog> build_catalog(const SyntheticData& data) {
  catalog::CatalogBuilder b;
  for (const auto& p : data.products) b.add_product(p);
  for (const auto& r : data.reviews) b.add_review(r);
  for (const auto& d : data.webdocs) b.add_webdoc(d);
  return b.build();
}

namespace {

template <class T>
void dump_jsonl(const std::filesystem::path& path, const std::vector<T>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : rows) out << Json(r).dump() << '\n';
}

}  // namespace

void write_jsonl(const std::filesystem::path& dir, const SyntheticData& data) {
  std::filesystem::create_directories(dir);
  dump_jsonl(dir / "products.jsonl", data.products);
  dump_jsonl(dir / "reviews.jsonl", data.reviews);
  dump_jsonl(dir / "webdocs.jsonl", data.webdocs);
}

std::string_view to_string(CaseCategory c) {
  switch (c) {
    case CaseCategory::kSimple: return "simple";
    case CaseCategory::kComplex: return "complex";
    case CaseCategory::kConsultative: return "consultative";
  }
  return "?";
}

CaseCategory case_category_from_string(std::string_view s) {
  for (auto c : {CaseCategory::kSimple, CaseCategory::kComplex, CaseCategory::kConsultative}) {
    if (to_string(c) == s) return c;
  }
  throw ValidationError("unknown case category '" + std::string(s) + "'");
}

void to_json(Json& j, const BenchmarkCase& c) {
  j = Json{{"id", c.id},
           {"query", c.query},
           {"category", to_string(c.category)},
           {"gold_items", c.gold_items}};
  if (c.context) j["context"] = *c.context;
  if (!c.leaf.empty()) j["leaf"] = c.leaf;
  if (!c.predicates.empty()) j["predicates"] = c.predicates;
}

void from_json(const Json& j, BenchmarkCase& c) {
  c.id = j.at("id").get<std::string>();
  c.query = j.at("query").get<std::string>();
  c.category = case_category_from_string(j.at("category").get<std::string>());
  c.gold_items = j.at("gold_items").get<std::set<std::string>>();
  if (c.gold_items.empty()) throw ValidationError("case " + c.id + ": empty gold set");
  c.context.reset();
  if (j.contains("context")) c.context = j["context"].get<memory::SessionContext>();
  c.leaf = j.value("leaf", std::string{});
  c.predicates = j.value("predicates", std::vector<planner::Constraint>{});
}

std::vector<BenchmarkCase> read_benchmark(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<BenchmarkCase> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(Json::parse(line).get<BenchmarkCase>());
    } catch (const std::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void write_benchmark(const std::filesystem::path& path, const std::vector<BenchmarkCase>& cases) {
  dump_jsonl(path, cases);
}

std::set<std::string> filter_gold(const catalog::Catalog& cat, const std::string& leaf,
                                  const std::vector<planner::Constraint>& predicates) {
  std::set<std::string> out;
  for (const auto& p : cat.products()) {
    if (p.leaf_category() != leaf) continue;
    if (std::all_of(predicates.begin(), predicates.end(),
                    [&](const auto& c) { return planner::satisfies(p, c); })) {
      out.insert(p.id);
    }
  }
  return out;
}

std::vector<BenchmarkCase> generate_synthetic_benchmark(const catalog::Catalog& cat,
                                                        std::uint64_t seed,
                                                        const BenchmarkCounts& counts,
                                                        std::vector<std::string>* notes) {
  using planner::ConstraintOp;
  using planner::Hardness;
  if (cat.products().empty()) throw ValidationError("empty catalog");
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::map<std::string, std::vector<const catalog::Product*>> by_leaf;
  for (const auto& p : cat.products()) by_leaf[p.leaf_category()].push_back(&p);
  std::vector<std::string> leaf_names;
  for (const auto& [l, _] : by_leaf) leaf_names.push_back(l);
  auto note = [&](std::string s) {
    if (notes) notes->push_back(std::move(s));
  };
  auto case_id = [](const char* prefix, std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s-%04zu", prefix, n);
    return std::string(buf);
  };

  std::vector<BenchmarkCase> out;

  std::set<std::size_t> used;
  for (std::size_t i = 0; i < counts.simple; ++i) {
    BenchmarkCase c;
    c.id = case_id("simple", i + 1);
    c.category = CaseCategory::kSimple;
    if (i % 4 == 3) {
      const auto& leaf = leaf_names[rng.index(leaf_names.size())];
      c.query = leaf;
      for (const auto* p : by_leaf[leaf]) c.gold_items.insert(p->id);
    } else {
      if (used.size() == cat.products().size()) {
        note("simple: ran out of distinct products after " + std::to_string(i) + " cases");
        break;
      }
      std::size_t k;
      do {
        k = rng.index(cat.products().size());
      } while (!used.insert(k).second);
      const auto& p = cat.products()[k];
      c.query = p.title;
      c.gold_items = {p.id};
    }
    out.push_back(std::move(c));
  }

  std::size_t made = 0;
  for (std::size_t attempt = 0; made < counts.complex && attempt < counts.complex * 20; ++attempt) {
    const auto& leaf = leaf_names[rng.index(leaf_names.size())];
    const auto& items = by_leaf[leaf];
    const auto* anchor = items[rng.index(items.size())];
    const auto* other = items[rng.index(items.size())];
    BenchmarkCase c;
    c.category = CaseCategory::kComplex;
    c.leaf = leaf;
    const double budget = std::ceil(anchor->price);
    const auto brand_it = other->attributes.find("brand");
    const std::size_t variant = rng.index(3);
    std::string q;
    if (variant == 0 && brand_it != other->attributes.end()) {
      const auto brand = brand_it->second.display();
      q = leaf + " under $" + text::format_number(budget) + " without " + brand;
      c.predicates = {{"price", ConstraintOp::kLe, budget, Hardness::kHard},
                      {"brand", ConstraintOp::kNe, brand, Hardness::kHard}};
    } else if (variant == 1 && anchor->attributes.count("color")) {
      const auto color = anchor->attributes.at("color").display();
      q = leaf + " with color " + color + " under $" + text::format_number(budget);
      c.predicates = {{"color", ConstraintOp::kEq, color, Hardness::kHard},
                      {"price", ConstraintOp::kLe, budget, Hardness::kHard}};
    } else {
      // A non-negative numeric attribute with a unit, at the anchor's value.
      std::vector<std::pair<std::string, catalog::AttributeValue>> numeric;
      for (const auto& [name, v] : anchor->attributes) {
        if (v.is_number() && !v.unit.empty() && v.number() >= 0) numeric.emplace_back(name, v);
      }
      if (numeric.empty() || brand_it == other->attributes.end()) continue;
      const auto& [name, v] = numeric[rng.index(numeric.size())];
      auto label = name;
      std::replace(label.begin(), label.end(), '_', ' ');
      const auto brand = brand_it->second.display();
      q = leaf + " ≥" + text::format_number(v.number()) + v.unit + " " + label + " without " + brand;
      c.predicates = {{name, ConstraintOp::kGe, v.number(), Hardness::kHard},
                      {"brand", ConstraintOp::kNe, brand, Hardness::kHard}};
    }
    c.gold_items = filter_gold(cat, leaf, c.predicates);
    if (c.gold_items.empty()) {
      note("complex: no item satisfies \"" + q + "\"; skipped");
      continue;
    }
    c.query = q;
    c.id = case_id("complex", ++made);
    out.push_back(std::move(c));
  }
  if (made < counts.complex) {
    note("complex: generated " + std::to_string(made) + " of " + std::to_string(counts.complex));
  }

  for (std::size_t i = 0; i < counts.consultative; ++i) {
    const auto& leaf = leaf_names[rng.index(leaf_names.size())];
    auto items = by_leaf[leaf];
    std::sort(items.begin(), items.end(), [](const auto* a, const auto* b) {
      return a->rating != b->rating ? a->rating > b->rating : a->id < b->id;
    });
    BenchmarkCase c;
    c.id = case_id("consultative", i + 1);
    c.category = CaseCategory::kConsultative;
    c.query = "best " + leaf + " for " + rng.pick(kActivities);
    c.leaf = leaf;
    for (std::size_t k = 0; k < items.size() && k < 5; ++k) c.gold_items.insert(items[k]->id);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace cogsearch::eval
