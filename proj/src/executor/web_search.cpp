#include "cogsearch/executor/web_search.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cogsearch/util/text.hpp"
#include "httplib.h"

namespace cogsearch::executor {

std::vector<catalog::WebDocument> LocalCorpusSource::search(const WebQuery& q) const {
  std::vector<catalog::WebDocument> out;
  for (const auto& hit : cat_->web_bm25_search(q.query, q.max_results)) {
    if (const auto* d = cat_->find_webdoc(hit.id)) out.push_back(*d);
  }
  return out;
}

HttpWebSource::HttpWebSource(std::string host, int port, std::string path,
                             std::chrono::milliseconds timeout)
    : host_(std::move(host)), port_(port), path_(std::move(path)), timeout_(timeout) {}

std::vector<catalog::WebDocument> HttpWebSource::search(const WebQuery& q) const {
  httplib::Client cli(host_, port_);
  const auto secs = timeout_.count() / 1000;
  const auto usecs = (timeout_.count() % 1000) * 1000;
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  const Json body{{"query", q.query}, {"max_results", q.max_results}};
  auto res = cli.Post(path_, body.dump(), "application/json");
  if (!res) throw SourceUnavailable("web source unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw SourceUnavailable("web source returned HTTP " + std::to_string(res->status));
  }
  try {
    return Json::parse(res->body).get<std::vector<catalog::WebDocument>>();
  } catch (const std::exception& e) {
    throw SourceUnavailable(std::string("web source returned invalid documents: ") + e.what());
  }
}

WebSearchConfig WebSearchConfig::defaults() {
  WebSearchConfig c;
  c.authority = {{"consumerreports", 0.9}, {"rtings", 0.9},   {"wirecutter", 0.85},
                 {"techradar", 0.75},      {"cnet", 0.75},    {"reddit", 0.4},
                 {"forum", 0.35},          {"blog", 0.3}};
  c.synonyms = {{"best", {"top", "recommended"}},
                {"cheap", {"budget", "affordable"}},
                {"laptop", {"notebook"}},
                {"headphones", {"headset"}},
                {"earbuds", {"earphones"}},
                {"hiking", {"trekking"}},
                {"running", {"jogging"}},
                {"camping", {"outdoor"}},
                {"travel", {"commute"}},
                {"gaming", {"games"}},
                {"review", {"comparison"}},
                {"phone", {"smartphone"}}};
  return c;
}

void to_json(Json& j, const WebSearchConfig& c) {
  j = Json{{"weights", c.weights},
           {"threshold", c.threshold},
           {"tau_days", c.tau_days},
           {"k", c.k},
           {"max_variants", c.max_variants},
           {"per_variant_results", c.per_variant_results},
           {"default_authority", c.default_authority},
           {"authority", c.authority},
           {"synonyms", c.synonyms}};
}

void from_json(const Json& j, WebSearchConfig& c) {
  c.weights = j.at("weights").get<ScoreWeights>();
  c.threshold = j.at("threshold").get<double>();
  c.tau_days = j.at("tau_days").get<double>();
  c.k = j.at("k").get<std::size_t>();
  c.max_variants = j.at("max_variants").get<std::size_t>();
  c.per_variant_results = j.at("per_variant_results").get<std::size_t>();
  c.default_authority = j.at("default_authority").get<double>();
  c.authority = j.at("authority").get<std::map<std::string, double>>();
  c.synonyms = j.at("synonyms").get<std::map<std::string, std::vector<std::string>>>();
}

double freshness(Timestamp published, Timestamp as_of, double tau_days) {
  const double age_ms = std::max<double>(0.0, static_cast<double>((as_of - published).count()));
  return std::exp(-(age_ms / 86'400'000.0) / tau_days);
}

std::vector<std::string> expand_synonyms(const std::string& need, const WebSearchConfig& config) {
  std::vector<std::string> out{need};
  const auto toks = text::tokenize(need);
  for (std::size_t i = 0; i < toks.size() && out.size() < config.max_variants; ++i) {
    auto it = config.synonyms.find(toks[i]);
    if (it == config.synonyms.end()) continue;
    for (const auto& syn : it->second) {
      if (out.size() >= config.max_variants) break;
      auto variant = toks;
      variant[i] = syn;
      auto q = text::join(variant, " ");
      if (std::find(out.begin(), out.end(), q) == out.end()) out.push_back(std::move(q));
    }
  }
  return out;
}

std::vector<std::string> expand_generative(const std::string& need, const WebSearchConfig& config,
                                           GenerativeBackend& backend) {
  try {
    const Json prompt{{"schema", "cogsearch.expand_request/v1"},
                      {"need", need},
                      {"max_variants", config.max_variants - 1},
                      {"response_schema", "array of strings"}};
    const auto reply = Json::parse(backend.complete(prompt.dump(), std::chrono::seconds(5)));
    std::vector<std::string> out{need};
    for (const auto& v : reply) {
      auto q = text::trim(v.get<std::string>());
      if (out.size() >= config.max_variants) break;
      if (!q.empty() && std::find(out.begin(), out.end(), q) == out.end()) out.push_back(q);
    }
    return out;
  } catch (const std::exception&) {
    return expand_synonyms(need, config);
  }
}

EvidenceSet web_search(const std::string& need, const WebSource& source,
                       const catalog::Embedder& embedder, const WebSearchConfig& config,
                       Timestamp as_of, GenerativeBackend* expander) {
  config.weights.validate();
  EvidenceSet out;
  out.expansion_queries =
      expander ? expand_generative(need, config, *expander) : expand_synonyms(need, config);

  std::map<std::string, catalog::WebDocument> pool;
  for (const auto& q : out.expansion_queries) {
    for (auto& d : source.search({q, config.per_variant_results})) pool.emplace(d.id, std::move(d));
  }

  const auto need_vec = embedder.embed(need);
  const auto& w = config.weights;
  for (const auto& [id, d] : pool) {
    EvidenceEntry e;
    e.doc_id = id;
    e.rel = std::clamp(catalog::cosine(embedder.embed(catalog::Catalog::indexed_text(d)), need_vec),
                       0.0, 1.0);
    auto a = config.authority.find(d.source);
    e.auth = a == config.authority.end() ? config.default_authority : a->second;
    e.fresh = freshness(d.published_at, as_of, config.tau_days);
    e.score = w.alpha * e.rel + w.beta * e.auth + w.gamma * e.fresh;
    if (e.score < config.threshold) continue;
    e.title = d.title;
    e.source = d.source;
    e.url = d.url;
    e.body = d.body;
    out.docs.push_back(std::move(e));
  }
  std::sort(out.docs.begin(), out.docs.end(), [](const auto& a, const auto& b) {
    return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
  });
  if (out.docs.size() > config.k) out.docs.resize(config.k);
  return out;
}

}  // namespace cogsearch::executor
