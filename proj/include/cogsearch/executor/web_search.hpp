#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cogsearch/catalog/catalog.hpp"
#include "cogsearch/executor/types.hpp"
#include "cogsearch/generative.hpp"

namespace cogsearch::executor {

struct WebQuery {
  std::string query;
  std::size_t max_results = 10;
};

// Source of web documents. The local corpus is the default; an HTTP client
// is a drop-in. Throws SourceUnavailable when the source cannot be reached.
class WebSource {
 public:
  virtual ~WebSource() = default;
  virtual std::string name() const = 0;
  virtual std::vector<catalog::WebDocument> search(const WebQuery& q) const = 0;
};

class SourceUnavailable : public Error {
 public:
  using Error::Error;
};

// BM25 over the catalog's web corpus. Never throws.
class LocalCorpusSource final : public WebSource {
 public:
  explicit LocalCorpusSource(std::shared_ptr<const catalog::Catalog> cat) : cat_(std::move(cat)) {}
  std::string name() const override { return "local"; }
  std::vector<catalog::WebDocument> search(const WebQuery& q) const override;

 private:
  std::shared_ptr<const catalog::Catalog> cat_;
};

// POSTs {"query", "max_results"} to http://host:port/path and expects a JSON
// array of WebDocument.
class HttpWebSource final : public WebSource {
 public:
  HttpWebSource(std::string host, int port, std::string path,
                std::chrono::milliseconds timeout = std::chrono::seconds(5));
  std::string name() const override { return "http"; }
  std::vector<catalog::WebDocument> search(const WebQuery& q) const override;

 private:
  std::string host_;
  int port_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

struct WebSearchConfig {
  ScoreWeights weights;
  double threshold = 0.3;
  double tau_days = 30.0;
  std::size_t k = 5;
  std::size_t max_variants = 3;
  std::size_t per_variant_results = 20;
  double default_authority = 0.5;
  std::map<std::string, double> authority;
  std::map<std::string, std::vector<std::string>> synonyms;

  static WebSearchConfig defaults();
};

void to_json(Json& j, const WebSearchConfig& c);
void from_json(const Json& j, WebSearchConfig& c);

// exp(-age_days / tau); documents dated after `as_of` count as age 0.
double freshness(Timestamp published, Timestamp as_of, double tau_days);

// Up to max_variants queries, the original first. Each further variant
// replaces one need token with a synonym, scanning tokens left to right.
std::vector<std::string> expand_synonyms(const std::string& need, const WebSearchConfig& config);

// Asks the backend for a JSON array of variants (schema
// "cogsearch.expand_request/v1"); any error falls back to expand_synonyms.
std::vector<std::string> expand_generative(const std::string& need, const WebSearchConfig& config,
                                           GenerativeBackend& backend);

// Expand, retrieve every variant, union by doc id, then score
//   Score = alpha * Rel + beta * Auth + gamma * Fresh
// with Rel = cosine(embed(title + " " + body), embed(need)) clamped to [0,1].
// Keeps Score >= threshold; top k by Score, ties by ascending doc id.
// Throws ValidationError on bad weights; SourceUnavailable propagates.
EvidenceSet web_search(const std::string& need, const WebSource& source,
                       const catalog::Embedder& embedder, const WebSearchConfig& config,
                       Timestamp as_of, GenerativeBackend* expander = nullptr);

}  // namespace cogsearch::executor
