#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cogsearch/catalog/types.hpp"
#include "cogsearch/error.hpp"
#include "cogsearch/executor/types.hpp"
#include "cogsearch/memory/memory_store.hpp"
#include "cogsearch/memory/session_context.hpp"
#include "cogsearch/planner/constraint.hpp"

namespace cogsearch::guider {

using Json = nlohmann::json;
using executor::CandidateSet;

struct FacetSelection {
  std::string attribute;
  std::string label;

  friend bool operator==(const FacetSelection&, const FacetSelection&) = default;
};

// Per-candidate preference weights plus the facets picked this session.
struct UserState {
  std::map<std::string, double> weights;
  std::vector<FacetSelection> active_facets;

  // 1.0 for ids without an entry.
  double weight(const std::string& id) const;
};

// Weight = 1 + clicks + 3 * add_to_cart + 1 per active facet whose bucket
// holds the item. Facet membership is passed in by the caller, which knows
// the buckets the selections were made from.
UserState derive_user_state(const memory::SessionContext& ctx, const CandidateSet& cands,
                            std::vector<FacetSelection> active_facets = {},
                            const std::map<std::string, std::vector<std::string>>& facet_members = {});

// Attribute value used for faceting. "price" maps to the product price with
// unit "$"; everything else reads the attribute map.
std::optional<catalog::AttributeValue> facet_value(const catalog::Product& p,
                                                   const std::string& attribute);

inline constexpr const char* kUnknownBucket = "unknown";

struct Bucket {
  std::string label;
  std::size_t count = 0;
  std::vector<std::string> members;  // candidate order
  // Numeric buckets cover [lo, hi), the last one [lo, hi].
  bool numeric = false;
  bool unknown = false;
  bool closed_hi = false;
  double lo = 0.0;
  double hi = 0.0;
  std::string value;  // categorical value (display form)

  bool matches(const std::optional<catalog::AttributeValue>& v) const;
};

struct Facet {
  std::string attribute;
  std::string label;  // human label, e.g. "battery" for battery_life
  std::string unit;
  bool numeric = false;
  std::vector<Bucket> buckets;
  double info_gain = 0.0;

  const Bucket* find(const std::string& bucket_label) const;
};

struct FacetConfig {
  std::size_t bucket_count = 4;
  std::size_t max_facets = 3;
  // Display labels; attributes not listed use their name with '_' -> ' '.
  std::map<std::string, std::string> labels;
  // Attributes never offered as facets.
  std::vector<std::string> excluded;

  static FacetConfig defaults();
  std::string label_for(const std::string& attribute) const;
};

void to_json(Json& j, const FacetConfig& c);
void from_json(const Json& j, FacetConfig& c);

// Partition of the candidates by one attribute. Numeric attributes (every
// present value a number) get up to bucket_count equal-width buckets over the
// observed range; empty buckets are dropped. Categorical buckets are ordered
// by count desc then label; "unknown" is always last.
Facet partition(const std::string& attribute, const CandidateSet& cands, const FacetConfig& config);

// Entropy in bits of the user-weighted bucket distribution:
//   p(i) = w_i / sum w,  p(b) = sum_{i in b} p(i),  H = -sum p(b) log2 p(b)
// Throws ValidationError on an empty candidate set.
double info_gain(const std::string& attribute, const CandidateSet& cands, const UserState& state,
                 const FacetConfig& config = FacetConfig::defaults());
double info_gain(const Facet& facet, const UserState& state);

// Gains for every attribute present in >= 2 candidates and not fixed by an
// active facet or hard constraint; zero-gain facets dropped. Top max_facets
// by gain, near-ties (1e-12) broken by attribute name.
std::vector<Facet> generate_facets(const CandidateSet& cands, const UserState& state,
                                   const std::vector<planner::Constraint>& constraints,
                                   const FacetConfig& config);

// Raised when the selection does not name a bucket of the current facets.
class StaleSelection : public Error {
 public:
  using Error::Error;
};

// Keeps exactly the bucket's members in their original order. When memory
// is given, a facet_click interaction is appended as a turn record.
CandidateSet apply_facet(const CandidateSet& cands, const std::vector<Facet>& facets,
                         const FacetSelection& selection, memory::MemoryStore* memory = nullptr,
                         const std::string& session_id = {}, Timestamp at = {});

// Hard constraints equivalent to a picked bucket: [lo, hi] for numeric
// buckets, "=" for text ones, nothing for "unknown".
std::vector<planner::Constraint> selection_constraints(const Facet& facet, const Bucket& bucket);

void to_json(Json& j, const FacetSelection& s);
void from_json(const Json& j, FacetSelection& s);
void to_json(Json& j, const Bucket& b);
void to_json(Json& j, const Facet& f);
void from_json(const Json& j, Bucket& b);
void from_json(const Json& j, Facet& f);

}  // namespace cogsearch::guider
