#pragma once

#include <memory>
#include <vector>

#include "cogsearch/engine/engine.hpp"
#include "cogsearch/eval/synthetic.hpp"

namespace cogsearch::eval {

struct BenchOptions {
  std::size_t k = 5;
  std::size_t parallelism = 1;
  std::uint64_t seed = 0;  // recorded in the report
};

// Runs every case through a fresh session of one engine and scores the
// decider's ranking (the fused ranking when the decider is ablated) with
// acc_at_k. Case failures score 0 and are flagged. Reports carry no wall
// times, so equal inputs give byte-identical dumps. When the config has no
// as_of, the newest web document's date is used as the reference time.
Json run_benchmark(const std::vector<BenchmarkCase>& cases,
                   std::shared_ptr<const catalog::Catalog> cat, engine::EngineConfig config,
                   const BenchOptions& options);

// Per-category table for terminals.
std::string format_summary(const Json& report);

}  // namespace cogsearch::eval
