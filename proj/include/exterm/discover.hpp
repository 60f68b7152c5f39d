#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "exterm/expr.hpp"

namespace exterm {

enum class SampleMode { uniform, amaf };

struct DiscoveryConfig {
  SampleMode mode = SampleMode::uniform;
  double temperature = 5.0;
  int max_len = kDefaultMaxLen;
  int workers = 1;
  std::uint64_t expression_budget = 0;  // 0 = unbounded
  double seconds_budget = 0.0;          // 0 = unbounded; at least one must be set
  std::uint64_t seed = 0;
  bool shared_amaf = true;  // false: every worker keeps its own statistics
};

struct Improvement {
  double elapsed_seconds = 0.0;  // wall clock, informational only
  std::uint64_t evaluated = 0;
  double score = 0.0;
  std::string term_prefix;
  std::string term_infix;
};

struct DiscoveryLog {
  Expression best_expression{1};
  double best_score = -1.0;
  std::uint64_t evaluated_count = 0;
  std::uint64_t scorer_failures = 0;
  std::vector<Improvement> timeline;  // best-so-far, strictly increasing scores
};

using Scorer = std::function<double(const Expression&)>;

// Outer search loop: workers sample complete expressions (uniformly or with
// the AMAF prior), score them, feed AMAF statistics back and track the best
// score seen. The scorer must be pure; a throwing scorer counts the
// expression as 0. Single-worker runs are deterministic given the seed.
DiscoveryLog discover(const DiscoveryConfig& config, const Scorer& scorer);

}  // namespace exterm
