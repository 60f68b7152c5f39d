#pragma once

#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "exterm/expr.hpp"
#include "exterm/halving.hpp"
#include "exterm/pgame.hpp"

namespace exterm {

// One cached root position: for every move above the prior cutoff, the
// sequence of evaluations that repeated search after the move would produce,
// plus a label move. Arms are sorted by descending prior; prefix sums are
// built at load time so replay needs no arithmetic on the trace.
struct CachedArm {
  int move = 0;
  double prior = 0.0;
  std::vector<double> evals;
  std::vector<double> prefix;  // rebuilt on load, not serialized

  void rebuild_prefix();
};

struct CachedState {
  std::string state_id;
  std::uint64_t tree_seed = 0;
  int branching = 0;
  int depth = 0;
  std::vector<int> path;
  int label_move = 0;
  std::vector<CachedArm> arms;
};

struct DatasetHeader {
  int format_version = 1;
  int trace_len = 38;
  int branching = 8;
  int depth = 8;
  double c_inner = 0.2;
  long label_budget = 512;
  int opening_plies = 2;
  std::uint64_t seed = 0;
  long relabel_budget = 0;  // 0: labels come from the reference search
};

struct Dataset {
  DatasetHeader header;
  std::vector<CachedState> states;
};

inline constexpr double kPriorCutoff = 0.01;

struct GenParams {
  int state_count = 0;
  int branching = 8;
  int depth = 8;
  int trace_len = 38;
  double c_inner = 0.2;
  long label_budget = 512;
  int opening_plies = 2;
  std::uint64_t seed = 0;
};

struct GenStats {
  long attempts = 0;
  long skipped = 0;
};

// Builds a dataset from fresh synthetic trees: positions are reached by
// opening_plies best-prior moves from a random root, moves below the prior
// cutoff are dropped, positions with fewer than two qualifying arms are
// resampled. Each arm gets trace_len successive evaluations from a
// persistent search after the move (constant c_inner); the label is the
// choice of a large-budget reference search, restricted to the stored arms.
Dataset generate_dataset(const GenParams& params, GenStats* stats = nullptr);

// Replaces every label by the Sequential Halving winner (term "sc",
// lambda 1/2) replayed on the cached traces with the given budget. Throws,
// naming the state, if some trace is too short for the schedule.
Dataset relabel_curriculum(const Dataset& dataset, long sh_budget);

struct ScoringPolicy {
  long budget = 32;       // evaluations per state
  int top_k = 5;          // arms entering Sequential Halving
  bool early_stop = true;
  long early_stop_threshold = 80;
  long early_stop_after = 200;
};

struct ScoreResult {
  long hits = 0;
  bool early_stopped = false;
};

// Memoization keyed by the canonical prefix form. Bind one cache to one
// (dataset, policy) pair; concurrent lookups/inserts are fine, duplicated
// computation is harmless because scoring is pure.
class ScoreCache {
 public:
  std::optional<ScoreResult> lookup(const std::string& key) const;
  void insert(const std::string& key, ScoreResult result);
  std::size_t size() const;
  std::uint64_t hit_count() const { return hits_.load(std::memory_order_relaxed); }

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, ScoreResult> map_;
  mutable std::atomic<std::uint64_t> hits_{0};
};

// Number of states whose Sequential Halving replay (budget, top-k arms,
// lambda 1/2, cut by `term`) lands on the label move. With early stopping,
// a term below the threshold after early_stop_after states returns its
// partial count, flagged.
ScoreResult score_expression(const Expression& term, const Dataset& dataset,
                             const ScoringPolicy& policy, ScoreCache* cache = nullptr);

struct ReportRow {
  std::string term_prefix;
  std::string term_infix;
  long hits = 0;
  double accuracy_pct = 0.0;
};

// Scores each term with early stopping disabled; rows follow input order.
std::vector<ReportRow> accuracy_report(std::span<const Expression> terms,
                                       const Dataset& dataset, ScoringPolicy policy);

// Largest per-arm replay any state of the dataset can demand at this budget;
// used to validate budgets against trace_len before running.
long worst_case_arm_consumption(const Dataset& dataset, long budget, int top_k);

// Line-delimited text format: a header object, then one object per state,
// doubles printed with 17 significant digits. Loading revalidates the
// invariants and rebuilds the prefix sums.
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace exterm
