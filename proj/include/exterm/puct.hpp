#pragma once

#include <optional>
#include <vector>

#include "exterm/expr.hpp"
#include "exterm/pgame.hpp"

namespace exterm {

// PUCT selection value: Q(s,a) + c * P(s,a) * sqrt(N(s)) / (1 + N(s,a)).
double puct_score(double q, double prior, double parent_visits, double child_visits,
                  double c);

// Root-only selection value: puct_score with constant c_e plus the term
// evaluated on the root edge statistics.
double augmented_root_score(double q, double prior, double parent_visits,
                            double child_visits, double c_e, const Expression& term,
                            const EvalContext& ctx);

// Extra exploration term applied at the root during descent, with an
// optional multiplier (1 = the term is added as-is).
struct RootTerm {
  Expression term;
  double weight = 1.0;
};

// Tree node statistics. Values are stored from the point of view of the
// player to move at the node; backup flips them every ply. visits counts the
// node's own evaluation plus every later descent through it, so for
// non-terminal nodes N(s) = 1 + sum_a N(s,a).
struct SearchNode {
  int visits = 0;
  double value = 0.0;
  bool terminal = false;
  std::vector<double> priors;
  std::vector<int> child_visits;
  std::vector<double> child_value_sum;
  std::vector<int> child_index;

  double q(int a) const {
    return child_visits[static_cast<std::size_t>(a)] > 0
               ? child_value_sum[static_cast<std::size_t>(a)] /
                     child_visits[static_cast<std::size_t>(a)]
               : 0.0;
  }
};

// A persistent PUCT tree. Each descend_once() call runs one
// select/expand/backup pass and returns the new evaluation expressed from
// the root player's point of view, so successive calls yield the evaluation
// sequence a root move produces under repeated search.
class SearchTree {
 public:
  SearchTree(PGameState root, double c, std::optional<RootTerm> root_term = {});

  double descend_once();
  int most_visited_root_move() const;  // ties: selection score, then index
  long descents() const { return descents_; }
  const SearchNode& root() const;
  const PGameState& root_state() const { return root_state_; }

 private:
  int create_node(const PGameState& state);
  int select_move(int node_index, bool at_root) const;
  double selection_value(const SearchNode& n, int a, bool at_root) const;

  PGameState root_state_;
  double c_;
  std::optional<RootTerm> root_term_;
  std::vector<SearchNode> nodes_;
  std::vector<std::pair<int, int>> edges_;  // descent scratch
  long descents_ = 0;
};

struct SearchResult {
  int move = 0;
  SearchTree tree;
};

// Runs `budget` descents and picks the most visited root move.
SearchResult puct_search(const PGameState& root, long budget, double c,
                         std::optional<RootTerm> root_term = {});

// Root move by Sequential Halving over the prior-filtered children. Each arm
// draw is one further descent of a persistent PUCT tree (constant c_s)
// rooted after the move, recorded from the root player's point of view; the
// per-round cut maximizes `term`. With fewer than two arms above the prior
// cutoff the best-prior move is returned directly.
int shuss_move(const PGameState& root, long budget, int top_k, double c_s,
               const Expression& term);

}  // namespace exterm
