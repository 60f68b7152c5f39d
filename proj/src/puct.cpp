#include "exterm/puct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exterm/halving.hpp"

namespace exterm {

double puct_score(double q, double prior, double parent_visits, double child_visits,
                  double c) {
  return q + c * prior * std::sqrt(parent_visits) / (1.0 + child_visits);
}

double augmented_root_score(double q, double prior, double parent_visits,
                            double child_visits, double c_e, const Expression& term,
                            const EvalContext& ctx) {
  return puct_score(q, prior, parent_visits, child_visits, c_e) + evaluate(term, ctx);
}

SearchTree::SearchTree(PGameState root, double c, std::optional<RootTerm> root_term)
    : root_state_(std::move(root)), c_(c), root_term_(std::move(root_term)) {
  if (root_term_ && !root_term_->term.complete()) {
    throw std::invalid_argument("SearchTree: root term must be complete");
  }
}

int SearchTree::create_node(const PGameState& state) {
  SearchNode n;
  Evaluation ev = heuristic_eval(state);
  n.value = ev.value;
  n.visits = 1;
  n.terminal = state.terminal();
  if (!n.terminal) {
    const std::size_t b = static_cast<std::size_t>(state.branching);
    n.priors = std::move(ev.priors);
    n.child_visits.assign(b, 0);
    n.child_value_sum.assign(b, 0.0);
    n.child_index.assign(b, -1);
  }
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

double SearchTree::selection_value(const SearchNode& n, int a, bool at_root) const {
  const std::size_t ai = static_cast<std::size_t>(a);
  double s = puct_score(n.q(a), n.priors[ai], n.visits, n.child_visits[ai], c_);
  if (at_root && root_term_) {
    EvalContext ctx;
    ctx.sc = n.child_value_sum[ai];
    ctx.pr = n.priors[ai];
    ctx.nbp = static_cast<double>(n.child_visits[ai]);
    ctx.nb = static_cast<double>(n.visits);
    s += root_term_->weight * evaluate(root_term_->term, ctx);
  }
  return s;
}

int SearchTree::select_move(int node_index, bool at_root) const {
  const SearchNode& n = nodes_[static_cast<std::size_t>(node_index)];
  int best = 0;
  double best_value = selection_value(n, 0, at_root);
  for (int a = 1; a < static_cast<int>(n.priors.size()); ++a) {
    double v = selection_value(n, a, at_root);
    if (v > best_value) {
      best_value = v;
      best = a;
    }
  }
  return best;
}

double SearchTree::descend_once() {
  ++descents_;
  if (nodes_.empty()) {
    int root = create_node(root_state_);
    return nodes_[static_cast<std::size_t>(root)].value;
  }

  edges_.clear();
  int ni = 0;
  PGameState st = root_state_;
  double v = 0.0;
  for (;;) {
    if (nodes_[static_cast<std::size_t>(ni)].terminal) {
      nodes_[static_cast<std::size_t>(ni)].visits += 1;
      v = nodes_[static_cast<std::size_t>(ni)].value;
      break;
    }
    int a = select_move(ni, ni == 0);
    int child = nodes_[static_cast<std::size_t>(ni)].child_index[static_cast<std::size_t>(a)];
    if (child < 0) {
      st = st.child(a);
      int ci = create_node(st);  // may reallocate nodes_
      nodes_[static_cast<std::size_t>(ni)].child_index[static_cast<std::size_t>(a)] = ci;
      edges_.push_back({ni, a});
      v = nodes_[static_cast<std::size_t>(ci)].value;
      break;
    }
    edges_.push_back({ni, a});
    st = st.child(a);
    ni = child;
  }

  for (auto it = edges_.rbegin(); it != edges_.rend(); ++it) {
    v = 1.0 - v;
    SearchNode& parent = nodes_[static_cast<std::size_t>(it->first)];
    parent.child_visits[static_cast<std::size_t>(it->second)] += 1;
    parent.child_value_sum[static_cast<std::size_t>(it->second)] += v;
    parent.visits += 1;
  }
  return v;
}

const SearchNode& SearchTree::root() const {
  if (nodes_.empty()) throw std::logic_error("SearchTree::root: no descents yet");
  return nodes_[0];
}

int SearchTree::most_visited_root_move() const {
  const SearchNode& r = root();
  if (r.terminal) throw std::logic_error("most_visited_root_move: terminal root");
  int most = *std::max_element(r.child_visits.begin(), r.child_visits.end());
  int best = -1;
  double best_value = 0.0;
  for (int a = 0; a < static_cast<int>(r.priors.size()); ++a) {
    if (r.child_visits[static_cast<std::size_t>(a)] != most) continue;
    double v = selection_value(r, a, true);
    if (best < 0 || v > best_value) {
      best = a;
      best_value = v;
    }
  }
  return best;
}

SearchResult puct_search(const PGameState& root, long budget, double c,
                         std::optional<RootTerm> root_term) {
  if (root.terminal()) throw std::invalid_argument("puct_search: terminal root");
  if (budget < 1) throw std::invalid_argument("puct_search: budget must be >= 1");
  SearchTree tree(root, c, std::move(root_term));
  for (long i = 0; i < budget; ++i) tree.descend_once();
  return {tree.most_visited_root_move(), std::move(tree)};
}

int shuss_move(const PGameState& root, long budget, int top_k, double c_s,
               const Expression& term) {
  if (root.terminal()) throw std::invalid_argument("shuss_move: terminal root");
  if (top_k < 2) throw std::invalid_argument("shuss_move: top_k must be >= 2");
  if (budget < top_k) throw std::invalid_argument("shuss_move: budget must be >= top_k");
  if (!term.complete()) throw std::invalid_argument("shuss_move: incomplete term");

  Evaluation ev = heuristic_eval(root);
  std::vector<RootArm> candidates;
  int best_prior_move = 0;
  for (int a = 0; a < root.branching; ++a) {
    if (ev.priors[static_cast<std::size_t>(a)] >
        ev.priors[static_cast<std::size_t>(best_prior_move)]) {
      best_prior_move = a;
    }
    RootArm arm;
    arm.move = a;
    arm.prior = ev.priors[static_cast<std::size_t>(a)];
    candidates.push_back(std::move(arm));
  }
  std::vector<RootArm> arms;
  try {
    arms = filter_top_prior(candidates, top_k, 0.01);
  } catch (const std::runtime_error&) {
    return best_prior_move;  // nothing above the cutoff
  }
  if (arms.size() == 1) return arms[0].move;
  if (budget < static_cast<long>(arms.size())) return arms[0].move;

  std::vector<SearchTree> trees;
  trees.reserve(arms.size());
  for (const RootArm& a : arms) trees.emplace_back(root.child(a.move), c_s);

  // One draw = one more descent of the arm's tree; flip once more so the
  // evaluation is from the root player's point of view.
  ArmSampler sampler = [&trees](int arm_index) {
    return 1.0 - trees[static_cast<std::size_t>(arm_index)].descend_once();
  };
  int winner = run_sequential_halving(arms, budget, 0.5, term, &sampler);
  return arms[static_cast<std::size_t>(winner)].move;
}

}  // namespace exterm
