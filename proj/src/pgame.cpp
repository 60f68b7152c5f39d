#include "exterm/pgame.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exterm {

namespace {

inline std::uint64_t fold(std::uint64_t state, int move) {
  return splitmix64(state ^ static_cast<std::uint64_t>(move + 1));
}

inline double to_unit(std::uint64_t state) {
  return static_cast<double>(state >> 11) * 0x1.0p-53;
}

std::uint64_t path_state(std::uint64_t seed, std::span<const int> path) {
  std::uint64_t st = splitmix64(seed);
  for (int move : path) st = fold(st, move);
  return st;
}

// 1-ply lookahead below a node, first-player point of view; the frontier
// values are the raw hashes.
double lookahead1_value0(std::uint64_t node_state, int node_depth, int branching,
                         int depth_limit) {
  if (node_depth >= depth_limit) return to_unit(node_state);
  const bool maxing = (node_depth & 1) == 0;
  double best = maxing ? -1.0 : 2.0;
  for (int a = 0; a < branching; ++a) {
    double v = to_unit(fold(node_state, a));
    best = maxing ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

double minimax0(std::uint64_t node_state, int node_depth, int branching,
                int depth_limit) {
  if (node_depth >= depth_limit) return to_unit(node_state);
  const bool maxing = (node_depth & 1) == 0;
  double best = maxing ? -1.0 : 2.0;
  for (int a = 0; a < branching; ++a) {
    double v = minimax0(fold(node_state, a), node_depth + 1, branching, depth_limit);
    best = maxing ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

void check_tree_size(const PGameState& s) {
  double leaves = 1.0;
  for (int d = s.depth(); d < s.depth_limit; ++d) {
    leaves *= s.branching;
    if (leaves > 1e7) {
      throw std::invalid_argument("negamax_oracle: tree larger than 10^7 leaves");
    }
  }
}

}  // namespace

PGameState PGameState::child(int move) const {
  if (move < 0 || move >= branching) {
    throw std::invalid_argument("PGameState::child: move out of range");
  }
  if (terminal()) {
    throw std::logic_error("PGameState::child: state is terminal");
  }
  PGameState c = *this;
  c.path.push_back(move);
  return c;
}

double hash_value(std::uint64_t seed, std::span<const int> path) {
  return to_unit(path_state(seed, path));
}

std::vector<double> softmax(std::span<const double> values, double temperature) {
  if (values.empty()) throw std::invalid_argument("softmax: empty input");
  double hi = *std::max_element(values.begin(), values.end());
  std::vector<double> out(values.size());
  double z = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::exp((values[i] - hi) / temperature);
    z += out[i];
  }
  for (double& v : out) v /= z;
  return out;
}

Evaluation heuristic_eval(const PGameState& state) {
  const std::uint64_t st = path_state(state.seed, state.path);
  const bool maxing = state.to_move() == 0;
  if (state.terminal()) {
    double h = to_unit(st);
    return {maxing ? h : 1.0 - h, {}};
  }
  std::vector<double> look(static_cast<std::size_t>(state.branching));
  for (int a = 0; a < state.branching; ++a) {
    look[static_cast<std::size_t>(a)] = lookahead1_value0(
        fold(st, a), state.depth() + 1, state.branching, state.depth_limit);
  }
  Evaluation ev;
  double v0 = maxing ? *std::max_element(look.begin(), look.end())
                     : *std::min_element(look.begin(), look.end());
  ev.value = maxing ? v0 : 1.0 - v0;
  if (!maxing) {
    for (double& v : look) v = 1.0 - v;
  }
  ev.priors = softmax(look, kPriorSoftmaxTemperature);
  return ev;
}

double negamax_oracle(const PGameState& state) {
  check_tree_size(state);
  return minimax0(path_state(state.seed, state.path), state.depth(),
                  state.branching, state.depth_limit);
}

int oracle_best_move(const PGameState& state) {
  if (state.terminal()) {
    throw std::logic_error("oracle_best_move: state is terminal");
  }
  check_tree_size(state);
  const std::uint64_t st = path_state(state.seed, state.path);
  const bool maxing = state.to_move() == 0;
  int best_move = 0;
  double best = maxing ? -1.0 : 2.0;
  for (int a = 0; a < state.branching; ++a) {
    double v = minimax0(fold(st, a), state.depth() + 1, state.branching,
                        state.depth_limit);
    if (maxing ? v > best : v < best) {
      best = v;
      best_move = a;
    }
  }
  return best_move;
}

}  // namespace exterm
