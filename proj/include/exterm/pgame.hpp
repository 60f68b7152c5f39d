#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "exterm/rng.hpp"

namespace exterm {

// A node of a deterministic synthetic game tree: branching B, fixed depth D,
// leaf values derived from a hash of (seed, path). Player 0 moves at even
// plies. Terminal hashes are read as the first player's payoff in [0, 1).
struct PGameState {
  std::uint64_t seed = 1;
  int branching = 2;
  int depth_limit = 1;
  std::vector<int> path;

  int to_move() const { return static_cast<int>(path.size()) & 1; }
  int depth() const { return static_cast<int>(path.size()); }
  bool terminal() const { return depth() >= depth_limit; }
  PGameState child(int move) const;  // throws on move out of [0, branching)
};

// Folds the path into a 64-bit state, one SplitMix64 step per move index
// (state <- splitmix64(state ^ (index + 1)), starting from splitmix64(seed)),
// then maps the top 53 bits into [0, 1). Bit-exact by construction.
double hash_value(std::uint64_t seed, std::span<const int> path);

std::vector<double> softmax(std::span<const double> values, double temperature);

struct Evaluation {
  double value = 0.0;           // in [0, 1], for the player to move
  std::vector<double> priors;   // over children; empty at terminals
};

// Stand-in for a policy/value network: value is a 2-ply lookahead over
// hashed frontier values, priors are a temperature-0.3 softmax over the
// children's 1-ply lookahead values, both from the mover's point of view.
Evaluation heuristic_eval(const PGameState& state);
inline constexpr double kPriorSoftmaxTemperature = 0.3;

// Exact minimax value of the subtree, from the first player's point of view
// (hash payoffs at the leaves). Refuses trees above 10^7 leaves.
double negamax_oracle(const PGameState& state);

// The move the player to move should pick under negamax_oracle.
int oracle_best_move(const PGameState& state);

}  // namespace exterm
