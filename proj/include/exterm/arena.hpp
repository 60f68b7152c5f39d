#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "exterm/expr.hpp"
#include "exterm/pgame.hpp"

namespace exterm {

// An engine configuration for head-to-head play. `c` is c_p for plain PUCT,
// c_e for PUCT with an added root term, c_s for SHUSS.
struct EngineSpec {
  enum class Kind { puct, puct_term, shuss };
  Kind kind = Kind::puct;
  double c = 0.2;
  std::optional<Expression> term;
  double term_weight = 1.0;
  int top_k = 5;  // shuss only
};

std::string engine_name(const EngineSpec& spec);
int choose_move(const EngineSpec& spec, const PGameState& state, long evals);

struct Opening {
  std::uint64_t tree_seed = 0;
  std::vector<int> path;
};

// Fresh trees with best-prior book moves played first; every opening is
// played from both sides.
std::vector<Opening> make_openings(int count, int branching, int depth, int plies,
                                   std::uint64_t seed);

struct GameRecord {
  std::uint64_t tree_seed = 0;
  std::vector<int> opening;
  std::vector<int> moves;  // after the opening
  bool engine_a_first = false;
  bool a_won = false;
  double terminal_value = 0.0;  // first-player payoff at the end
};

struct MatchResult {
  int games = 0;
  int a_wins = 0;
  double winrate_a = 0.0;  // in [0, 1]
  double ci95 = 0.0;       // half-width of the 95% binomial interval
  std::vector<GameRecord> records;
};

struct MatchConfig {
  EngineSpec engine_a;
  EngineSpec engine_b;
  long evals = 32;
  int games = 400;  // must be even; games/2 openings, each side-swapped
  int branching = 8;
  int depth = 8;
  int opening_plies = 2;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency
};

// Plays every opening twice with sides swapped. Both engines and the game
// are deterministic, so the result is a pure function of the config; games
// only run concurrently.
MatchResult play_match(const MatchConfig& config);

}  // namespace exterm
