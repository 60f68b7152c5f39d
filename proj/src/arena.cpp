#include "exterm/arena.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "exterm/puct.hpp"
#include "exterm/rng.hpp"

namespace exterm {

std::string engine_name(const EngineSpec& spec) {
  char buf[64];
  switch (spec.kind) {
    case EngineSpec::Kind::puct:
      std::snprintf(buf, sizeof(buf), "puct:c=%g", spec.c);
      return buf;
    case EngineSpec::Kind::puct_term:
      std::snprintf(buf, sizeof(buf), "puct+term:c_e=%g,term=", spec.c);
      return std::string(buf) + canonical_key(*spec.term);
    case EngineSpec::Kind::shuss:
      std::snprintf(buf, sizeof(buf), "shuss:c_s=%g,k=%d,term=", spec.c, spec.top_k);
      return std::string(buf) + canonical_key(*spec.term);
  }
  return "?";
}

int choose_move(const EngineSpec& spec, const PGameState& state, long evals) {
  switch (spec.kind) {
    case EngineSpec::Kind::puct:
      return puct_search(state, evals, spec.c).move;
    case EngineSpec::Kind::puct_term:
      return puct_search(state, evals, spec.c, RootTerm{*spec.term, spec.term_weight})
          .move;
    case EngineSpec::Kind::shuss:
      return shuss_move(state, evals, spec.top_k, spec.c, *spec.term);
  }
  throw std::logic_error("choose_move: bad engine kind");
}

std::vector<Opening> make_openings(int count, int branching, int depth, int plies,
                                   std::uint64_t seed) {
  if (plies >= depth) throw std::invalid_argument("make_openings: plies must be < depth");
  Rng rng(derive_seed(seed, 0xA12E));
  std::vector<Opening> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Opening o;
    o.tree_seed = rng.next_u64();
    PGameState st;
    st.seed = o.tree_seed;
    st.branching = branching;
    st.depth_limit = depth;
    for (int p = 0; p < plies; ++p) {
      Evaluation ev = heuristic_eval(st);
      int best = 0;
      for (int a = 1; a < branching; ++a) {
        if (ev.priors[static_cast<std::size_t>(a)] >
            ev.priors[static_cast<std::size_t>(best)]) {
          best = a;
        }
      }
      st = st.child(best);
    }
    o.path = st.path;
    out.push_back(std::move(o));
  }
  return out;
}

namespace {

GameRecord play_one_game(const MatchConfig& cfg, const Opening& opening,
                         bool a_first) {
  PGameState st;
  st.seed = opening.tree_seed;
  st.branching = cfg.branching;
  st.depth_limit = cfg.depth;
  st.path = opening.path;

  GameRecord rec;
  rec.tree_seed = opening.tree_seed;
  rec.opening = opening.path;
  rec.engine_a_first = a_first;

  while (!st.terminal()) {
    const bool first_player_to_move = st.to_move() == 0;
    const EngineSpec& mover =
        (first_player_to_move == a_first) ? cfg.engine_a : cfg.engine_b;
    int move = choose_move(mover, st, cfg.evals);
    rec.moves.push_back(move);
    st = st.child(move);
  }

  // First-player payoff of the reached terminal.
  double h = hash_value(st.seed, st.path);
  rec.terminal_value = st.to_move() == 0 ? h : 1.0 - h;
  const bool first_won = rec.terminal_value >= 0.5;
  rec.a_won = (first_won == a_first);
  return rec;
}

}  // namespace

MatchResult play_match(const MatchConfig& cfg) {
  if (cfg.games < 2 || cfg.games % 2 != 0) {
    throw std::invalid_argument("play_match: games must be even and >= 2");
  }
  if (cfg.evals < 1) throw std::invalid_argument("play_match: evals must be >= 1");
  const int opening_count = cfg.games / 2;
  std::vector<Opening> openings =
      make_openings(opening_count, cfg.branching, cfg.depth, cfg.opening_plies, cfg.seed);

  MatchResult result;
  result.games = cfg.games;
  result.records.resize(static_cast<std::size_t>(cfg.games));

  int threads = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, cfg.games));

  std::atomic<int> next{0};
  auto run = [&]() {
    for (;;) {
      int g = next.fetch_add(1);
      if (g >= cfg.games) break;
      const Opening& opening = openings[static_cast<std::size_t>(g / 2)];
      result.records[static_cast<std::size_t>(g)] =
          play_one_game(cfg, opening, g % 2 == 0);
    }
  };
  if (threads == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(run);
    for (std::thread& t : pool) t.join();
  }

  for (const GameRecord& rec : result.records) {
    if (rec.a_won) result.a_wins += 1;
  }
  double p = static_cast<double>(result.a_wins) / static_cast<double>(result.games);
  result.winrate_a = p;
  result.ci95 = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(result.games));
  return result;
}

}  // namespace exterm
