#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <span>
#include <vector>

#include "exterm/expr.hpp"

namespace exterm {

// Per-atom playout statistics. An atom occurring several times in one
// playout still counts as a single playout for that atom.
struct AtomStats {
  std::uint64_t playouts = 0;
  double score_sum = 0.0;
};

struct AmafTable {
  std::uint64_t total_playouts = 0;
  double total_score = 0.0;
  std::array<AtomStats, kAtomCount> per_atom{};

  // Records a finished playout; throws if the expression is incomplete.
  void add_playout(const Expression& expr, double score);
};

// Sampling distribution over the legal atoms.
//
// With mean playout score mu, each atom's advantage is
// mu_a = mean(scores of playouts containing a) - mu (0 when unseen), the
// advantages are normalized by maxi = max_a |mu_a| over the legal set and the
// result is the temperature softmax p_a = softmax(tau * mu_a / maxi). With no
// statistics, or when every advantage vanishes, the distribution is uniform.
std::vector<double> amaf_probabilities(const AmafTable& table,
                                       std::span<const AtomId> legal,
                                       double temperature);

// Lock-free variant shared by discovery workers. Increments are atomic;
// readers take an approximate snapshot, which is all sampling needs.
class SharedAmafTable {
 public:
  void add_playout(const Expression& expr, double score);
  AmafTable snapshot() const;

 private:
  struct Cell {
    std::atomic<std::uint64_t> playouts{0};
    std::atomic<double> score_sum{0.0};
  };
  std::atomic<std::uint64_t> total_playouts_{0};
  std::atomic<double> total_score_{0.0};
  std::array<Cell, kAtomCount> cells_{};
};

}  // namespace exterm
