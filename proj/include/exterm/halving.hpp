#pragma once

#include <functional>
#include <span>
#include <vector>

#include "exterm/expr.hpp"

namespace exterm {

// One root move during a (simulated or live) search. Evaluations live in
// trace; prefix[i] is the sum of the first i of them, so the score sum at
// any consumed count is a single lookup.
struct RootArm {
  int move = 0;
  double prior = 0.0;
  std::vector<double> trace;
  std::vector<double> prefix = {0.0};
  int consumed = 0;

  static RootArm from_trace(int move, double prior, std::vector<double> trace);

  void append(double eval);
  void set_trace(std::span<const double> evals);
  int trace_len() const { return static_cast<int>(trace.size()); }
  // Draws the prefix sums can serve; equals trace_len except when prefix
  // sums were installed without their backing trace.
  int available() const { return static_cast<int>(prefix.size()) - 1; }
  double score_sum() const { return prefix[static_cast<std::size_t>(consumed)]; }
};

struct HalvingRound {
  int samples_per_arm = 0;  // t_r
  int arms_in_round = 0;    // |S_r|
};

struct HalvingSchedule {
  std::vector<HalvingRound> rounds;
  long total_consumed = 0;
};

// Survivors of one cut: ceil(lambda * n), clamped below n so every round
// makes progress, and never below 1.
int survivor_count(int arms, double lambda);

// Fixed-budget halving schedule: per round t_r = floor(T_r / (|S_r| (R - r)))
// samples per arm, then the worst arms are cut down to survivor_count.
// Requires budget >= arm_count so round 0 statistics can exist.
HalvingSchedule sh_schedule(long budget, int arm_count, double lambda = 0.5);

// Total draws an arm consumes if it survives every round.
long max_arm_consumption(long budget, int arm_count, double lambda = 0.5);

// Greedy argmax selection of the arms to keep: repeatedly picks the
// not-yet-kept arm maximizing evaluate(term, ctx) with
// ctx = {sc = score sum, pr = prior, nbp = consumed, nb = nb_total}.
// Strict comparison, so ties go to the lowest index. Returns indices into
// `active` resolution (subset form) or into `arms`, in pick order.
std::vector<int> select_survivors(std::span<const RootArm> arms, double lambda,
                                  const Expression& term, double nb_total);
std::vector<int> select_survivors_subset(std::span<const RootArm> arms,
                                         std::span<const int> active, double lambda,
                                         const Expression& term, double nb_total);

// Draws one more evaluation for an arm in live mode.
using ArmSampler = std::function<double(int arm_index)>;

// Runs the full schedule over the arms and returns the index of the last
// survivor. Without a sampler, evaluations replay the stored trace in order
// and exhausting it is an error; with one, fresh evaluations are appended.
int run_sequential_halving(std::span<RootArm> arms, long budget, double lambda,
                           const Expression& term,
                           const ArmSampler* sampler = nullptr);

// Drops arms with prior < min_prior, then keeps the k best priors
// (stable on ties); result sorted by descending prior. Throws if nothing
// qualifies.
std::vector<RootArm> filter_top_prior(std::span<const RootArm> arms, int k,
                                      double min_prior = 0.01);

// Q~ = Q + C * standard_amaf / n_root_a.
double qtilde(double q, double standard_amaf, long n_root_a, double c);

}  // namespace exterm
