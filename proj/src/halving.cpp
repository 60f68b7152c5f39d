#include "exterm/halving.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace exterm {

RootArm RootArm::from_trace(int move, double prior, std::vector<double> trace) {
  RootArm a;
  a.move = move;
  a.prior = prior;
  a.trace = std::move(trace);
  a.prefix.resize(a.trace.size() + 1);
  a.prefix[0] = 0.0;
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    a.prefix[i + 1] = a.prefix[i] + a.trace[i];
  }
  return a;
}

void RootArm::append(double eval) {
  trace.push_back(eval);
  prefix.push_back(prefix.back() + eval);
}

void RootArm::set_trace(std::span<const double> evals) {
  trace.assign(evals.begin(), evals.end());
  prefix.resize(evals.size() + 1);
  prefix[0] = 0.0;
  for (std::size_t i = 0; i < evals.size(); ++i) {
    prefix[i + 1] = prefix[i] + evals[i];
  }
  consumed = 0;
}

int survivor_count(int arms, double lambda) {
  if (arms <= 1) return arms;
  int keep = static_cast<int>(std::ceil(lambda * arms - 1e-9));
  return std::max(1, std::min(keep, arms - 1));
}

HalvingSchedule sh_schedule(long budget, int arm_count, double lambda) {
  if (arm_count < 2) throw std::invalid_argument("sh_schedule: need at least 2 arms");
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("sh_schedule: lambda must be in (0, 1)");
  }
  if (budget < arm_count) {
    throw std::invalid_argument(
        "sh_schedule: budget smaller than arm count, no round-0 statistics");
  }
  int rounds_total = 0;
  for (int s = arm_count; s > 1; s = survivor_count(s, lambda)) ++rounds_total;

  HalvingSchedule sched;
  long remaining = budget;
  int size = arm_count;
  for (int r = 0; r < rounds_total; ++r) {
    long t_r = remaining / (static_cast<long>(size) * (rounds_total - r));
    sched.rounds.push_back({static_cast<int>(t_r), size});
    remaining -= t_r * size;
    size = survivor_count(size, lambda);
  }
  sched.total_consumed = budget - remaining;
  return sched;
}

long max_arm_consumption(long budget, int arm_count, double lambda) {
  HalvingSchedule sched = sh_schedule(budget, arm_count, lambda);
  long total = 0;
  for (const HalvingRound& r : sched.rounds) total += r.samples_per_arm;
  return total;
}

std::vector<int> select_survivors_subset(std::span<const RootArm> arms,
                                         std::span<const int> active, double lambda,
                                         const Expression& term, double nb_total) {
  if (!term.complete()) {
    throw std::logic_error("select_survivors: incomplete selection term");
  }
  const int m = static_cast<int>(active.size());
  if (m == 0) return {};
  const int keep_count = survivor_count(m, lambda);

  std::vector<double> score(m);
  for (int j = 0; j < m; ++j) {
    const RootArm& a = arms[static_cast<std::size_t>(active[j])];
    EvalContext ctx;
    ctx.sc = a.score_sum();
    ctx.pr = a.prior;
    ctx.nbp = static_cast<double>(a.consumed);
    ctx.nb = nb_total;
    score[j] = evaluate(term, ctx);
  }

  std::vector<int> kept;
  kept.reserve(keep_count);
  std::vector<bool> taken(m, false);
  for (int pick = 0; pick < keep_count; ++pick) {
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < m; ++j) {
      if (taken[j]) continue;
      if (best < 0 || score[j] > best_score) {
        best = j;
        best_score = score[j];
      }
    }
    taken[best] = true;
    kept.push_back(active[best]);
  }
  return kept;
}

std::vector<int> select_survivors(std::span<const RootArm> arms, double lambda,
                                  const Expression& term, double nb_total) {
  std::vector<int> active(arms.size());
  std::iota(active.begin(), active.end(), 0);
  return select_survivors_subset(arms, active, lambda, term, nb_total);
}

int run_sequential_halving(std::span<RootArm> arms, long budget, double lambda,
                           const Expression& term, const ArmSampler* sampler) {
  if (arms.empty()) throw std::invalid_argument("run_sequential_halving: no arms");
  if (arms.size() == 1) return 0;
  HalvingSchedule sched = sh_schedule(budget, static_cast<int>(arms.size()), lambda);

  std::vector<int> active(arms.size());
  std::iota(active.begin(), active.end(), 0);
  double nb_total = 0.0;
  for (const HalvingRound& round : sched.rounds) {
    for (int idx : active) {
      RootArm& a = arms[static_cast<std::size_t>(idx)];
      if (sampler) {
        int missing = a.consumed + round.samples_per_arm - a.trace_len();
        for (int t = 0; t < missing; ++t) a.append((*sampler)(idx));
        a.consumed += round.samples_per_arm;
      } else {
        if (a.consumed + round.samples_per_arm > a.available()) {
          throw std::runtime_error(
              "run_sequential_halving: trace exhausted (stored evaluations too "
              "short for this budget)");
        }
        a.consumed += round.samples_per_arm;
      }
    }
    nb_total += static_cast<double>(round.samples_per_arm) * active.size();
    std::vector<int> kept = select_survivors_subset(arms, active, lambda, term, nb_total);
    std::sort(kept.begin(), kept.end());
    active = std::move(kept);
  }
  if (active.size() != 1) {
    throw std::logic_error("run_sequential_halving: schedule did not reach one arm");
  }
  return active[0];
}

std::vector<RootArm> filter_top_prior(std::span<const RootArm> arms, int k,
                                      double min_prior) {
  if (k < 1) throw std::invalid_argument("filter_top_prior: k must be >= 1");
  std::vector<RootArm> kept;
  for (const RootArm& a : arms) {
    if (a.prior >= min_prior) kept.push_back(a);
  }
  if (kept.empty()) {
    throw std::runtime_error("filter_top_prior: every arm is below the prior cutoff");
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const RootArm& a, const RootArm& b) { return a.prior > b.prior; });
  if (static_cast<int>(kept.size()) > k) kept.resize(static_cast<std::size_t>(k));
  return kept;
}

double qtilde(double q, double standard_amaf, long n_root_a, double c) {
  if (n_root_a < 1) throw std::invalid_argument("qtilde: n_root_a must be >= 1");
  return q + c * standard_amaf / static_cast<double>(n_root_a);
}

}  // namespace exterm
