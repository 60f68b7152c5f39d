#include "exterm/discover.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "exterm/sampler.hpp"

namespace exterm {

DiscoveryLog discover(const DiscoveryConfig& cfg, const Scorer& scorer) {
  if (cfg.workers < 1) throw std::invalid_argument("discover: workers must be >= 1");
  if (cfg.expression_budget == 0 && cfg.seconds_budget <= 0.0) {
    throw std::invalid_argument("discover: set an expression or seconds budget");
  }
  if (cfg.mode == SampleMode::amaf &&
      (!(cfg.temperature > 0.0) || !std::isfinite(cfg.temperature))) {
    throw std::invalid_argument("discover: temperature must be finite and > 0");
  }
  if (cfg.max_len < 1) throw std::invalid_argument("discover: max_len must be >= 1");

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const bool timed = cfg.seconds_budget > 0.0;
  const auto deadline =
      timed ? start + std::chrono::duration_cast<clock::duration>(
                          std::chrono::duration<double>(cfg.seconds_budget))
            : clock::time_point::max();

  SharedAmafTable shared_table;
  std::vector<AmafTable> local_tables(static_cast<std::size_t>(cfg.workers));

  std::atomic<std::uint64_t> claimed{0};
  std::atomic<std::uint64_t> completed{0};
  std::mutex best_mu;
  DiscoveryLog log;

  auto worker = [&](int w) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(w)));
    AmafTable& local = local_tables[static_cast<std::size_t>(w)];
    for (;;) {
      if (cfg.expression_budget != 0 &&
          claimed.fetch_add(1, std::memory_order_relaxed) >= cfg.expression_budget) {
        break;
      }
      if (timed && clock::now() >= deadline) break;

      Expression expr(cfg.max_len);
      if (cfg.mode == SampleMode::amaf) {
        AmafTable snap = cfg.shared_amaf ? shared_table.snapshot() : local;
        expr = amaf_playout(std::move(expr), rng, snap, cfg.temperature);
      } else {
        expr = uniform_playout(std::move(expr), rng);
      }

      double score = 0.0;
      bool failed = false;
      try {
        score = scorer(expr);
      } catch (...) {
        failed = true;
      }
      if (cfg.mode == SampleMode::amaf) {
        if (cfg.shared_amaf) {
          shared_table.add_playout(expr, score);
        } else {
          local.add_playout(expr, score);
        }
      }

      const std::uint64_t done = completed.fetch_add(1, std::memory_order_relaxed) + 1;
      std::lock_guard lock(best_mu);
      if (failed) log.scorer_failures += 1;
      if (score > log.best_score) {
        log.best_score = score;
        log.best_expression = expr;
        Improvement imp;
        imp.elapsed_seconds = std::chrono::duration<double>(clock::now() - start).count();
        imp.evaluated = done;
        imp.score = score;
        imp.term_prefix = canonical_key(expr);
        imp.term_infix = to_infix(expr);
        log.timeline.push_back(std::move(imp));
      }
    }
  };

  if (cfg.workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(cfg.workers));
    for (int w = 0; w < cfg.workers; ++w) threads.emplace_back(worker, w);
    for (std::thread& t : threads) t.join();
  }
  log.evaluated_count = completed.load();
  return log;
}

}  // namespace exterm
