#include "exterm/amaf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace exterm {

namespace {

constexpr double kDegenerateEps = 1e-12;

void atomic_add(std::atomic<double>& target, double delta) {
  double cur = target.load(std::memory_order_relaxed);
  while (!target.compare_exchange_weak(cur, cur + delta, std::memory_order_relaxed)) {
  }
}

std::array<bool, kAtomCount> distinct_atoms(const Expression& expr) {
  std::array<bool, kAtomCount> seen{};
  for (AtomId a : expr.tokens()) seen[static_cast<std::size_t>(a)] = true;
  return seen;
}

}  // namespace

void AmafTable::add_playout(const Expression& expr, double score) {
  if (!expr.complete()) {
    throw std::logic_error("AmafTable::add_playout: incomplete expression");
  }
  total_playouts += 1;
  total_score += score;
  auto seen = distinct_atoms(expr);
  for (int i = 0; i < kAtomCount; ++i) {
    if (seen[i]) {
      per_atom[i].playouts += 1;
      per_atom[i].score_sum += score;
    }
  }
}

void SharedAmafTable::add_playout(const Expression& expr, double score) {
  if (!expr.complete()) {
    throw std::logic_error("SharedAmafTable::add_playout: incomplete expression");
  }
  total_playouts_.fetch_add(1, std::memory_order_relaxed);
  atomic_add(total_score_, score);
  auto seen = distinct_atoms(expr);
  for (int i = 0; i < kAtomCount; ++i) {
    if (seen[i]) {
      cells_[i].playouts.fetch_add(1, std::memory_order_relaxed);
      atomic_add(cells_[i].score_sum, score);
    }
  }
}

AmafTable SharedAmafTable::snapshot() const {
  AmafTable t;
  t.total_playouts = total_playouts_.load(std::memory_order_relaxed);
  t.total_score = total_score_.load(std::memory_order_relaxed);
  for (int i = 0; i < kAtomCount; ++i) {
    t.per_atom[i].playouts = cells_[i].playouts.load(std::memory_order_relaxed);
    t.per_atom[i].score_sum = cells_[i].score_sum.load(std::memory_order_relaxed);
  }
  return t;
}

std::vector<double> amaf_probabilities(const AmafTable& table,
                                       std::span<const AtomId> legal,
                                       double temperature) {
  if (legal.empty()) {
    throw std::invalid_argument("amaf_probabilities: empty legal set");
  }
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw std::invalid_argument("amaf_probabilities: temperature must be finite and > 0");
  }
  const std::size_t n = legal.size();
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  if (table.total_playouts == 0) return p;

  const double mu = table.total_score / static_cast<double>(table.total_playouts);
  std::vector<double> adv(n, 0.0);
  double maxi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const AtomStats& s = table.per_atom[static_cast<std::size_t>(legal[i])];
    if (s.playouts > 0) {
      adv[i] = s.score_sum / static_cast<double>(s.playouts) - mu;
    }
    maxi = std::max(maxi, std::fabs(adv[i]));
  }
  if (maxi <= kDegenerateEps) return p;

  // softmax(tau * adv / maxi), stabilized by max subtraction.
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    adv[i] = temperature * adv[i] / maxi;
    hi = std::max(hi, adv[i]);
  }
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = std::exp(adv[i] - hi);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

}  // namespace exterm
