#include "exterm/sampler.hpp"

namespace exterm {

Expression uniform_playout(Expression expr, Rng& rng) {
  while (!expr.complete()) {
    auto legal = expr.legal_atoms();
    expr.push(legal[rng.next_index(legal.size())]);
  }
  return expr;
}

Expression amaf_playout(Expression expr, Rng& rng, const AmafTable& table,
                        double temperature) {
  while (!expr.complete()) {
    auto legal = expr.legal_atoms();
    auto probs = amaf_probabilities(table, legal, temperature);
    double u = rng.next_double();
    std::size_t pick = legal.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) {
        pick = i;
        break;
      }
    }
    expr.push(legal[pick]);
  }
  return expr;
}

}  // namespace exterm
