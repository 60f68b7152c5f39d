#pragma once

#include "exterm/amaf.hpp"
#include "exterm/expr.hpp"
#include "exterm/rng.hpp"

namespace exterm {

// Completes a partial expression by uniform draws over the legal atoms.
// Already-complete input is returned unchanged.
Expression uniform_playout(Expression expr, Rng& rng);

// Like uniform_playout, but each draw follows amaf_probabilities over the
// current legal set. The table is read-only for the whole playout.
Expression amaf_playout(Expression expr, Rng& rng, const AmafTable& table,
                        double temperature);

}  // namespace exterm
