#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace exterm {

// The fixed 17-atom alphabet: constants 1, 2, 3, 100; the four search
// statistics sc, pr, nbp, nb; binary + - * / = max min; unary log exp.
enum class AtomId : std::uint8_t {
  one,
  two,
  three,
  hundred,
  sc,
  pr,
  nbp,
  nb,
  add,
  sub,
  mul,
  div,
  eq,
  max,
  min,
  log,
  exp,
};

inline constexpr int kAtomCount = 17;
inline constexpr int kDefaultMaxLen = 12;

enum class AtomKind : std::uint8_t { constant, variable, op };

int arity(AtomId a);
AtomKind kind(AtomId a);
std::string_view symbol(AtomId a);
double constant_value(AtomId a);  // constants only
std::optional<AtomId> atom_from_symbol(std::string_view s);
std::span<const AtomId> all_atoms();

// Statistics a term is evaluated against: sum of playout scores for the
// move, policy prior, playouts through the move, total playouts.
struct EvalContext {
  double sc = 0.0;
  double pr = 0.0;
  double nbp = 0.0;
  double nb = 0.0;
};

// A prefix (preorder) token sequence under construction. open_leaves counts
// operator child slots not yet filled; the expression is complete at zero.
// The legal-move rule keeps |tokens| + open_leaves within max_len at every
// step, so generation always terminates within the budget.
class Expression {
 public:
  explicit Expression(int max_len = kDefaultMaxLen);

  // Builds from an explicit token list, validating the play sequence.
  // max_len == 0 sizes the budget to fit the sequence exactly.
  static Expression from_tokens(std::span<const AtomId> tokens, int max_len = 0);

  std::span<const AtomId> tokens() const { return tokens_; }
  int size() const { return static_cast<int>(tokens_.size()); }
  int open_leaves() const { return open_; }
  int max_len() const { return max_len_; }
  bool complete() const { return open_ == 0; }

  bool is_legal(AtomId a) const;
  std::vector<AtomId> legal_atoms() const;  // throws if already complete
  void push(AtomId a);                      // throws if a is not legal

  bool operator==(const Expression& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<AtomId> tokens_;
  int open_ = 1;
  int max_len_ = kDefaultMaxLen;
};

// Protected evaluation: division by ~0 yields 0, log is floored at 1e-12,
// exp arguments are clamped to [-60, 60], '=' is a relative-tolerance
// indicator, and overflowing results are capped. Never yields NaN/inf.
double evaluate(const Expression& expr, const EvalContext& ctx);

// Fully parenthesized rendering, e.g. "(pr + ((2 * sc) * sc))"; max/min/log/exp
// render as calls. parse_infix accepts exactly this shape back.
std::string to_infix(const Expression& expr);

// Space-joined prefix symbols, e.g. "+ pr sc". Memoization key: equal token
// sequences give equal keys, no algebraic folding.
std::string canonical_key(const Expression& expr);

// Whitespace-separated prefix tokens ("+ pr * * 2 sc sc"). Rejects unknown
// tokens, incomplete input and trailing tokens. max_len == 0 fits the input.
Expression parse_prefix(std::string_view text, int max_len = 0);

Expression parse_infix(std::string_view text, int max_len = 0);

namespace protected_ops {
inline constexpr double kDivEpsilon = 1e-12;
inline constexpr double kLogFloor = 1e-12;
inline constexpr double kExpClamp = 60.0;
inline constexpr double kEqRelTol = 1e-9;
inline constexpr double kValueCap = 1e300;
}  // namespace protected_ops

}  // namespace exterm
