#include "exterm/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace exterm {

namespace {

struct AtomInfo {
  std::string_view sym;
  int arity;
  AtomKind kind;
  double value;
};

constexpr std::array<AtomInfo, kAtomCount> kAtoms = {{
    {"1", 0, AtomKind::constant, 1.0},
    {"2", 0, AtomKind::constant, 2.0},
    {"3", 0, AtomKind::constant, 3.0},
    {"100", 0, AtomKind::constant, 100.0},
    {"sc", 0, AtomKind::variable, 0.0},
    {"pr", 0, AtomKind::variable, 0.0},
    {"nbp", 0, AtomKind::variable, 0.0},
    {"nb", 0, AtomKind::variable, 0.0},
    {"+", 2, AtomKind::op, 0.0},
    {"-", 2, AtomKind::op, 0.0},
    {"*", 2, AtomKind::op, 0.0},
    {"/", 2, AtomKind::op, 0.0},
    {"=", 2, AtomKind::op, 0.0},
    {"max", 2, AtomKind::op, 0.0},
    {"min", 2, AtomKind::op, 0.0},
    {"log", 1, AtomKind::op, 0.0},
    {"exp", 1, AtomKind::op, 0.0},
}};

constexpr std::array<AtomId, kAtomCount> kAllAtoms = {
    AtomId::one, AtomId::two, AtomId::three, AtomId::hundred, AtomId::sc,
    AtomId::pr,  AtomId::nbp, AtomId::nb,    AtomId::add,     AtomId::sub,
    AtomId::mul, AtomId::div, AtomId::eq,    AtomId::max,     AtomId::min,
    AtomId::log, AtomId::exp,
};

const AtomInfo& info(AtomId a) { return kAtoms[static_cast<std::size_t>(a)]; }

}  // namespace

int arity(AtomId a) { return info(a).arity; }
AtomKind kind(AtomId a) { return info(a).kind; }
std::string_view symbol(AtomId a) { return info(a).sym; }

double constant_value(AtomId a) {
  if (kind(a) != AtomKind::constant) {
    throw std::logic_error("constant_value: not a constant atom");
  }
  return info(a).value;
}

std::optional<AtomId> atom_from_symbol(std::string_view s) {
  for (int i = 0; i < kAtomCount; ++i) {
    if (kAtoms[i].sym == s) return static_cast<AtomId>(i);
  }
  return std::nullopt;
}

std::span<const AtomId> all_atoms() { return kAllAtoms; }

Expression::Expression(int max_len) : max_len_(max_len) {
  if (max_len < 1) throw std::invalid_argument("Expression: max_len must be >= 1");
}

Expression Expression::from_tokens(std::span<const AtomId> tokens, int max_len) {
  if (max_len == 0) {
    int open = 1;
    for (AtomId a : tokens) open += arity(a) - 1;
    max_len = static_cast<int>(tokens.size()) + std::max(open, 0);
    if (max_len < 1) max_len = 1;
  }
  Expression e(max_len);
  for (AtomId a : tokens) e.push(a);
  return e;
}

bool Expression::is_legal(AtomId a) const {
  if (complete()) return false;
  return size() + open_ + arity(a) <= max_len_;
}

std::vector<AtomId> Expression::legal_atoms() const {
  if (complete()) {
    throw std::logic_error("legal_atoms: expression already complete");
  }
  std::vector<AtomId> out;
  out.reserve(kAtomCount);
  for (AtomId a : kAllAtoms) {
    if (is_legal(a)) out.push_back(a);
  }
  return out;
}

void Expression::push(AtomId a) {
  if (!is_legal(a)) {
    throw std::invalid_argument(std::string("push: illegal atom '") +
                                std::string(symbol(a)) + "'");
  }
  tokens_.push_back(a);
  open_ += arity(a) - 1;
}

namespace {

using protected_ops::kDivEpsilon;
using protected_ops::kEqRelTol;
using protected_ops::kExpClamp;
using protected_ops::kLogFloor;
using protected_ops::kValueCap;

double cap(double v) {
  if (v > kValueCap) return kValueCap;
  if (v < -kValueCap) return -kValueCap;
  return v;
}

double eval_rec(std::span<const AtomId> toks, std::size_t& i, const EvalContext& ctx) {
  AtomId a = toks[i++];
  switch (a) {
    case AtomId::one:
      return 1.0;
    case AtomId::two:
      return 2.0;
    case AtomId::three:
      return 3.0;
    case AtomId::hundred:
      return 100.0;
    case AtomId::sc:
      return ctx.sc;
    case AtomId::pr:
      return ctx.pr;
    case AtomId::nbp:
      return ctx.nbp;
    case AtomId::nb:
      return ctx.nb;
    case AtomId::add: {
      double l = eval_rec(toks, i, ctx);
      double r = eval_rec(toks, i, ctx);
      return cap(l + r);
    }
    case AtomId::sub: {
      double l = eval_rec(toks, i, ctx);
      double r = eval_rec(toks, i, ctx);
      return cap(l - r);
    }
    case AtomId::mul: {
      double l = eval_rec(toks, i, ctx);
      double r = eval_rec(toks, i, ctx);
      return cap(l * r);
    }
    case AtomId::div: {
      double l = eval_rec(toks, i, ctx);
      double r = eval_rec(toks, i, ctx);
      if (std::fabs(r) <= kDivEpsilon) return 0.0;
      return cap(l / r);
    }
    case AtomId::eq: {
      double l = eval_rec(toks, i, ctx);
      double r = eval_rec(toks, i, ctx);
      double tol = kEqRelTol * std::max({1.0, std::fabs(l), std::fabs(r)});
      return std::fabs(l - r) <= tol ? 1.0 : 0.0;
    }
    case AtomId::max: {
      double l = eval_rec(toks, i, ctx);
      double r = eval_rec(toks, i, ctx);
      return std::max(l, r);
    }
    case AtomId::min: {
      double l = eval_rec(toks, i, ctx);
      double r = eval_rec(toks, i, ctx);
      return std::min(l, r);
    }
    case AtomId::log:
      return std::log(std::max(eval_rec(toks, i, ctx), kLogFloor));
    case AtomId::exp:
      return std::exp(std::clamp(eval_rec(toks, i, ctx), -kExpClamp, kExpClamp));
  }
  throw std::logic_error("eval_rec: bad atom id");
}

}  // namespace

double evaluate(const Expression& expr, const EvalContext& ctx) {
  if (!expr.complete()) {
    throw std::logic_error("evaluate: incomplete expression");
  }
  std::size_t i = 0;
  return eval_rec(expr.tokens(), i, ctx);
}

namespace {

void infix_rec(std::span<const AtomId> toks, std::size_t& i, std::string& out) {
  AtomId a = toks[i++];
  switch (kind(a)) {
    case AtomKind::constant:
    case AtomKind::variable:
      out += symbol(a);
      return;
    case AtomKind::op:
      break;
  }
  if (a == AtomId::log || a == AtomId::exp) {
    out += symbol(a);
    out += '(';
    infix_rec(toks, i, out);
    out += ')';
    return;
  }
  if (a == AtomId::max || a == AtomId::min) {
    out += symbol(a);
    out += '(';
    infix_rec(toks, i, out);
    out += ", ";
    infix_rec(toks, i, out);
    out += ')';
    return;
  }
  out += '(';
  infix_rec(toks, i, out);
  out += ' ';
  out += symbol(a);
  out += ' ';
  infix_rec(toks, i, out);
  out += ')';
}

}  // namespace

std::string to_infix(const Expression& expr) {
  if (!expr.complete()) {
    throw std::logic_error("to_infix: incomplete expression");
  }
  std::string out;
  std::size_t i = 0;
  infix_rec(expr.tokens(), i, out);
  return out;
}

std::string canonical_key(const Expression& expr) {
  std::string out;
  for (std::size_t i = 0; i < expr.tokens().size(); ++i) {
    if (i) out += ' ';
    out += symbol(expr.tokens()[i]);
  }
  return out;
}

Expression parse_prefix(std::string_view text, int max_len) {
  std::vector<AtomId> toks;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::string_view word = text.substr(i, j - i);
    auto a = atom_from_symbol(word);
    if (!a) {
      throw std::invalid_argument("parse: unknown token '" + std::string(word) + "'");
    }
    toks.push_back(*a);
    i = j;
  }
  if (toks.empty()) throw std::invalid_argument("parse: empty expression");
  int open = 1;
  for (std::size_t k = 0; k < toks.size(); ++k) {
    if (open == 0) {
      throw std::invalid_argument("parse: trailing token '" +
                                  std::string(symbol(toks[k])) + "'");
    }
    open += arity(toks[k]) - 1;
  }
  if (open != 0) throw std::invalid_argument("parse: incomplete expression");
  return Expression::from_tokens(toks, max_len);
}

namespace {

// Tokens of the fully parenthesized infix form.
struct InfixLexer {
  std::string_view text;
  std::size_t pos = 0;

  std::optional<std::string_view> next() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) return std::nullopt;
    char c = text[pos];
    if (c == '(' || c == ')' || c == ',') {
      ++pos;
      return text.substr(pos - 1, 1);
    }
    std::size_t j = pos;
    while (j < text.size()) {
      char d = text[j];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ',') break;
      ++j;
    }
    std::string_view w = text.substr(pos, j - pos);
    pos = j;
    return w;
  }
};

void infix_parse_rec(InfixLexer& lex, std::vector<AtomId>& out) {
  auto tok = lex.next();
  if (!tok) throw std::invalid_argument("parse_infix: unexpected end of input");
  if (*tok == "(") {
    // ( lhs op rhs )
    std::vector<AtomId> lhs;
    infix_parse_rec(lex, lhs);
    auto op = lex.next();
    if (!op) throw std::invalid_argument("parse_infix: missing operator");
    auto a = atom_from_symbol(*op);
    if (!a || arity(*a) != 2 || *a == AtomId::max || *a == AtomId::min) {
      throw std::invalid_argument("parse_infix: bad operator '" + std::string(*op) + "'");
    }
    out.push_back(*a);
    out.insert(out.end(), lhs.begin(), lhs.end());
    infix_parse_rec(lex, out);
    auto close = lex.next();
    if (!close || *close != ")") throw std::invalid_argument("parse_infix: missing ')'");
    return;
  }
  auto a = atom_from_symbol(*tok);
  if (!a) throw std::invalid_argument("parse_infix: unknown token '" + std::string(*tok) + "'");
  if (arity(*a) == 0) {
    out.push_back(*a);
    return;
  }
  // Function call form: log(x), exp(x), max(x, y), min(x, y).
  auto open = lex.next();
  if (!open || *open != "(") {
    throw std::invalid_argument("parse_infix: expected '(' after '" + std::string(*tok) + "'");
  }
  out.push_back(*a);
  infix_parse_rec(lex, out);
  if (arity(*a) == 2) {
    auto comma = lex.next();
    if (!comma || *comma != ",") throw std::invalid_argument("parse_infix: expected ','");
    infix_parse_rec(lex, out);
  }
  auto close = lex.next();
  if (!close || *close != ")") throw std::invalid_argument("parse_infix: missing ')'");
}

}  // namespace

Expression parse_infix(std::string_view text, int max_len) {
  InfixLexer lex{text};
  std::vector<AtomId> toks;
  infix_parse_rec(lex, toks);
  if (lex.next()) throw std::invalid_argument("parse_infix: trailing input");
  return Expression::from_tokens(toks, max_len);
}

}  // namespace exterm
