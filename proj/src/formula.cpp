// Copyright 2026 The dlogic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dlogic/formula.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>
#include <utility>

namespace dlogic {

// ---------------------------------------------------------------------------
// Nodes

struct Expr::Node {
  Kind kind;
  double value = 0.0;
  Index index;
  std::string var;
  VectorSource source = VectorSource::Outputs;
  std::vector<Expr> children;
};

struct Formula::Node {
  Kind kind;
  CmpOp op = CmpOp::Le;
  std::vector<Expr> exprs;
  std::vector<Formula> children;
  std::vector<std::string> vars;
  BindingSet set;
};

Expr Expr::constant(double value) {
  return Expr(std::make_shared<const Node>(Node{Kind::Const, value, {}, {}, {}, {}}));
}

Expr Expr::input(Index index) {
  return Expr(std::make_shared<const Node>(Node{Kind::Input, 0.0, std::move(index), {}, {}, {}}));
}

Expr Expr::output(Index index) {
  return Expr(std::make_shared<const Node>(Node{Kind::Output, 0.0, std::move(index), {}, {}, {}}));
}

Expr Expr::sum(std::vector<Expr> terms) {
  if (terms.empty()) throw std::invalid_argument("sum: empty term list");
  return Expr(std::make_shared<const Node>(Node{Kind::Sum, 0.0, {}, {}, {}, std::move(terms)}));
}

Expr Expr::group_sum(std::string var) {
  return Expr(std::make_shared<const Node>(Node{Kind::GroupSum, 0.0, {}, std::move(var), {}, {}}));
}

Expr Expr::add(Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(Node{Kind::Add, 0.0, {}, {}, {}, {std::move(lhs), std::move(rhs)}}));
}

Expr Expr::sub(Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(Node{Kind::Sub, 0.0, {}, {}, {}, {std::move(lhs), std::move(rhs)}}));
}

Expr Expr::mul(Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(Node{Kind::Mul, 0.0, {}, {}, {}, {std::move(lhs), std::move(rhs)}}));
}

Expr Expr::norm2_diff(VectorSource source) {
  return Expr(std::make_shared<const Node>(Node{Kind::Norm2Diff, 0.0, {}, {}, source, {}}));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
const Index& Expr::index() const { return node_->index; }
const std::string& Expr::var() const { return node_->var; }
VectorSource Expr::source() const { return node_->source; }
std::span<const Expr> Expr::children() const { return node_->children; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Expr::Kind::Const: return x.value == y.value;
    case Expr::Kind::Input:
    case Expr::Kind::Output: return x.index == y.index;
    case Expr::Kind::GroupSum: return x.var == y.var;
    case Expr::Kind::Norm2Diff: return x.source == y.source;
    default: return x.children == y.children;
  }
}

Formula Formula::cmp(CmpOp op, Expr lhs, Expr rhs) {
  return Formula(std::make_shared<const Node>(Node{Kind::Cmp, op, {std::move(lhs), std::move(rhs)}, {}, {}, {}}));
}

Formula Formula::conj(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(Node{Kind::And, CmpOp::Le, {}, {std::move(lhs), std::move(rhs)}, {}, {}}));
}

Formula Formula::disj(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(Node{Kind::Or, CmpOp::Le, {}, {std::move(lhs), std::move(rhs)}, {}, {}}));
}

Formula Formula::negation(Formula f) {
  return Formula(std::make_shared<const Node>(Node{Kind::Not, CmpOp::Le, {}, {std::move(f)}, {}, {}}));
}

Formula Formula::implies(Formula antecedent, Formula consequent) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::Implies, CmpOp::Le, {}, {std::move(antecedent), std::move(consequent)}, {}, {}}));
}

Formula Formula::forall(std::vector<std::string> vars, BindingSet set, Formula body) {
  if (vars.empty()) throw std::invalid_argument("forall: no variables");
  if (set.items.empty()) throw std::invalid_argument("forall: binding set '" + set.name + "' is empty");
  for (const auto& item : set.items) {
    if (item.empty()) throw std::invalid_argument("forall: empty item in '" + set.name + "'");
    if (vars.size() > 1 && item.size() != vars.size())
      throw std::invalid_argument("forall: items of '" + set.name + "' do not match the binder arity");
  }
  return Formula(std::make_shared<const Node>(
      Node{Kind::ForAll, CmpOp::Le, {}, {std::move(body)}, std::move(vars), std::move(set)}));
}

Formula::Kind Formula::kind() const { return node_->kind; }
CmpOp Formula::op() const { return node_->op; }
const Expr& Formula::lhs() const { return node_->exprs.at(0); }
const Expr& Formula::rhs() const { return node_->exprs.at(1); }
std::span<const Formula> Formula::children() const { return node_->children; }
const std::vector<std::string>& Formula::vars() const { return node_->vars; }
const BindingSet& Formula::set() const { return node_->set; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Formula::Kind::Cmp: return x.op == y.op && x.exprs == y.exprs;
    case Formula::Kind::ForAll: return x.vars == y.vars && x.set == y.set && x.children == y.children;
    default: return x.children == y.children;
  }
}

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Le: return "<=";
    case CmpOp::Lt: return "<";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
  }
  return "?";
}

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error("parse error at " + std::to_string(position) + ": " + message), position_(position) {}

namespace detail {

void throw_unbound(std::string_view what, std::size_t index, std::size_t size) {
  throw UnboundReference(std::string(what) + ": reference " + std::to_string(index) + " not bound (have " +
                         std::to_string(size) + ")");
}

std::size_t concrete_index(const Index& index) {
  if (const auto* i = std::get_if<std::size_t>(&index)) return *i;
  throw UnboundReference("free index variable '" + std::get<std::string>(index) + "'");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string format_index(const Index& index) {
  if (const auto* i = std::get_if<std::size_t>(&index)) return std::to_string(*i);
  return std::get<std::string>(index);
}

bool is_additive(const Expr& e) { return e.kind() == Expr::Kind::Add || e.kind() == Expr::Kind::Sub; }

std::string paren(const std::string& s, bool wrap) { return wrap ? "(" + s + ")" : s; }

}  // namespace

std::string print(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Const: return format_number(e.value());
    case Expr::Kind::Input: return "in[" + format_index(e.index()) + "]";
    case Expr::Kind::Output: return "out[" + format_index(e.index()) + "]";
    case Expr::Kind::Sum: {
      std::string s = "sum(";
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        if (i > 0) s += ", ";
        s += print(e.children()[i]);
      }
      return s + ")";
    }
    case Expr::Kind::GroupSum: return "sum(out[" + e.var() + "])";
    case Expr::Kind::Add:
      return print(e.children()[0]) + " + " + paren(print(e.children()[1]), is_additive(e.children()[1]));
    case Expr::Kind::Sub:
      return print(e.children()[0]) + " - " + paren(print(e.children()[1]), is_additive(e.children()[1]));
    case Expr::Kind::Mul: {
      const Expr& r = e.children()[1];
      return paren(print(e.children()[0]), is_additive(e.children()[0])) + " * " +
             paren(print(r), is_additive(r) || r.kind() == Expr::Kind::Mul);
    }
    case Expr::Kind::Norm2Diff: return e.source() == VectorSource::Outputs ? "dist(out)" : "dist(in)";
  }
  return "?";
}

std::string print(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Cmp:
      return print(f.lhs()) + " " + std::string(to_string(f.op())) + " " + print(f.rhs());
    case Formula::Kind::And:
      return "(" + print(f.children()[0]) + ") and (" + print(f.children()[1]) + ")";
    case Formula::Kind::Or:
      return "(" + print(f.children()[0]) + ") or (" + print(f.children()[1]) + ")";
    case Formula::Kind::Implies:
      return "(" + print(f.children()[0]) + ") -> (" + print(f.children()[1]) + ")";
    case Formula::Kind::Not: {
      const Formula& c = f.children()[0];
      const bool atomic = c.kind() == Formula::Kind::Cmp || c.kind() == Formula::Kind::Not;
      return "not " + paren(print(c), !atomic);
    }
    case Formula::Kind::ForAll: {
      std::string binder;
      if (f.vars().size() == 1) {
        binder = f.vars()[0];
      } else {
        binder = "(";
        for (std::size_t i = 0; i < f.vars().size(); ++i) binder += (i ? ", " : "") + f.vars()[i];
        binder += ")";
      }
      return "forall " + binder + " in " + f.set().name + ": " + print(f.children()[0]);
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok { Ident, Number, Symbol, End };

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  std::size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i + 1;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), 0.0, i});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size() && std::isdigit(s[i + 1]))) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), v);
      if (ec != std::errc()) throw ParseError("malformed number", i);
      const auto len = static_cast<std::size_t>(ptr - (s.data() + i));
      out.push_back({Tok::Number, std::string(s.substr(i, len)), v, i});
      i += len;
      continue;
    }
    static constexpr std::string_view two[] = {"<=", ">=", "==", "!=", "->"};
    bool matched = false;
    for (auto sym : two) {
      if (s.substr(i, 2) == sym) {
        out.push_back({Tok::Symbol, std::string(sym), 0.0, i});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("<>()[],:+-*").find(c) != std::string_view::npos) {
      out.push_back({Tok::Symbol, std::string(1, c), 0.0, i});
      ++i;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", i);
  }
  out.push_back({Tok::End, "", 0.0, s.size()});
  return out;
}

bool is_keyword(std::string_view w) {
  static constexpr std::string_view keywords[] = {"forall", "in", "and", "or", "not", "out", "sum", "dist"};
  return std::find(std::begin(keywords), std::end(keywords), w) != std::end(keywords);
}

class Parser {
 public:
  Parser(std::string_view text, const ParseContext& ctx) : tokens_(tokenize(text)), ctx_(ctx) {}

  Formula parse_all() {
    Formula f = formula();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  struct Bound {
    std::string name;
    // Whole-item binder (one variable) or positional element of a tuple.
    bool whole;
    std::size_t position;
    const std::vector<Binding>* items;
  };

  const Token& peek(std::size_t ahead = 0) const { return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)]; }
  bool at(std::string_view text) const { return peek().kind != Tok::End && peek().kind != Tok::Number && peek().text == text; }
  bool accept(std::string_view text) {
    if (!at(text)) return false;
    ++pos_;
    return true;
  }
  void expect(std::string_view text) {
    if (!accept(text)) fail("expected '" + std::string(text) + "'" + (peek().kind == Tok::End ? " at end of input" : ", found '" + peek().text + "'"));
  }
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, peek().pos); }

  std::string ident() {
    if (peek().kind != Tok::Ident || is_keyword(peek().text)) fail("expected identifier");
    return tokens_[pos_++].text;
  }

  const Bound* find_bound(std::string_view name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->name == name) return &*it;
    return nullptr;
  }

  Formula formula() {
    if (accept("forall")) return quantifier();
    return implication();
  }

  Formula quantifier() {
    std::vector<std::string> vars;
    if (accept("(")) {
      vars.push_back(ident());
      while (accept(",")) vars.push_back(ident());
      expect(")");
    } else {
      vars.push_back(ident());
    }
    expect("in");
    const std::size_t set_pos = peek().pos;
    const std::string set_name = ident();
    expect(":");
    auto it = ctx_.sets.find(set_name);
    if (it == ctx_.sets.end()) throw ParseError("unknown identifier '" + set_name + "'", set_pos);
    const auto& items = it->second;
    if (items.empty()) throw ParseError("binding set '" + set_name + "' is empty", set_pos);
    for (const auto& item : items) {
      if (item.empty() || (vars.size() > 1 && item.size() != vars.size()))
        throw ParseError("items of '" + set_name + "' do not match the binder", set_pos);
      if (ctx_.n_outputs)
        for (auto c : item)
          if (c >= *ctx_.n_outputs)
            throw ParseError("index " + std::to_string(c) + " in '" + set_name + "' out of range", set_pos);
    }
    const std::size_t depth = scope_.size();
    for (std::size_t i = 0; i < vars.size(); ++i) scope_.push_back({vars[i], vars.size() == 1, i, &items});
    Formula body = formula();
    scope_.resize(depth);
    return Formula::forall(std::move(vars), BindingSet{set_name, items}, std::move(body));
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (accept("->")) return Formula::implies(std::move(lhs), disjunction());
    return lhs;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    while (accept("or")) lhs = Formula::disj(std::move(lhs), conjunction());
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = negation();
    while (accept("and")) lhs = Formula::conj(std::move(lhs), negation());
    return lhs;
  }

  Formula negation() {
    if (accept("not")) return Formula::negation(negation());
    if (at("(")) {
      const std::size_t saved = pos_;
      const std::size_t depth = scope_.size();
      try {
        ++pos_;
        Formula inner = formula();
        expect(")");
        return inner;
      } catch (const ParseError& e) {
        remember(e);
        pos_ = saved;
        scope_.resize(depth);
      }
    }
    try {
      return comparison();
    } catch (const ParseError& e) {
      // Report whichever alternative got further.
      if (best_ && best_->position() > e.position()) throw *best_;
      throw;
    }
  }

  void remember(const ParseError& e) {
    if (!best_ || e.position() > best_->position()) best_ = e;
  }

  Formula comparison() {
    Expr lhs = expr();
    static constexpr std::pair<std::string_view, CmpOp> ops[] = {
        {"<=", CmpOp::Le}, {"<", CmpOp::Lt}, {">=", CmpOp::Ge}, {">", CmpOp::Gt}, {"==", CmpOp::Eq}, {"!=", CmpOp::Ne}};
    for (auto [text, op] : ops) {
      if (accept(text)) return Formula::cmp(op, std::move(lhs), expr());
    }
    fail("expected comparison operator");
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept("+")) {
        lhs = Expr::add(std::move(lhs), term());
      } else if (accept("-")) {
        lhs = Expr::sub(std::move(lhs), term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = factor();
    while (accept("*")) lhs = Expr::mul(std::move(lhs), factor());
    return lhs;
  }

  Index index(bool outputs) {
    expect("[");
    Index result;
    if (peek().kind == Tok::Number) {
      const Token& t = tokens_[pos_];
      if (t.text.find_first_not_of("0123456789") != std::string::npos) fail("index must be a non-negative integer");
      const auto value = static_cast<std::size_t>(t.number);
      const auto limit = outputs ? ctx_.n_outputs : ctx_.n_inputs;
      if (limit && value >= *limit)
        fail("index " + std::to_string(value) + " out of range (" + std::to_string(*limit) + ")");
      ++pos_;
      result = value;
    } else {
      const std::size_t at_pos = peek().pos;
      const std::string name = ident();
      const Bound* b = find_bound(name);
      if (b == nullptr) throw ParseError("unknown identifier '" + name + "'", at_pos);
      if (b->whole) {
        for (const auto& item : *b->items)
          if (item.size() != 1)
            throw ParseError("'" + name + "' is bound to groups; use sum(out[" + name + "])", at_pos);
      }
      result = name;
    }
    expect("]");
    return result;
  }

  Expr factor() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      ++pos_;
      return Expr::constant(t.number);
    }
    if (at("-") && peek(1).kind == Tok::Number) {
      const double v = peek(1).number;
      pos_ += 2;
      return Expr::constant(-v);
    }
    if (accept("(")) {
      Expr e = expr();
      expect(")");
      return e;
    }
    if (accept("out")) return Expr::output(index(true));
    if (accept("in")) return Expr::input(index(false));
    if (accept("dist")) {
      expect("(");
      VectorSource source;
      if (accept("out")) {
        source = VectorSource::Outputs;
      } else if (accept("in")) {
        source = VectorSource::Inputs;
      } else {
        fail("expected 'out' or 'in'");
      }
      expect(")");
      return Expr::norm2_diff(source);
    }
    if (accept("sum")) {
      expect("(");
      // sum(out[g]) with g bound to a whole group.
      if (at("out") && peek(1).text == "[" && peek(2).kind == Tok::Ident && peek(3).text == "]" &&
          peek(4).text == ")") {
        const Bound* b = find_bound(peek(2).text);
        if (b != nullptr && b->whole) {
          std::string var = peek(2).text;
          pos_ += 5;
          return Expr::group_sum(std::move(var));
        }
      }
      std::vector<Expr> terms;
      terms.push_back(expr());
      while (accept(",")) terms.push_back(expr());
      expect(")");
      return Expr::sum(std::move(terms));
    }
    if (t.kind == Tok::Ident && !is_keyword(t.text)) {
      auto it = ctx_.constants.find(t.text);
      if (it == ctx_.constants.end()) fail("unknown identifier '" + t.text + "'");
      ++pos_;
      return Expr::constant(it->second);
    }
    fail(t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
  }

  std::vector<Token> tokens_;
  const ParseContext& ctx_;
  std::size_t pos_ = 0;
  std::vector<Bound> scope_;
  std::optional<ParseError> best_;
};

}  // namespace

Formula parse(std::string_view text, const ParseContext& context) { return Parser(text, context).parse_all(); }

// ---------------------------------------------------------------------------
// Rewrites

namespace {

struct Substitution {
  std::string name;
  const Binding* item;
  bool whole;
  std::size_t position;
};

using Scope = std::vector<Substitution>;

const Substitution* find(const Scope& scope, const std::string& name) {
  for (auto it = scope.rbegin(); it != scope.rend(); ++it)
    if (it->name == name) return &*it;
  return nullptr;
}

Index substitute(const Index& index, const Scope& scope) {
  const auto* name = std::get_if<std::string>(&index);
  if (name == nullptr) return index;
  const Substitution* s = find(scope, *name);
  if (s == nullptr) return index;
  if (s->whole) {
    if (s->item->size() != 1) throw UnboundReference("'" + *name + "' is bound to a group, not a class");
    return (*s->item)[0];
  }
  return (*s->item)[s->position];
}

Expr substitute(const Expr& e, const Scope& scope) {
  switch (e.kind()) {
    case Expr::Kind::Const:
    case Expr::Kind::Norm2Diff:
      return e;
    case Expr::Kind::Input: return Expr::input(substitute(e.index(), scope));
    case Expr::Kind::Output: return Expr::output(substitute(e.index(), scope));
    case Expr::Kind::GroupSum: {
      const Substitution* s = find(scope, e.var());
      if (s == nullptr) return e;
      std::vector<Expr> terms;
      if (s->whole) {
        for (auto c : *s->item) terms.push_back(Expr::output(c));
      } else {
        terms.push_back(Expr::output((*s->item)[s->position]));
      }
      return Expr::sum(std::move(terms));
    }
    case Expr::Kind::Sum: {
      std::vector<Expr> terms;
      for (const auto& c : e.children()) terms.push_back(substitute(c, scope));
      return Expr::sum(std::move(terms));
    }
    case Expr::Kind::Add: return Expr::add(substitute(e.children()[0], scope), substitute(e.children()[1], scope));
    case Expr::Kind::Sub: return Expr::sub(substitute(e.children()[0], scope), substitute(e.children()[1], scope));
    case Expr::Kind::Mul: return Expr::mul(substitute(e.children()[0], scope), substitute(e.children()[1], scope));
  }
  return e;
}

Formula expand_in(const Formula& f, Scope& scope) {
  switch (f.kind()) {
    case Formula::Kind::Cmp:
      return Formula::cmp(f.op(), substitute(f.lhs(), scope), substitute(f.rhs(), scope));
    case Formula::Kind::And:
      return Formula::conj(expand_in(f.children()[0], scope), expand_in(f.children()[1], scope));
    case Formula::Kind::Or:
      return Formula::disj(expand_in(f.children()[0], scope), expand_in(f.children()[1], scope));
    case Formula::Kind::Implies:
      return Formula::implies(expand_in(f.children()[0], scope), expand_in(f.children()[1], scope));
    case Formula::Kind::Not:
      return Formula::negation(expand_in(f.children()[0], scope));
    case Formula::Kind::ForAll: {
      std::optional<Formula> acc;
      for (const auto& item : f.set().items) {
        const std::size_t depth = scope.size();
        for (std::size_t i = 0; i < f.vars().size(); ++i)
          scope.push_back({f.vars()[i], &item, f.vars().size() == 1, i});
        Formula instance = expand_in(f.children()[0], scope);
        scope.resize(depth);
        acc = acc ? Formula::conj(std::move(*acc), std::move(instance)) : std::move(instance);
      }
      return *acc;
    }
  }
  return f;
}

// Negation of a comparison as a positive comparison.
Formula negated_atom(const Formula& f) {
  switch (f.op()) {
    case CmpOp::Le: return Formula::cmp(CmpOp::Lt, f.rhs(), f.lhs());
    case CmpOp::Lt: return Formula::cmp(CmpOp::Le, f.rhs(), f.lhs());
    case CmpOp::Ge: return Formula::cmp(CmpOp::Lt, f.lhs(), f.rhs());
    case CmpOp::Gt: return Formula::cmp(CmpOp::Le, f.lhs(), f.rhs());
    case CmpOp::Eq: return Formula::cmp(CmpOp::Ne, f.lhs(), f.rhs());
    case CmpOp::Ne: return Formula::cmp(CmpOp::Eq, f.lhs(), f.rhs());
  }
  return f;
}

Formula push_negative(const Formula& f, bool rewrite);

Formula push_positive(const Formula& f, bool rewrite) {
  switch (f.kind()) {
    case Formula::Kind::Cmp: return f;
    case Formula::Kind::And:
      return Formula::conj(push_positive(f.children()[0], rewrite), push_positive(f.children()[1], rewrite));
    case Formula::Kind::Or:
      return Formula::disj(push_positive(f.children()[0], rewrite), push_positive(f.children()[1], rewrite));
    case Formula::Kind::Implies:
      if (rewrite)
        return Formula::disj(push_negative(f.children()[0], rewrite), push_positive(f.children()[1], rewrite));
      return Formula::implies(push_positive(f.children()[0], rewrite), push_positive(f.children()[1], rewrite));
    case Formula::Kind::Not: return push_negative(f.children()[0], rewrite);
    case Formula::Kind::ForAll:
      return Formula::forall(f.vars(), f.set(), push_positive(f.children()[0], rewrite));
  }
  return f;
}

Formula push_negative(const Formula& f, bool rewrite) {
  switch (f.kind()) {
    case Formula::Kind::Cmp: return negated_atom(f);
    case Formula::Kind::And:
      return Formula::disj(push_negative(f.children()[0], rewrite), push_negative(f.children()[1], rewrite));
    case Formula::Kind::Or:
      return Formula::conj(push_negative(f.children()[0], rewrite), push_negative(f.children()[1], rewrite));
    case Formula::Kind::Implies:
      return Formula::conj(push_positive(f.children()[0], rewrite), push_negative(f.children()[1], rewrite));
    case Formula::Kind::Not: return push_positive(f.children()[0], rewrite);
    case Formula::Kind::ForAll: return push_negative(expand(f), rewrite);
  }
  return f;
}

bool compare(CmpOp op, double l, double r) {
  switch (op) {
    case CmpOp::Le: return l <= r;
    case CmpOp::Lt: return l < r;
    case CmpOp::Ge: return l >= r;
    case CmpOp::Gt: return l > r;
    case CmpOp::Eq: return l == r;
    case CmpOp::Ne: return l != r;
  }
  return false;
}

}  // namespace

Formula expand(const Formula& f) {
  Scope scope;
  return expand_in(f, scope);
}

Formula push_negations(const Formula& f, bool rewrite_implications) {
  return push_positive(f, rewrite_implications);
}

bool eval_crisp(const Formula& f, const Bindings<double>& env) {
  switch (f.kind()) {
    case Formula::Kind::Cmp: return compare(f.op(), evaluate(f.lhs(), env), evaluate(f.rhs(), env));
    case Formula::Kind::And: return eval_crisp(f.children()[0], env) && eval_crisp(f.children()[1], env);
    case Formula::Kind::Or: return eval_crisp(f.children()[0], env) || eval_crisp(f.children()[1], env);
    case Formula::Kind::Implies: return !eval_crisp(f.children()[0], env) || eval_crisp(f.children()[1], env);
    case Formula::Kind::Not: return !eval_crisp(f.children()[0], env);
    case Formula::Kind::ForAll: return eval_crisp(expand(f), env);
  }
  return false;
}

}  // namespace dlogic
