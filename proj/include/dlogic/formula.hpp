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

#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "dlogic/autodiff.hpp"

namespace dlogic {

/// Comparison operators of an atomic constraint.
enum class CmpOp { Le, Lt, Ge, Gt, Eq, Ne };

std::string_view to_string(CmpOp op);

/// An index into the network's inputs or outputs: either concrete or a
/// variable bound by an enclosing `forall`.
using Index = std::variant<std::size_t, std::string>;

/// Which vector a paired-sample distance ranges over.
enum class VectorSource { Inputs, Outputs };

/// Arithmetic expression over network inputs and outputs.
class Expr {
 public:
  enum class Kind { Const, Input, Output, Sum, GroupSum, Add, Sub, Mul, Norm2Diff };

  static Expr constant(double value);
  static Expr input(Index index);
  static Expr output(Index index);
  /// Sum of a non-empty list of terms.
  static Expr sum(std::vector<Expr> terms);
  /// Sum of the outputs of every class in the group bound to `var`.
  static Expr group_sum(std::string var);
  static Expr add(Expr lhs, Expr rhs);
  static Expr sub(Expr lhs, Expr rhs);
  static Expr mul(Expr lhs, Expr rhs);
  /// Euclidean distance between a sample's vector and its paired sample's.
  static Expr norm2_diff(VectorSource source);

  Kind kind() const;
  double value() const;
  const Index& index() const;
  const std::string& var() const;
  VectorSource source() const;
  std::span<const Expr> children() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// One element of a binding set: a class triple or a class group.
using Binding = std::vector<std::size_t>;

/// A named finite set that `forall` ranges over.
struct BindingSet {
  std::string name;
  std::vector<Binding> items;

  friend bool operator==(const BindingSet&, const BindingSet&) = default;
};

/// Logical formula over comparisons of expressions.
class Formula {
 public:
  enum class Kind { Cmp, And, Or, Not, Implies, ForAll };

  static Formula cmp(CmpOp op, Expr lhs, Expr rhs);
  static Formula conj(Formula lhs, Formula rhs);
  static Formula disj(Formula lhs, Formula rhs);
  static Formula negation(Formula f);
  static Formula implies(Formula antecedent, Formula consequent);
  /// Finite conjunction of `body` over every item of `set`. With one
  /// variable the variable binds the whole item (a group, or a single class
  /// when the item has one element); with k variables every item must have
  /// k elements and the variables bind them positionally.
  static Formula forall(std::vector<std::string> vars, BindingSet set, Formula body);

  Kind kind() const;
  CmpOp op() const;
  const Expr& lhs() const;
  const Expr& rhs() const;
  /// Operands of And/Or/Implies (two) and Not/ForAll (one).
  std::span<const Formula> children() const;
  const std::vector<std::string>& vars() const;
  const BindingSet& set() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Name resolution for the DSL.
struct ParseContext {
  /// When set, `out[i]` with i >= n_outputs is rejected.
  std::optional<std::size_t> n_outputs;
  std::optional<std::size_t> n_inputs;
  std::map<std::string, std::vector<Binding>, std::less<>> sets;
  std::map<std::string, double, std::less<>> constants;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses the constraint DSL:
///
///   formula := "forall" binder "in" ident ":" formula | implz
///   binder  := ident | "(" ident ("," ident)* ")"
///   implz   := orz ("->" orz)?
///   orz     := andz ("or" andz)*
///   andz    := notz ("and" notz)*
///   notz    := "not" notz | "(" formula ")" | cmp
///   cmp     := expr ("<=" | "<" | ">=" | ">" | "==" | "!=") expr
///   expr    := term (("+" | "-") term)*
///   term    := factor ("*" factor)*
///   factor  := number | ident | "out" "[" idx "]" | "in" "[" idx "]"
///            | "sum" "(" expr ("," expr)* ")" | "dist" "(" ("out" | "in") ")"
///            | "(" expr ")"
///
/// `idx` is a non-negative integer or a bound variable; a bare identifier
/// in `factor` names a constant from the context. `sum(out[g])` with `g`
/// bound to a group sums the group's outputs.
Formula parse(std::string_view text, const ParseContext& context = {});

std::string print(const Expr& e);
/// Canonical text form; parse(print(f)) == f given a context that knows
/// the binding sets referenced by f.
std::string print(const Formula& f);

/// Replaces every ForAll by the left-folded conjunction of its instances.
Formula expand(const Formula& f);

/// Rewrites `f` so that no Not remains: negated comparisons become their
/// duals, De Morgan moves negation through And/Or, and Not(Implies(a, b))
/// becomes And(a, not b). With `rewrite_implications`, Implies(a, b) is
/// first replaced by Or(not a, b). A negated ForAll is expanded first.
Formula push_negations(const Formula& f, bool rewrite_implications = false);

/// Raised when an evaluation environment lacks a referenced value.
class UnboundReference : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Values an expression can refer to. The paired vectors are only needed
/// by dist(...) terms.
template <class T>
struct Bindings {
  std::span<const T> inputs;
  std::span<const T> outputs;
  std::span<const T> paired_inputs;
  std::span<const T> paired_outputs;
};

/// Classical two-valued semantics with exact real comparisons.
bool eval_crisp(const Formula& f, const Bindings<double>& env);

/// Evaluates an expression whose indices are all concrete (see expand).
/// Instantiated with double for crisp checks and with ad::Var for losses.
template <class T>
T evaluate(const Expr& e, const Bindings<T>& env);

namespace detail {

[[noreturn]] void throw_unbound(std::string_view what, std::size_t index, std::size_t size);
std::size_t concrete_index(const Index& index);

template <class T>
const T& lookup(std::span<const T> values, const Index& index, std::string_view what) {
  const std::size_t i = concrete_index(index);
  if (i >= values.size()) throw_unbound(what, i, values.size());
  return values[i];
}

template <class T>
T distance(std::span<const T> a, std::span<const T> b, std::string_view what) {
  using std::sqrt;
  if (a.empty() || a.size() != b.size()) throw_unbound(what, a.size(), b.size());
  T acc = (a[0] - b[0]) * (a[0] - b[0]);
  for (std::size_t i = 1; i < a.size(); ++i) acc = acc + (a[i] - b[i]) * (a[i] - b[i]);
  return sqrt(acc);
}

}  // namespace detail

template <class T>
T evaluate(const Expr& e, const Bindings<T>& env) {
  switch (e.kind()) {
    case Expr::Kind::Const: {
      if constexpr (std::is_arithmetic_v<T>) {
        return e.value();
      } else {
        // Constants are recorded on the tape of the bound values.
        const T* anchor = !env.outputs.empty() ? &env.outputs[0] : (!env.inputs.empty() ? &env.inputs[0] : nullptr);
        if (anchor == nullptr) detail::throw_unbound("constant anchor", 0, 0);
        return lift(*anchor, e.value());
      }
    }
    case Expr::Kind::Input:
      return detail::lookup(env.inputs, e.index(), "in");
    case Expr::Kind::Output:
      return detail::lookup(env.outputs, e.index(), "out");
    case Expr::Kind::Sum: {
      auto terms = e.children();
      T acc = evaluate(terms[0], env);
      for (std::size_t i = 1; i < terms.size(); ++i) acc = acc + evaluate(terms[i], env);
      return acc;
    }
    case Expr::Kind::GroupSum:
      throw UnboundReference("unexpanded group sum over '" + e.var() + "'");
    case Expr::Kind::Add:
      return evaluate(e.children()[0], env) + evaluate(e.children()[1], env);
    case Expr::Kind::Sub:
      return evaluate(e.children()[0], env) - evaluate(e.children()[1], env);
    case Expr::Kind::Mul:
      return evaluate(e.children()[0], env) * evaluate(e.children()[1], env);
    case Expr::Kind::Norm2Diff:
      return e.source() == VectorSource::Outputs
                 ? detail::distance(env.outputs, env.paired_outputs, "dist(out)")
                 : detail::distance(env.inputs, env.paired_inputs, "dist(in)");
  }
  throw std::logic_error("evaluate: unknown expression kind");
}

}  // namespace dlogic
