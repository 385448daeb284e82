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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dlogic/autodiff.hpp"
#include "dlogic/formula.hpp"

/// Differentiable semantics for constraint formulas.
///
/// Every operator is a free function template over the scalar type, so the
/// same definition serves plain evaluation (`double`) and loss recording on
/// an autodiff tape (`ad::Var`). Fuzzy operators work on truth values in
/// [0, 1]; DL2 operators work on losses in [0, inf) where 0 means satisfied.
namespace dlogic {

enum class TNorm { Godel, Lukasiewicz, Yager, Product };
enum class SNorm { Godel, Lukasiewicz, Yager, ProbabilisticSum };
enum class ImplicationKind { Godel, KleeneDienes, Lukasiewicz, Yager, Goguen, Reichenbach };

std::string_view to_string(TNorm t);
std::string_view to_string(SNorm s);
std::string_view to_string(ImplicationKind i);

/// Tunable constants shared by all backends.
struct LogicParams {
  /// DL2 penalty for a violated `!=`.
  double xi = 1.0;
  /// Yager exponent, p >= 1.
  double yager_p = 2.0;
  /// Steepness of the sigmoidal implication transform.
  double sigmoidal_s = 9.0;
  /// Denominator offset of the fuzzy comparison.
  double comparison_eps = 0.05;
  /// Exponent q of the bijection phi(x) = x^q.
  double phi_exponent = 2.0;
};

// ---------------------------------------------------------------------------
// Norms

/// ||(u, v)||_p. Returns an exact zero (with zero gradient) at the origin.
template <class T>
T pythagorean_sum(const T& u, const T& v, double p) {
  using std::abs;
  using std::pow;
  using std::sqrt;
  if (value_of(u) == 0.0 && value_of(v) == 0.0) return lift(u, 0.0);
  if (p == 2.0) return sqrt(u * u + v * v);
  if (p == 1.0) return abs(u) + abs(v);
  return pow(pow(abs(u), p) + pow(abs(v), p), 1.0 / p);
}

template <class T>
T tnorm(TNorm family, const T& x, const T& y, double p = 2.0) {
  using std::max;
  using std::min;
  switch (family) {
    case TNorm::Godel: return min(x, y);
    case TNorm::Lukasiewicz: return max(x + y - 1.0, 0.0);
    case TNorm::Yager: return max(1.0 - pythagorean_sum(1.0 - x, 1.0 - y, p), 0.0);
    case TNorm::Product: return x * y;
  }
  throw std::logic_error("tnorm: unknown family");
}

template <class T>
T snorm(SNorm family, const T& x, const T& y, double p = 2.0) {
  using std::max;
  using std::min;
  switch (family) {
    case SNorm::Godel: return max(x, y);
    case SNorm::Lukasiewicz: return min(x + y, 1.0);
    case SNorm::Yager: return min(pythagorean_sum(x, y, p), 1.0);
    case SNorm::ProbabilisticSum: return x + y - x * y;
  }
  throw std::logic_error("snorm: unknown family");
}

template <class T>
T fuzzy_not(const T& x) {
  return 1.0 - x;
}

// ---------------------------------------------------------------------------
// Implications

/// Fuzzy implications. The Goedel and Goguen branches use x <= y, so
/// I(0, y) = 1 and the Goguen quotient is only taken for x > y >= 0.
template <class T>
T implication(ImplicationKind kind, const T& x, const T& y) {
  using std::max;
  using std::min;
  using std::pow;
  switch (kind) {
    case ImplicationKind::Godel:
      return branch_le(x, y) ? lift(x, 1.0) : y;
    case ImplicationKind::KleeneDienes:
      return max(1.0 - x, y);
    case ImplicationKind::Lukasiewicz:
      return min(1.0 - x + y, 1.0);
    case ImplicationKind::Yager:
      // 0^0 evaluates to 1, covering the x = y = 0 case.
      return pow(y, x);
    case ImplicationKind::Goguen:
      return branch_le(x, y) ? lift(x, 1.0) : y / x;
    case ImplicationKind::Reichenbach:
      return 1.0 - x + x * y;
  }
  throw std::logic_error("implication: unknown kind");
}

/// Rescales an implication's output through a steep sigmoid while keeping
/// the endpoints 0 and 1 fixed.
template <class T>
T sigmoidal_transform(const T& truth, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("sigmoidal_transform: steepness must be positive");
  const double e = std::exp(s / 2.0);
  return ((1.0 + e) * sigmoid(s * truth - s / 2.0) - 1.0) / (e - 1.0);
}

/// phi^-1(I(phi(x), phi(y))) for a strictly increasing bijection phi of
/// [0, 1].
template <class T, class Implication, class Phi, class PhiInverse>
T phi_transform(Implication&& imp, Phi&& phi, PhiInverse&& phi_inverse, const T& x, const T& y) {
  return phi_inverse(imp(phi(x), phi(y)));
}

/// phi_transform with phi(x) = x^q.
template <class T>
T power_phi_transform(ImplicationKind kind, const T& x, const T& y, double q = 2.0) {
  using std::pow;
  using std::sqrt;
  auto phi = [q](const T& v) -> T { return q == 2.0 ? v * v : pow(v, q); };
  auto phi_inverse = [q](const T& v) -> T { return q == 2.0 ? sqrt(v) : pow(v, 1.0 / q); };
  auto imp = [kind](const T& a, const T& b) -> T { return implication(kind, a, b); };
  return phi_transform<T>(imp, phi, phi_inverse, x, y);
}

// ---------------------------------------------------------------------------
// Atoms

/// Fuzzy truth of x <= y on unbounded reals:
/// 1 - max(x - y, 0) / (|x| + |y| + eps).
template <class T>
T fuzzy_compare_le(const T& x, const T& y, double eps) {
  using std::abs;
  using std::max;
  return 1.0 - max(x - y, 0.0) / (abs(x) + abs(y) + eps);
}

/// Fuzzy truth of any comparison. `<` and `>` coincide with `<=` and `>=`;
/// equality conjoins both directions with `conjunction`.
template <class T>
T fuzzy_compare(CmpOp op, const T& x, const T& y, double eps, TNorm conjunction, double p = 2.0) {
  switch (op) {
    case CmpOp::Le:
    case CmpOp::Lt: return fuzzy_compare_le(x, y, eps);
    case CmpOp::Ge:
    case CmpOp::Gt: return fuzzy_compare_le(y, x, eps);
    case CmpOp::Eq: return tnorm(conjunction, fuzzy_compare_le(x, y, eps), fuzzy_compare_le(y, x, eps), p);
    case CmpOp::Ne:
      return fuzzy_not(tnorm(conjunction, fuzzy_compare_le(x, y, eps), fuzzy_compare_le(y, x, eps), p));
  }
  throw std::logic_error("fuzzy_compare: unknown operator");
}

/// DL2 loss of a comparison; 0 exactly when it holds.
template <class T>
T dl2_atom(CmpOp op, const T& x, const T& y, double xi = 1.0) {
  using std::max;
  // xi * [x = y]; piecewise constant, so it carries no gradient.
  auto coincide = [&](const T& a, const T& b) { return lift(a, branch_eq(a, b) ? xi : 0.0); };
  switch (op) {
    case CmpOp::Le: return max(x - y, 0.0);
    case CmpOp::Lt: return max(x - y, 0.0) + coincide(x, y);
    case CmpOp::Ge: return max(y - x, 0.0);
    case CmpOp::Gt: return max(y - x, 0.0) + coincide(x, y);
    case CmpOp::Eq: return max(x - y, 0.0) + max(y - x, 0.0);
    case CmpOp::Ne: return coincide(x, y);
  }
  throw std::logic_error("dl2_atom: unknown operator");
}

template <class T>
T dl2_and(const T& a, const T& b) {
  return a + b;
}

template <class T>
T dl2_or(const T& a, const T& b) {
  return a * b;
}

// ---------------------------------------------------------------------------
// Backends

enum class Semantics { Dl2, Fuzzy };

/// Whether a low or a high value means "satisfied".
enum class Polarity { LossZeroWhenTrue, TruthOneWhenTrue };

enum class TransformKind { None, Sigmoidal, Phi };

/// An immutable description of one semantics.
struct LogicBackend {
  std::string name;
  Semantics semantics = Semantics::Fuzzy;
  TNorm conjunction = TNorm::Product;
  SNorm disjunction = SNorm::ProbabilisticSum;
  /// Empty for DL2, which rewrites a -> b to (not a) or b.
  std::optional<ImplicationKind> implication;
  TransformKind transform = TransformKind::None;
  LogicParams params;

  Polarity polarity() const {
    return semantics == Semantics::Dl2 ? Polarity::LossZeroWhenTrue : Polarity::TruthOneWhenTrue;
  }
};

/// Registered backend names: dl2, godel (alias g), kd, lk, gg, rc, rc-s,
/// rc-phi, yg, and the conjunction-study backends tg, tlk, trc, tyg.
const std::vector<std::string>& backend_names();

/// Looks up a backend by name; throws std::invalid_argument listing the
/// valid names otherwise.
LogicBackend make_backend(std::string_view name, const LogicParams& params = {});

/// Applies the preprocessing a backend needs before compile(): DL2 gets
/// implications rewritten and negations pushed to the atoms.
Formula prepare(const Formula& f, const LogicBackend& backend);

class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Compiled constraint value. For fuzzy backends `truth` is the formula's
/// truth degree and `loss = 1 - truth`; for DL2 `truth` equals `loss`.
template <class T>
struct LossValue {
  T loss;
  T truth;
  Polarity polarity;
};

template <class T>
T fuzzy_implication(const LogicBackend& b, const T& x, const T& y) {
  const ImplicationKind kind = *b.implication;
  switch (b.transform) {
    case TransformKind::None: return implication(kind, x, y);
    case TransformKind::Sigmoidal: return sigmoidal_transform(implication(kind, x, y), b.params.sigmoidal_s);
    case TransformKind::Phi: return power_phi_transform(kind, x, y, b.params.phi_exponent);
  }
  throw std::logic_error("fuzzy_implication: unknown transform");
}

namespace detail {

template <class T>
T compile_dl2(const Formula& f, const LogicBackend& b, const Bindings<T>& env) {
  switch (f.kind()) {
    case Formula::Kind::Cmp:
      return dl2_atom(f.op(), evaluate(f.lhs(), env), evaluate(f.rhs(), env), b.params.xi);
    case Formula::Kind::And:
      return dl2_and(compile_dl2(f.children()[0], b, env), compile_dl2(f.children()[1], b, env));
    case Formula::Kind::Or:
      return dl2_or(compile_dl2(f.children()[0], b, env), compile_dl2(f.children()[1], b, env));
    case Formula::Kind::ForAll:
      return compile_dl2(expand(f), b, env);
    case Formula::Kind::Not:
      throw CompileError("dl2 has no negation operator; push negations to the atoms first (prepare/push_negations)");
    case Formula::Kind::Implies:
      throw CompileError("dl2 has no implication operator; rewrite with push_negations(f, true) first");
  }
  throw std::logic_error("compile: unknown formula kind");
}

template <class T>
T compile_fuzzy(const Formula& f, const LogicBackend& b, const Bindings<T>& env) {
  const double p = b.params.yager_p;
  switch (f.kind()) {
    case Formula::Kind::Cmp:
      return fuzzy_compare(f.op(), evaluate(f.lhs(), env), evaluate(f.rhs(), env), b.params.comparison_eps,
                           b.conjunction, p);
    case Formula::Kind::And:
      return tnorm(b.conjunction, compile_fuzzy(f.children()[0], b, env), compile_fuzzy(f.children()[1], b, env), p);
    case Formula::Kind::Or:
      return snorm(b.disjunction, compile_fuzzy(f.children()[0], b, env), compile_fuzzy(f.children()[1], b, env), p);
    case Formula::Kind::Not:
      return fuzzy_not(compile_fuzzy(f.children()[0], b, env));
    case Formula::Kind::Implies:
      return fuzzy_implication(b, compile_fuzzy(f.children()[0], b, env), compile_fuzzy(f.children()[1], b, env));
    case Formula::Kind::ForAll:
      return compile_fuzzy(expand(f), b, env);
  }
  throw std::logic_error("compile: unknown formula kind");
}

}  // namespace detail

/// Maps a formula to its loss under `backend`. Quantifiers fold with the
/// backend's conjunction. DL2 formulas must be free of Not and Implies
/// (see prepare()).
template <class T>
LossValue<T> compile(const Formula& f, const LogicBackend& backend, const Bindings<T>& env) {
  if (backend.semantics == Semantics::Dl2) {
    T loss = detail::compile_dl2(f, backend, env);
    return {loss, loss, Polarity::LossZeroWhenTrue};
  }
  T truth = detail::compile_fuzzy(f, backend, env);
  return {1.0 - truth, truth, Polarity::TruthOneWhenTrue};
}

}  // namespace dlogic
