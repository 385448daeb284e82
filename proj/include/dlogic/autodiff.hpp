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
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

/// Scalar reverse-mode automatic differentiation.
///
/// A Tape records every operation eagerly (values are computed when the
/// node is recorded) and a single backward sweep produces the adjoints of
/// every entry. Var is a lightweight handle into a tape, so templated code
/// written against `double` can be instantiated with `ad::Var` unchanged:
/// arithmetic operators and the free functions min/max/abs/exp/log/pow/
/// sqrt/sigmoid are found through ADL.
///
/// Kinks follow a fixed convention: max(a, b) routes the adjoint to `a` when
/// a >= b, min(a, b) to `a` when a <= b, abs'(0) = 0 and sqrt'(0) = 0.
/// pow(0, 0) evaluates to 1.
namespace dlogic::ad {

enum class Op : std::uint8_t {
  Const,
  Var,
  Add,
  Sub,
  Mul,
  Div,
  Min,
  Max,
  Abs,
  Exp,
  Ln,
  Pow,
  Sqrt,
  Sigmoid,
};

/// Raised when an operation is recorded outside its domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class Tape;

class Var {
 public:
  Var() = default;

  double value() const;
  std::uint32_t index() const { return index_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t index) : tape_(tape), index_(index) {}

  Tape* tape_ = nullptr;
  std::uint32_t index_ = 0;
};

/// Adjoints of every tape entry after one backward sweep.
class Gradient {
 public:
  Gradient() = default;
  explicit Gradient(std::vector<double> adjoints) : adjoints_(std::move(adjoints)) {}

  /// Partial derivative of the root with respect to `v`; 0 when `v` does
  /// not influence the root.
  double operator[](Var v) const {
    return v.index() < adjoints_.size() ? adjoints_[v.index()] : 0.0;
  }

  Eigen::VectorXd wrt(std::span<const Var> vars) const;

  bool all_finite() const;

 private:
  std::vector<double> adjoints_;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var variable(double value);
  Var constant(double value);

  /// Records `op` applied to the operands and computes its value eagerly.
  /// Unary ops ignore `b`. Throws DomainError for ln of a non-positive
  /// argument, division by zero, sqrt of a negative number and pow with a
  /// negative base or 0 raised to a negative power.
  Var record(Op op, Var a, Var b = {});

  /// Reverse accumulation from `root`: exactly one sweep over the entries
  /// at or below the root.
  Gradient grad(Var root) const;

  double value(Var v) const { return entries_[v.index()].value; }
  Op op(Var v) const { return entries_[v.index()].op; }
  std::size_t size() const { return entries_.size(); }

  /// Registers the distance of the current evaluation point from a branch
  /// boundary (a kink or a discontinuity). Min/max/abs register themselves;
  /// callers that branch on values register explicitly. Exact ties (margin
  /// 0) are ignored: at generic points they come from operands saturated at
  /// the same constant, where both sides of the branch agree.
  void note_branch(double margin);

  /// Smallest margin registered since the last clear(); +inf if none.
  double min_branch_margin() const { return min_margin_; }

  /// Drops every entry but keeps the allocation. Existing Vars become
  /// dangling.
  void clear();

 private:
  struct Entry {
    Op op;
    std::uint32_t a;
    std::uint32_t b;
    double value;
  };

  Var push(Op op, std::uint32_t a, std::uint32_t b, double value);

  std::vector<Entry> entries_;
  double min_margin_ = INFINITY;
};

inline double Var::value() const { return tape_->value(*this); }

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator-(Var a);

Var operator+(Var a, double b);
Var operator+(double a, Var b);
Var operator-(Var a, double b);
Var operator-(double a, Var b);
Var operator*(Var a, double b);
Var operator*(double a, Var b);
Var operator/(Var a, double b);
Var operator/(double a, Var b);

inline Var& operator+=(Var& a, Var b) { return a = a + b; }
inline Var& operator-=(Var& a, Var b) { return a = a - b; }
inline Var& operator*=(Var& a, Var b) { return a = a * b; }

Var min(Var a, Var b);
Var min(Var a, double b);
Var min(double a, Var b);
Var max(Var a, Var b);
Var max(Var a, double b);
Var max(double a, Var b);
Var abs(Var a);
Var exp(Var a);
Var log(Var a);
Var pow(Var base, Var exponent);
Var pow(Var base, double exponent);
Var pow(double base, Var exponent);
Var sqrt(Var a);
Var sigmoid(Var a);

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every
/// coordinate. Exceptions thrown by `f` propagate.
template <class F>
Eigen::VectorXd finite_diff(F&& f, const Eigen::Ref<const Eigen::VectorXd>& point, double h = 1e-5) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff: step must be positive");
  Eigen::VectorXd x = point;
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double fp = f(x);
    x[i] = xi - h;
    const double fm = f(x);
    x[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace dlogic::ad

namespace dlogic {

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double value_of(double x) { return x; }
inline double value_of(ad::Var x) { return x.value(); }

/// A constant of the same scalar kind as `like`.
inline double lift(double /*like*/, double v) { return v; }
inline ad::Var lift(ad::Var like, double v) { return like.tape()->constant(v); }

/// Value comparison x <= y that also registers |x - y| as a branch margin
/// when recording on a tape.
inline bool branch_le(double x, double y) { return x <= y; }
inline bool branch_le(ad::Var x, ad::Var y) {
  x.tape()->note_branch(std::abs(x.value() - y.value()));
  return x.value() <= y.value();
}

/// Exact equality test with the same margin bookkeeping as branch_le.
inline bool branch_eq(double x, double y) { return x == y; }
inline bool branch_eq(ad::Var x, ad::Var y) {
  x.tape()->note_branch(std::abs(x.value() - y.value()));
  return x.value() == y.value();
}

}  // namespace dlogic
