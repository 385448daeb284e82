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

#include "dlogic/autodiff.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <string>

namespace dlogic::ad {

namespace {

Tape* same_tape(Var a, [[maybe_unused]] Var b) {
  assert(a.tape() == b.tape() && "operands recorded on different tapes");
  return a.tape();
}

}  // namespace

Eigen::VectorXd Gradient::wrt(std::span<const Var> vars) const {
  Eigen::VectorXd g(static_cast<Eigen::Index>(vars.size()));
  for (std::size_t i = 0; i < vars.size(); ++i) g[static_cast<Eigen::Index>(i)] = (*this)[vars[i]];
  return g;
}

bool Gradient::all_finite() const {
  return std::all_of(adjoints_.begin(), adjoints_.end(), [](double v) { return std::isfinite(v); });
}

Var Tape::push(Op op, std::uint32_t a, std::uint32_t b, double value) {
  const auto index = static_cast<std::uint32_t>(entries_.size());
  entries_.push_back(Entry{op, a, b, value});
  return Var(this, index);
}

Var Tape::variable(double value) { return push(Op::Var, 0, 0, value); }

Var Tape::constant(double value) { return push(Op::Const, 0, 0, value); }

void Tape::note_branch(double margin) {
  if (margin > 0.0) min_margin_ = std::min(min_margin_, margin);
}

void Tape::clear() {
  entries_.clear();
  min_margin_ = std::numeric_limits<double>::infinity();
}

Var Tape::record(Op op, Var a, Var b) {
  assert(a.tape() == this);
  const double x = entries_[a.index()].value;
  const double y = b.valid() ? entries_[b.index()].value : 0.0;
  double v = 0.0;
  switch (op) {
    case Op::Const:
    case Op::Var:
      throw std::invalid_argument("record: leaves are created with constant()/variable()");
    case Op::Add: v = x + y; break;
    case Op::Sub: v = x - y; break;
    case Op::Mul: v = x * y; break;
    case Op::Div:
      if (y == 0.0) throw DomainError("division by zero");
      v = x / y;
      break;
    case Op::Min:
      note_branch(std::abs(x - y));
      v = x <= y ? x : y;
      break;
    case Op::Max:
      note_branch(std::abs(x - y));
      v = x >= y ? x : y;
      break;
    case Op::Abs:
      note_branch(std::abs(x));
      v = std::abs(x);
      break;
    case Op::Exp: v = std::exp(x); break;
    case Op::Ln:
      if (!(x > 0.0)) throw DomainError("ln of non-positive value " + std::to_string(x));
      v = std::log(x);
      break;
    case Op::Pow:
      if (x < 0.0) throw DomainError("pow with negative base " + std::to_string(x));
      if (x == 0.0 && y < 0.0) throw DomainError("pow: zero raised to a negative power");
      v = (x == 0.0 && y == 0.0) ? 1.0 : std::pow(x, y);
      break;
    case Op::Sqrt:
      if (x < 0.0) throw DomainError("sqrt of negative value " + std::to_string(x));
      note_branch(x);
      v = std::sqrt(x);
      break;
    case Op::Sigmoid: v = dlogic::sigmoid(x); break;
  }
  return push(op, a.index(), b.valid() ? b.index() : 0, v);
}

Gradient Tape::grad(Var root) const {
  assert(root.tape() == this);
  std::vector<double> adj(root.index() + 1, 0.0);
  adj[root.index()] = 1.0;
  for (std::size_t i = root.index() + 1; i-- > 0;) {
    const double g = adj[i];
    if (g == 0.0) continue;
    const Entry& e = entries_[i];
    const double x = e.op == Op::Const || e.op == Op::Var ? 0.0 : entries_[e.a].value;
    const double y = entries_[e.b].value;
    switch (e.op) {
      case Op::Const:
      case Op::Var:
        break;
      case Op::Add:
        adj[e.a] += g;
        adj[e.b] += g;
        break;
      case Op::Sub:
        adj[e.a] += g;
        adj[e.b] -= g;
        break;
      case Op::Mul:
        adj[e.a] += g * y;
        adj[e.b] += g * x;
        break;
      case Op::Div:
        adj[e.a] += g / y;
        adj[e.b] -= g * x / (y * y);
        break;
      case Op::Min:
        adj[x <= y ? e.a : e.b] += g;
        break;
      case Op::Max:
        adj[x >= y ? e.a : e.b] += g;
        break;
      case Op::Abs:
        adj[e.a] += x > 0.0 ? g : (x < 0.0 ? -g : 0.0);
        break;
      case Op::Exp:
        adj[e.a] += g * e.value;
        break;
      case Op::Ln:
        adj[e.a] += g / x;
        break;
      case Op::Pow:
        if (x == 0.0) {
          // d/dbase of 0^y: 0 for y > 1 or y == 0, 1 for y == 1, unbounded for 0 < y < 1.
          if (y == 1.0) {
            adj[e.a] += g;
          } else if (y > 0.0 && y < 1.0) {
            adj[e.a] += g * std::numeric_limits<double>::infinity();
          }
          // d/dexponent uses 0 * ln 0 = 0.
        } else {
          adj[e.a] += g * y * std::pow(x, y - 1.0);
          adj[e.b] += g * e.value * std::log(x);
        }
        break;
      case Op::Sqrt:
        if (e.value > 0.0) adj[e.a] += g * 0.5 / e.value;
        break;
      case Op::Sigmoid:
        adj[e.a] += g * e.value * (1.0 - e.value);
        break;
    }
  }
  return Gradient(std::move(adj));
}

Var operator+(Var a, Var b) { return same_tape(a, b)->record(Op::Add, a, b); }
Var operator-(Var a, Var b) { return same_tape(a, b)->record(Op::Sub, a, b); }
Var operator*(Var a, Var b) { return same_tape(a, b)->record(Op::Mul, a, b); }
Var operator/(Var a, Var b) { return same_tape(a, b)->record(Op::Div, a, b); }
Var operator-(Var a) { return a.tape()->constant(0.0) - a; }

Var operator+(Var a, double b) { return a + a.tape()->constant(b); }
Var operator+(double a, Var b) { return b.tape()->constant(a) + b; }
Var operator-(Var a, double b) { return a - a.tape()->constant(b); }
Var operator-(double a, Var b) { return b.tape()->constant(a) - b; }
Var operator*(Var a, double b) { return a * a.tape()->constant(b); }
Var operator*(double a, Var b) { return b.tape()->constant(a) * b; }
Var operator/(Var a, double b) { return a / a.tape()->constant(b); }
Var operator/(double a, Var b) { return b.tape()->constant(a) / b; }

Var min(Var a, Var b) { return same_tape(a, b)->record(Op::Min, a, b); }
Var min(Var a, double b) { return min(a, a.tape()->constant(b)); }
Var min(double a, Var b) { return min(b.tape()->constant(a), b); }
Var max(Var a, Var b) { return same_tape(a, b)->record(Op::Max, a, b); }
Var max(Var a, double b) { return max(a, a.tape()->constant(b)); }
Var max(double a, Var b) { return max(b.tape()->constant(a), b); }
Var abs(Var a) { return a.tape()->record(Op::Abs, a); }
Var exp(Var a) { return a.tape()->record(Op::Exp, a); }
Var log(Var a) { return a.tape()->record(Op::Ln, a); }
Var pow(Var base, Var exponent) { return same_tape(base, exponent)->record(Op::Pow, base, exponent); }
Var pow(Var base, double exponent) { return pow(base, base.tape()->constant(exponent)); }
Var pow(double base, Var exponent) { return pow(exponent.tape()->constant(base), exponent); }
Var sqrt(Var a) { return a.tape()->record(Op::Sqrt, a); }
Var sigmoid(Var a) { return a.tape()->record(Op::Sigmoid, a); }

}  // namespace dlogic::ad
