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
#include <random>
#include <string>
#include <vector>

#include "dlogic/formula.hpp"

namespace testing {

// Small seeded generator shared by the property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(double p = 0.5) { return uniform() < p; }

  // A value in [0, 1] that hits 0, 1 and repeated values now and then.
  double unit() {
    const double r = uniform();
    if (r < 0.05) return 0.0;
    if (r < 0.10) return 1.0;
    if (r < 0.15) return 0.5;
    return uniform();
  }

  std::vector<double> simplex(std::size_t n) {
    std::vector<double> v(n);
    double total = 0.0;
    for (auto& x : v) total += (x = -std::log(uniform(1e-12, 1.0)));
    for (auto& x : v) x /= total;
    return v;
  }

  std::vector<double> vector(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Random expression over out[0..n_out) and in[0..n_in), depth-bounded.
inline dlogic::Expr random_expr(Gen& g, std::size_t n_out, std::size_t n_in, int depth) {
  using dlogic::Expr;
  const std::size_t pick = depth <= 0 ? g.index(3) : g.index(6);
  switch (pick) {
    case 0: return Expr::constant(std::round(g.uniform(-2.0, 2.0) * 4.0) / 4.0);
    case 1: return Expr::output(g.index(n_out));
    case 2: return n_in > 0 ? Expr::input(g.index(n_in)) : Expr::output(g.index(n_out));
    case 3: return Expr::add(random_expr(g, n_out, n_in, depth - 1), random_expr(g, n_out, n_in, depth - 1));
    case 4: return Expr::sub(random_expr(g, n_out, n_in, depth - 1), random_expr(g, n_out, n_in, depth - 1));
    default: return Expr::mul(random_expr(g, n_out, n_in, depth - 1), Expr::constant(g.uniform(0.5, 2.0)));
  }
}

// Random quantifier-free formula of depth <= `depth`.
inline dlogic::Formula random_formula(Gen& g, std::size_t n_out, std::size_t n_in, int depth,
                                      bool with_implications = true) {
  using dlogic::CmpOp;
  using dlogic::Formula;
  const std::size_t kinds = with_implications ? 5 : 4;
  const std::size_t pick = depth <= 0 ? 0 : g.index(kinds);
  switch (pick) {
    case 0: {
      static const CmpOp ops[] = {CmpOp::Le, CmpOp::Lt, CmpOp::Ge, CmpOp::Gt, CmpOp::Eq, CmpOp::Ne};
      return Formula::cmp(ops[g.index(6)], random_expr(g, n_out, n_in, 1), random_expr(g, n_out, n_in, 1));
    }
    case 1:
      return Formula::conj(random_formula(g, n_out, n_in, depth - 1, with_implications),
                           random_formula(g, n_out, n_in, depth - 1, with_implications));
    case 2:
      return Formula::disj(random_formula(g, n_out, n_in, depth - 1, with_implications),
                           random_formula(g, n_out, n_in, depth - 1, with_implications));
    case 3: return Formula::negation(random_formula(g, n_out, n_in, depth - 1, with_implications));
    default:
      return Formula::implies(random_formula(g, n_out, n_in, depth - 1, with_implications),
                              random_formula(g, n_out, n_in, depth - 1, with_implications));
  }
}

// Values on a coarse grid so that equalities actually occur.
inline std::vector<double> grid_values(Gen& g, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(g.index(9)) / 8.0;
  return v;
}

}  // namespace testing
