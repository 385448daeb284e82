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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "dlogic/autodiff.hpp"
#include "support.hpp"

using namespace dlogic;
using ad::Tape;
using ad::Var;

TEST_CASE("values are computed eagerly") {
  Tape t;
  Var x = t.variable(2.0), y = t.variable(3.0);
  CHECK((x * y + x).value() == 8.0);
  CHECK((x / y).value() == doctest::Approx(2.0 / 3.0));
  CHECK((1.0 - x).value() == -1.0);
  CHECK((-y).value() == -3.0);
  CHECK(exp(x).value() == doctest::Approx(std::exp(2.0)));
  CHECK(log(y).value() == doctest::Approx(std::log(3.0)));
  CHECK(pow(x, y).value() == doctest::Approx(8.0));
  CHECK(sqrt(y).value() == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("gradient of a composite matches the hand derivative") {
  // f = exp(x) * y / (x + y) - log(y)
  const double xv = 0.3, yv = 1.7;
  Tape t;
  Var x = t.variable(xv), y = t.variable(yv);
  Var f = exp(x) * y / (x + y) - log(y);
  auto g = t.grad(f);
  const double s = xv + yv;
  const double dfx = std::exp(xv) * yv / s - std::exp(xv) * yv / (s * s);
  const double dfy = std::exp(xv) / s - std::exp(xv) * yv / (s * s) - 1.0 / yv;
  CHECK(g[x] == doctest::Approx(dfx).epsilon(1e-12));
  CHECK(g[y] == doctest::Approx(dfy).epsilon(1e-12));
}

TEST_CASE("adjoints accumulate over fan-out") {
  Tape t;
  Var x = t.variable(1.5);
  Var f = x * x * x + x;  // 3x^2 + 1
  CHECK(t.grad(f)[x] == doctest::Approx(3.0 * 1.5 * 1.5 + 1.0));
}

TEST_CASE("sigmoid derivative") {
  Tape t;
  Var x = t.variable(0.4);
  const double s = 1.0 / (1.0 + std::exp(-0.4));
  CHECK(t.grad(sigmoid(x))[x] == doctest::Approx(s * (1.0 - s)));
  CHECK(dlogic::sigmoid(-800.0) == 0.0);
  CHECK(dlogic::sigmoid(800.0) == 1.0);
}

TEST_CASE("kink conventions") {
  SUBCASE("max picks the first operand on ties") {
    Tape t;
    Var a = t.variable(1.0), b = t.variable(1.0);
    auto g = t.grad(max(a, b));
    CHECK(g[a] == 1.0);
    CHECK(g[b] == 0.0);
  }
  SUBCASE("min picks the first operand on ties") {
    Tape t;
    Var a = t.variable(2.0), b = t.variable(2.0);
    auto g = t.grad(min(a, b));
    CHECK(g[a] == 1.0);
    CHECK(g[b] == 0.0);
  }
  SUBCASE("max with a constant at the kink") {
    Tape t;
    Var a = t.variable(0.0);
    CHECK(t.grad(max(a, 0.0))[a] == 1.0);
    CHECK(t.grad(max(0.0, a))[a] == 0.0);
  }
  SUBCASE("abs and sqrt at zero") {
    Tape t;
    Var a = t.variable(0.0);
    CHECK(t.grad(abs(a))[a] == 0.0);
    CHECK(t.grad(sqrt(a))[a] == 0.0);
  }
  SUBCASE("pow at a zero base") {
    Tape t;
    Var b = t.variable(0.0), e = t.variable(0.0);
    Var p = pow(b, e);
    CHECK(p.value() == 1.0);
    auto g = t.grad(p);
    CHECK(g[e] == 0.0);  // 0^0 * ln 0 taken as 0
    CHECK(std::isfinite(g[b]));
  }
  SUBCASE("pow with a positive base") {
    Tape t;
    Var b = t.variable(0.5), e = t.variable(3.0);
    auto g = t.grad(pow(b, e));
    CHECK(g[b] == doctest::Approx(3.0 * 0.25));
    CHECK(g[e] == doctest::Approx(0.125 * std::log(0.5)));
  }
}

TEST_CASE("domain errors") {
  Tape t;
  Var zero = t.variable(0.0), neg = t.variable(-1.0), one = t.variable(1.0);
  CHECK_THROWS_AS(one / zero, ad::DomainError);
  CHECK_THROWS_AS(log(zero), ad::DomainError);
  CHECK_THROWS_AS(sqrt(neg), ad::DomainError);
  CHECK_THROWS_AS(pow(neg, 0.5), ad::DomainError);
  CHECK_THROWS_AS(pow(zero, -1.0), ad::DomainError);
}

TEST_CASE("branch margins are tracked") {
  Tape t;
  CHECK(t.min_branch_margin() == std::numeric_limits<double>::infinity());
  Var a = t.variable(0.3), b = t.variable(0.35);
  (void)max(a, b);
  CHECK(t.min_branch_margin() == doctest::Approx(0.05));
  (void)abs(t.variable(-0.01));
  CHECK(t.min_branch_margin() == doctest::Approx(0.01));
  t.clear();
  CHECK(t.size() == 0);
  CHECK(t.min_branch_margin() == std::numeric_limits<double>::infinity());
}

TEST_CASE("gradient of unrelated variables is zero") {
  Tape t;
  Var x = t.variable(1.0);
  Var f = x * 2.0;
  Var later = t.variable(5.0);
  auto g = t.grad(f);
  CHECK(g[later] == 0.0);
  std::vector<Var> vars{x, later};
  auto w = g.wrt(vars);
  CHECK(w[0] == 2.0);
  CHECK(w[1] == 0.0);
  CHECK(g.all_finite());
}

namespace {

// A random straight-line program over smooth operations, run with either
// plain doubles or tape variables.
struct Program {
  struct Step {
    int op;
    std::size_t a, b;
    double c;
  };
  std::size_t n_inputs;
  std::vector<Step> steps;

  template <class T>
  T run(std::vector<T> regs) const {
    using std::exp;
    using std::log;
    using std::sqrt;
    for (const auto& s : steps) {
      const T& a = regs[s.a];
      const T& b = regs[s.b];
      switch (s.op) {
        case 0: regs.push_back(a + b); break;
        case 1: regs.push_back(a - b); break;
        case 2: regs.push_back(a * b); break;
        case 3: regs.push_back(a / (b * b + 1.0)); break;
        case 4: regs.push_back(exp(a * 0.25)); break;
        case 5: regs.push_back(log(a * a + 1.0)); break;
        case 6: regs.push_back(sqrt(a * a + s.c)); break;
        case 7: regs.push_back(sigmoid(a)); break;
        default: regs.push_back(a * s.c); break;
      }
    }
    return regs.back();
  }
};

Program random_program(testing::Gen& g, std::size_t n_inputs) {
  Program p{n_inputs, {}};
  const std::size_t n_steps = 1 + g.index(8);
  for (std::size_t i = 0; i < n_steps; ++i) {
    const std::size_t avail = n_inputs + i;
    p.steps.push_back({static_cast<int>(g.index(9)), g.index(avail), g.index(avail), g.uniform(0.5, 2.0)});
  }
  return p;
}

}  // namespace

TEST_CASE("property: reverse mode agrees with central differences") {
  testing::Gen g(11);
  int checked = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 1 + g.index(3);
    const Program prog = random_program(g, n);
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = g.uniform(-1.5, 1.5);

    Tape t;
    std::vector<Var> vars;
    for (Eigen::Index i = 0; i < x.size(); ++i) vars.push_back(t.variable(x[i]));
    Var out = prog.run(vars);
    const Eigen::VectorXd analytic = t.grad(out).wrt(vars);

    auto f = [&](const Eigen::VectorXd& p) { return prog.run(std::vector<double>(p.data(), p.data() + p.size())); };
    CHECK(out.value() == doctest::Approx(f(x)).epsilon(1e-12));
    const Eigen::VectorXd numeric = ad::finite_diff(f, x);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double scale = std::max(1.0, std::abs(analytic[i]));
      if (std::abs(analytic[i] - numeric[i]) > 1e-5 * scale) {
        FAIL("trial " << trial << " coordinate " << i << ": " << analytic[i] << " vs " << numeric[i]);
      }
    }
    ++checked;
  }
  CHECK(checked == 10000);
}
