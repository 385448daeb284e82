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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dlogic/constraints.hpp"
#include "dlogic/logics.hpp"
#include "support.hpp"

using namespace dlogic;
using doctest::Approx;

namespace {

const TNorm kTNorms[] = {TNorm::Godel, TNorm::Lukasiewicz, TNorm::Yager, TNorm::Product};
const SNorm kSNorms[] = {SNorm::Godel, SNorm::Lukasiewicz, SNorm::Yager, SNorm::ProbabilisticSum};

double eval_fuzzy(const std::string& backend, const std::string& text, const std::vector<double>& out) {
  const LogicBackend b = make_backend(backend);
  ParseContext ctx;
  ctx.n_outputs = out.size();
  const Formula f = prepare(parse(text, ctx), b);
  return compile(f, b, Bindings<double>{{}, out, {}, {}}).truth;
}

}  // namespace

TEST_CASE("t-norm and s-norm values") {
  CHECK(tnorm(TNorm::Godel, 0.7, 0.6) == 0.6);
  CHECK(tnorm(TNorm::Lukasiewicz, 0.7, 0.6) == Approx(0.3));
  CHECK(tnorm(TNorm::Lukasiewicz, 0.3, 0.6) == 0.0);
  // 1 - sqrt(0.3^2 + 0.4^2)
  CHECK(tnorm(TNorm::Yager, 0.7, 0.6) == Approx(0.5));
  CHECK(tnorm(TNorm::Yager, 0.2, 0.3) == 0.0);
  CHECK(tnorm(TNorm::Product, 0.7, 0.6) == Approx(0.42));
  CHECK(snorm(SNorm::Godel, 0.3, 0.4) == 0.4);
  CHECK(snorm(SNorm::Lukasiewicz, 0.3, 0.4) == Approx(0.7));
  CHECK(snorm(SNorm::Lukasiewicz, 0.8, 0.4) == 1.0);
  CHECK(snorm(SNorm::Yager, 0.3, 0.4) == Approx(0.5));
  CHECK(snorm(SNorm::ProbabilisticSum, 0.3, 0.4) == Approx(0.58));
  CHECK(tnorm(TNorm::Yager, 1.0, 0.25, 1.0) == Approx(0.25));
}

TEST_CASE("implication values") {
  const double x = 0.7, y = 0.5;
  CHECK(implication(ImplicationKind::Godel, x, y) == 0.5);
  CHECK(implication(ImplicationKind::Godel, y, x) == 1.0);
  CHECK(implication(ImplicationKind::KleeneDienes, x, y) == 0.5);
  CHECK(implication(ImplicationKind::Lukasiewicz, x, y) == Approx(0.8));
  CHECK(implication(ImplicationKind::Yager, x, y) == Approx(std::pow(0.5, 0.7)));
  CHECK(implication(ImplicationKind::Goguen, x, y) == Approx(0.5 / 0.7));
  CHECK(implication(ImplicationKind::Reichenbach, x, y) == Approx(0.65));
  CHECK(implication(ImplicationKind::Yager, 0.0, 0.0) == 1.0);
}

TEST_CASE("property: t-norm axioms, s-norm duality") {
  testing::Gen g(17);
  for (int i = 0; i < 10000; ++i) {
    const double x = g.unit(), y = g.unit(), z = g.unit(), w = g.unit();
    for (TNorm t : kTNorms) {
      CHECK(tnorm(t, x, y) == Approx(tnorm(t, y, x)).epsilon(1e-12));
      CHECK(tnorm(t, tnorm(t, x, y), z) == Approx(tnorm(t, x, tnorm(t, y, z))).epsilon(1e-12).scale(1.0));
      CHECK(tnorm(t, x, 1.0) == Approx(x).epsilon(1e-12).scale(1.0));
      if (y <= w) CHECK(tnorm(t, x, y) <= tnorm(t, x, w) + 1e-12);
    }
    for (std::size_t k = 0; k < 4; ++k)
      CHECK(snorm(kSNorms[k], x, y) == Approx(1.0 - tnorm(kTNorms[k], 1.0 - x, 1.0 - y)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("sigmoidal transform endpoints") {
  for (double s : {1.0, 9.0, 20.0}) {
    CHECK(sigmoidal_transform(0.0, s) == Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(sigmoidal_transform(1.0, s) == Approx(1.0).epsilon(1e-12));
    double prev = -1.0;
    for (int k = 0; k <= 100; ++k) {
      const double v = sigmoidal_transform(k / 100.0, s);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("phi transform of Reichenbach") {
  testing::Gen g(8);
  for (int i = 0; i < 1000; ++i) {
    const double x = g.unit(), y = g.unit();
    CHECK(power_phi_transform(ImplicationKind::Reichenbach, x, y) ==
          Approx(std::sqrt(1.0 - x * x + x * x * y * y)).epsilon(1e-12));
  }
}

TEST_CASE("scale-invariant comparison") {
  CHECK(fuzzy_compare_le(21.0, 20.0, 0.05) == Approx(1.0 - 1.0 / 41.05).epsilon(1e-12));
  CHECK(fuzzy_compare_le(21.0, 20.0, 0.05) == Approx(0.975639).epsilon(1e-6));
  CHECK(fuzzy_compare_le(21000.0, 20000.0, 0.05) == Approx(0.975609).epsilon(1e-6));
  CHECK(fuzzy_compare_le(0.7, 0.5, 0.05) == Approx(0.84));
  CHECK(fuzzy_compare_le(0.5, 0.7, 0.05) == 1.0);
  testing::Gen g(4);
  for (int i = 0; i < 1000; ++i) {
    const double x = g.uniform(-5, 5), y = g.uniform(-5, 5), k = g.uniform(0.01, 1000);
    CHECK(fuzzy_compare_le(k * x, k * y, 0.0) == Approx(fuzzy_compare_le(x, y, 0.0)).epsilon(1e-12));
  }
}

TEST_CASE("DL2 atoms") {
  CHECK(dl2_atom(CmpOp::Le, 0.7, 0.5) == Approx(0.2));
  CHECK(dl2_atom(CmpOp::Le, 0.5, 0.7) == 0.0);
  CHECK(dl2_atom(CmpOp::Lt, 0.5, 0.5, 0.3) == 0.3);
  CHECK(dl2_atom(CmpOp::Ge, 0.5, 0.7) == Approx(0.2));
  CHECK(dl2_atom(CmpOp::Gt, 0.5, 0.5) == 1.0);
  CHECK(dl2_atom(CmpOp::Eq, 0.5, 0.7) == Approx(0.2));
  CHECK(dl2_atom(CmpOp::Ne, 0.5, 0.5) == 1.0);
  CHECK(dl2_atom(CmpOp::Ne, 0.5, 0.6) == 0.0);
}

TEST_CASE("backend registry") {
  const auto& names = backend_names();
  for (const char* n : {"dl2", "godel", "kd", "lk", "gg", "rc", "rc-s", "rc-phi", "yg", "tg", "tlk", "trc", "tyg"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  CHECK(make_backend("g").name == "godel");
  CHECK(make_backend("dl2").semantics == Semantics::Dl2);
  CHECK(make_backend("tlk").conjunction == TNorm::Lukasiewicz);
  CHECK(make_backend("rc-s").transform == TransformKind::Sigmoidal);
  try {
    make_backend("nope");
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("rc-phi") != std::string::npos);
  }
  LogicParams bad;
  bad.yager_p = 0.5;
  CHECK_THROWS_AS(make_backend("yg", bad), std::invalid_argument);
  bad = {};
  bad.xi = std::nan("");
  CHECK_THROWS_AS(make_backend("dl2", bad), std::invalid_argument);
}

TEST_CASE("compiled formulas") {
  CHECK(eval_fuzzy("rc", "out[0] <= 0.5", {0.7, 0.3}) == Approx(0.84));
  // Reichenbach of two comparisons: 1 - a + a*b with a = 1 (0.7 >= 0.5), b = 0.84
  CHECK(eval_fuzzy("rc", "out[0] >= 0.5 -> out[0] <= 0.5", {0.7, 0.3}) == Approx(0.84));
  // Product conjunction, probabilistic-sum disjunction
  CHECK(eval_fuzzy("kd", "out[0] <= 0.5 and out[0] <= 0.5", {0.7, 0.3}) == Approx(0.84 * 0.84));
  CHECK(eval_fuzzy("kd", "out[0] <= 0.5 or out[0] <= 0.5", {0.7, 0.3}) == Approx(0.84 + 0.84 - 0.84 * 0.84));
  CHECK(eval_fuzzy("tg", "out[0] <= 0.5 and out[1] <= 0.5", {0.7, 0.3}) == Approx(0.84));
  CHECK(eval_fuzzy("rc", "not out[0] <= 0.5", {0.7, 0.3}) == Approx(0.16));

  const LogicBackend dl2 = make_backend("dl2");
  const Formula f = parse("out[0] >= 0.5 -> out[1] >= 0.5");
  const std::vector<double> out{0.7, 0.3};
  const Bindings<double> env{{}, out, {}, {}};
  CHECK_THROWS_AS(compile(f, dl2, env), CompileError);
  // (out[0] < 0.5) or (out[1] >= 0.5): 0.2 * 0.2
  CHECK(compile(prepare(f, dl2), dl2, env).loss == Approx(0.04));
}

TEST_CASE("property: DL2 loss is zero exactly when the formula holds") {
  testing::Gen g(23);
  const LogicBackend dl2 = make_backend("dl2");
  int satisfied = 0;
  for (int i = 0; i < 10000; ++i) {
    const Formula f = testing::random_formula(g, 3, 1, 1 + static_cast<int>(g.index(4)));
    const auto out = testing::grid_values(g, 3);
    const auto in = testing::grid_values(g, 1);
    const Bindings<double> env{in, out, {}, {}};
    const double loss = compile(prepare(f, dl2), dl2, env).loss;
    const bool truth = eval_crisp(f, env);
    CHECK(loss >= 0.0);
    if ((loss == 0.0) != truth) FAIL(print(f) << " loss " << loss << " crisp " << truth);
    satisfied += truth;
  }
  CHECK(satisfied > 1000);
  CHECK(satisfied < 9000);
}

TEST_CASE("property: fuzzy truth stays in [0, 1]") {
  testing::Gen g(29);
  for (int i = 0; i < 2000; ++i) {
    const Formula f = testing::random_formula(g, 3, 0, 1 + static_cast<int>(g.index(4)));
    const auto out = g.simplex(3);
    for (const auto& name : backend_names()) {
      if (name == "dl2") continue;
      const LogicBackend b = make_backend(name);
      const double t = compile(prepare(f, b), b, Bindings<double>{{}, out, {}, {}}).truth;
      if (!(t >= -1e-12 && t <= 1.0 + 1e-12)) FAIL(name << ": " << print(f) << " -> " << t);
    }
  }
}

TEST_CASE("property: compiled gradients match finite differences") {
  testing::Gen g(31);
  const std::vector<LabelTriple> triples{{0, 1, 2}, {1, 3, 0}, {2, 0, 3}, {3, 2, 1}};
  const Formula csim = csim_formula(triples, 4);
  for (const auto& name : backend_names()) {
    const LogicBackend b = make_backend(name);
    const Formula f = prepare(csim, b);
    int checked = 0;
    for (int attempt = 0; attempt < 2000 && checked < 100; ++attempt) {
      const auto p = g.simplex(4);
      ad::Tape tape;
      std::vector<ad::Var> vars;
      for (double v : p) vars.push_back(tape.variable(v));
      const ad::Var loss = compile(f, b, Bindings<ad::Var>{{}, vars, {}, {}}).loss;
      if (tape.min_branch_margin() < 1e-3) continue;
      const Eigen::VectorXd analytic = tape.grad(loss).wrt(vars);
      auto value = [&](const Eigen::VectorXd& x) {
        const std::vector<double> out(x.data(), x.data() + x.size());
        return compile(f, b, Bindings<double>{{}, out, {}, {}}).loss;
      };
      const Eigen::VectorXd numeric = ad::finite_diff(value, Eigen::Map<const Eigen::VectorXd>(p.data(), 4));
      const double err = (analytic - numeric).norm() / std::max(1.0, numeric.norm());
      if (err > 1e-5) FAIL(name << ": relative error " << err);
      ++checked;
    }
    INFO(name);
    CHECK(checked >= 50);
  }
}
