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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dlogic/experiment.hpp"

using namespace dlogic;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c = synthetic_preset();
  c.synthetic.n_train = 300;
  c.synthetic.n_test = 100;
  c.epochs = 3;
  c.batch_size = 64;
  c.hidden = {16};
  return c;
}

std::vector<EpochReport> reports_from(const std::vector<std::pair<double, double>>& pc) {
  std::vector<EpochReport> out;
  int e = 1;
  for (const auto& [p, c] : pc) out.push_back({e++, 0.0, 0.0, p, c});
  return out;
}

}  // namespace

TEST_CASE("config files") {
  std::istringstream in(
      "# a comment\n"
      "dataset = synthetic\n"
      "backend=rc\n"
      "constraint = group   # trailing\n"
      "lambda = 0.8\n"
      "epochs = 7\n"
      "batch_size = 32\n"
      "seed = 12\n"
      "lr = 0.1\n"
      "eps_group = 0.1\n"
      "xi = 2\n"
      "yager_p = 3\n"
      "sigmoidal_s = 5\n"
      "hidden = 8, 4\n");
  const ExperimentConfig c = parse_config(in);
  CHECK(c.backend == "rc");
  CHECK(c.constraint == "group");
  CHECK(c.lambda == 0.8);
  CHECK(c.epochs == 7);
  CHECK(c.batch_size == 32);
  CHECK(c.seed == 12);
  CHECK(c.learning_rate == 0.1);
  CHECK(c.eps_group == 0.1);
  CHECK(c.logic.xi == 2.0);
  CHECK(c.logic.yager_p == 3.0);
  CHECK(c.logic.sigmoidal_s == 5.0);
  CHECK(c.hidden == std::vector<std::size_t>{8, 4});
  CHECK_NOTHROW(validate(c));

  std::istringstream unknown("colour = blue\n");
  CHECK_THROWS_AS(parse_config(unknown), ConfigError);
  std::istringstream malformed("lambda 3\n");
  CHECK_THROWS_AS(parse_config(malformed), ConfigError);
  std::istringstream not_a_number("lambda = lots\n");
  CHECK_THROWS_AS(parse_config(not_a_number), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/dlogic.cfg"), ConfigError);
}

TEST_CASE("config validation") {
  ExperimentConfig c = small_config();
  c.backend = "nope";
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = small_config();
  c.constraint = "robustness";
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = small_config();
  c.lambda = -1.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = small_config();
  c.eps_group = 0.5;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = small_config();
  c.dataset = "mnist";
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("selection over the last epochs") {
  // Products over the last three epochs: 4000, 4200, 3000.
  auto r = reports_from({{90, 90}, {80, 50}, {70, 60}, {75, 40}});
  Selection s = select_result(r, 3);
  CHECK(s.epoch == 3);
  CHECK(s.p == 70);
  CHECK(s.c == 60);
  // The first epoch (8100) is outside the window of 3 but inside a window of 4.
  CHECK(select_result(r, 4).epoch == 1);
  // Windows larger than the run use every report.
  CHECK(select_result(r, 10).epoch == 1);
  // Sum rule: 80+50 = 130 = 70+60; the later epoch wins the tie.
  CHECK(select_result(r, 3, SelectRule::Sum).epoch == 3);
  // Product ties also go to the later epoch.
  auto tie = reports_from({{40, 50}, {50, 40}, {10, 10}});
  CHECK(select_result(tie, 10).epoch == 2);
  CHECK_THROWS(select_result(std::vector<EpochReport>{}, 10));
}

TEST_CASE("default lambda grid") {
  const auto& g = default_lambda_grid();
  REQUIRE(g.size() == 15);
  CHECK(g.front() == 0.0);
  CHECK(g[4] == 0.8);
  CHECK(g[5] == 1.0);
  CHECK(g.back() == 10.0);
}

TEST_CASE("report formatting") {
  const std::vector<EpochReport> r{{1, 2.5, 0.125, 50.0, 12.3}, {2, 0.1, 0.0, 100.0, 0.0}};
  CHECK(format_report(r) ==
        "Epoch,Train-CE-Loss,Train-L-Loss,Test-P-Acc,Test-C-Acc\n"
        "1,2.5,0.125,50,12.3\n"
        "2,0.1,0,100,0\n");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  SweepResult s;
  s.rows = {{0.0, {50, 10, 3}}, {0.2, {49, 30, 2}}};
  s.best = 1;
  CHECK(format_sweep(s) == "Lambda,P,C,Epoch\n0,50,10,3\n0.2,49,30,2\nbest,0.2\n");
}

TEST_CASE("accuracy measures") {
  ExperimentConfig c = small_config();
  const ExperimentSetup s = setup(c);
  // A zero model predicts uniform probabilities; argmax is class 0.
  Model zero({s.test.dims(), 10});
  CHECK(prediction_accuracy(zero, s.test) == doctest::Approx(10.0));
  // Uniform outputs: out[a] >= 0.1 holds, and out[b] >= out[c] holds with equality.
  CHECK(constraint_accuracy(zero, s.test, s.constraint) == 100.0);
}

TEST_CASE("runs are deterministic and baseline runs ignore the backend") {
  ExperimentConfig c = small_config();
  const auto a = run(c);
  REQUIRE(a.size() == 3);
  CHECK(a == run(c));
  for (const auto& r : a) CHECK(r.train_logical == 0.0);
  c.backend = "rc";
  CHECK(format_report(run(c)) == format_report(a));
  c.lambda = 0.5;
  const auto with_logic = run(c);
  CHECK(with_logic[0].train_logical > 0.0);
  CHECK(format_report(with_logic) != format_report(a));
  c.seed = 9;
  CHECK(format_report(run(c)) != format_report(with_logic));
}

TEST_CASE("group and Lipschitz constraints train") {
  ExperimentConfig c = small_config();
  c.constraint = "group";
  c.backend = "dl2";
  c.lambda = 0.5;
  CHECK(run(c).size() == 3);
  c.constraint = "lipschitz";
  c.lipschitz = 0.1;
  c.backend = "lk";
  CHECK(run(c).back().train_logical >= 0.0);
  c.constraint = "custom";
  c.formula = "out[0] <= 0.5";
  CHECK(run(c).size() == 3);
  c.formula = "out[0] <= ";
  CHECK_THROWS_AS(run(c), ParseError);
}

TEST_CASE("sweeps do not depend on the job count") {
  ExperimentConfig c = small_config();
  c.backend = "rc";
  const std::vector<double> grid{0.0, 0.4, 2.0};
  const SweepResult one = lambda_sweep(c, grid, 1);
  const SweepResult three = lambda_sweep(c, grid, 3);
  CHECK(format_sweep(one) == format_sweep(three));
  REQUIRE(one.rows.size() == 3);
  CHECK(one.rows[1].lambda == 0.4);
  // The best row maximizes P * C.
  for (const auto& row : one.rows)
    CHECK(row.selection.p * row.selection.c <= one.rows[one.best].selection.p * one.rows[one.best].selection.c);
  // A single-value grid selects that value.
  const std::vector<double> zero{0.0};
  CHECK(lambda_sweep(c, zero).best_lambda() == 0.0);
}

TEST_CASE("reports are written byte for byte") {
  ExperimentConfig c = small_config();
  const auto r = run(c);
  const auto path = std::filesystem::temp_directory_path() / "dlogic_report.csv";
  write_report(r, path);
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == format_report(r));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_report(r, "/nonexistent/dir/report.csv"), ExperimentError);
}
