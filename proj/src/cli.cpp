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

#include "dlogic/cli.hpp"

#include <charconv>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dlogic/constraints.hpp"
#include "dlogic/experiment.hpp"
#include "dlogic/formula.hpp"
#include "dlogic/logics.hpp"

namespace dlogic {

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<double> parse_list(const std::string& flag, const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(start, end - start);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size())
      throw UsageError(flag + ": '" + item + "' is not a number");
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

std::string joined_backends() {
  std::string s;
  for (const auto& n : backend_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

// Experiment flags shared by train and sweep; values are applied through
// apply_option only when given, so they override --config.
struct ExperimentFlags {
  std::string config;
  std::map<std::string, std::string> values;

  void add(CLI::App* app) {
    app->add_option("--config", config, "key=value config file (flags override it)");
    const std::pair<const char*, const char*> flags[] = {
        {"logic", "logic backend"},
        {"constraint", "csim | group | lipschitz | custom"},
        {"formula", "constraint formula for --constraint custom"},
        {"tables", "constraint tables: fmnist | cifar10 | gtsrb | synthetic | synthetic-groups | file:<path>"},
        {"lambda", "weight of the logical loss"},
        {"epochs", "training epochs"},
        {"batch-size", "minibatch size"},
        {"seed", "random seed"},
        {"lr", "learning rate"},
        {"momentum", "SGD momentum"},
        {"hidden", "hidden layer sizes, comma separated"},
        {"dataset", "synthetic | idx:<img>,<lbl>[,<test img>,<test lbl>]"},
        {"eps-group", "group constraint threshold"},
        {"lipschitz", "Lipschitz constant"},
        {"xi", "DL2 inequality constant"},
        {"yager-p", "Yager exponent"},
        {"sigmoidal-s", "sigmoidal steepness"},
        {"subsample", "fraction of training data kept"},
        {"n-train", "synthetic training samples"},
        {"n-test", "synthetic test samples"},
        {"n-classes", "synthetic classes"},
        {"dims", "synthetic feature dimensions"},
        {"noise", "synthetic label-noise fraction"},
        {"radius", "synthetic ring radius"},
        {"spread", "synthetic blob standard deviation"},
    };
    for (const auto& [name, help] : flags) app->add_option(std::string("--") + name, values[name], help);
  }

  ExperimentConfig resolve(CLI::App* app) const {
    ExperimentConfig c = synthetic_preset();
    if (!config.empty()) c = load_config(config, c);
    for (const auto& [name, value] : values)
      if (app->count("--" + name) > 0) apply_option(c, name, value);
    validate(c);
    return c;
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Differentiable logics: compile constraints to losses and train with them"};
  app.footer("Backends: " + joined_backends());
  app.require_subcommand(1, 1);

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a formula on given outputs and inputs");
  std::string logic = "dl2", formula_text, out_text, in_text, tables;
  LogicParams params;
  double eps_group = 0.05;
  eval->add_option("--logic", logic, "logic backend (" + joined_backends() + ")");
  eval->add_option("--formula", formula_text, "constraint in the formula language")->required();
  eval->add_option("--out", out_text, "network outputs, comma separated")->required();
  eval->add_option("--in", in_text, "network inputs, comma separated");
  eval->add_option("--tables", tables, "table set bound to Labels/Groups");
  eval->add_option("--eps-group", eps_group, "value of the constant eps");
  eval->add_option("--xi", params.xi, "DL2 inequality constant");
  eval->add_option("--yager-p", params.yager_p, "Yager exponent");
  eval->add_option("--sigmoidal-s", params.sigmoidal_s, "sigmoidal steepness");

  // train
  auto* train = app.add_subcommand("train", "train a classifier and write a per-epoch CSV report");
  ExperimentFlags train_flags;
  train_flags.add(train);
  std::string report;
  train->add_option("--report", report, "CSV path (default: standard output)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "train once per lambda and select the best");
  ExperimentFlags sweep_flags;
  sweep_flags.add(sweep);
  std::string grid_text, select = "product";
  unsigned jobs = 1;
  std::size_t window = 10;
  sweep->add_option("--sweep", grid_text, "lambda grid, comma separated (default: 0,0.2,...,1,2,...,10)");
  sweep->add_option("--select", select, "product | sum")->check(CLI::IsMember({"product", "sum"}));
  sweep->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  sweep->add_option("--window", window, "selection window in epochs")->check(CLI::PositiveNumber);

  // tables
  auto* tables_cmd = app.add_subcommand("tables", "print a built-in constraint table");
  std::string table_name = "fmnist";
  std::size_t n_classes = 10;
  tables_cmd->add_option("name", table_name, "fmnist | cifar10 | gtsrb | synthetic | synthetic-groups");
  tables_cmd->add_option("--classes", n_classes, "class count for the synthetic tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*eval) {
      const LogicBackend backend = make_backend(logic, params);
      const std::vector<double> outputs = parse_list("--out", out_text);
      const std::vector<double> inputs = parse_list("--in", in_text);
      std::vector<LabelTriple> triples;
      std::vector<ClassGroup> groups;
      if (!tables.empty()) {
        auto t = builtin_tables(tables, outputs.size());
        if (auto* tr = std::get_if<std::vector<LabelTriple>>(&t))
          triples = *tr;
        else
          groups = std::get<std::vector<ClassGroup>>(t);
      }
      ParseContext ctx = constraint_context(outputs.size(), triples, groups, eps_group);
      ctx.n_inputs = inputs.size();
      const Formula f = parse(formula_text, ctx);
      const Bindings<double> env{inputs, outputs, {}, {}};
      const auto value = compile(prepare(f, backend), backend, env);
      out << "backend " << backend.name << '\n';
      if (backend.semantics == Semantics::Fuzzy) out << "truth " << format_double(value.truth) << '\n';
      out << "loss " << format_double(value.loss) << '\n';
      out << "crisp " << (eval_crisp(expand(f), env) ? "true" : "false") << '\n';
    } else if (*train) {
      const ExperimentConfig c = train_flags.resolve(train);
      const auto reports = run(c);
      if (report.empty())
        out << format_report(reports);
      else
        write_report(reports, report);
    } else if (*sweep) {
      const ExperimentConfig c = sweep_flags.resolve(sweep);
      const std::vector<double> grid = grid_text.empty() ? default_lambda_grid() : parse_list("--sweep", grid_text);
      if (grid.empty()) throw UsageError("--sweep: empty grid");
      const auto rule = select == "sum" ? SelectRule::Sum : SelectRule::Product;
      out << format_sweep(lambda_sweep(c, grid, jobs, rule, window));
    } else if (*tables_cmd) {
      const auto t = builtin_tables(table_name, n_classes);
      const std::vector<std::string>* names = nullptr;
      if (table_name != "synthetic" && table_name != "synthetic-groups") names = &class_names(table_name);
      auto label = [&](std::size_t i) { return names ? std::to_string(i) + " " + (*names)[i] : std::to_string(i); };
      if (const auto* tr = std::get_if<std::vector<LabelTriple>>(&t)) {
        for (const auto& r : *tr) out << label(r.l1) << " | " << label(r.l2) << " | " << label(r.l3) << '\n';
      } else {
        for (const auto& g : std::get<std::vector<ClassGroup>>(t)) {
          out << g.name << ':';
          for (auto m : g.members) out << ' ' << m;
          out << '\n';
          if (names)
            for (auto m : g.members) out << "  " << label(m) << '\n';
        }
      }
    }
  } catch (const ParseError& e) {
    err << "error: formula: " << e.what() << " (at offset " << e.position() << ")\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace dlogic
