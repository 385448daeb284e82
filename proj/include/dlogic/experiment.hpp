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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dlogic/constraints.hpp"
#include "dlogic/data.hpp"
#include "dlogic/formula.hpp"
#include "dlogic/logics.hpp"
#include "dlogic/network.hpp"

namespace dlogic {

/// Everything that determines one training run.
struct ExperimentConfig {
  /// "synthetic" or "idx:<images>,<labels>[,<test images>,<test labels>]".
  std::string dataset = "synthetic";
  std::string backend = "dl2";
  /// csim, group, lipschitz, or custom (uses `formula`).
  std::string constraint = "csim";
  /// DSL text for constraint=custom.
  std::string formula;
  /// Constraint tables: empty for the dataset default, a built-in name, or
  /// "file:<path>".
  std::string tables;
  double lambda = 0.0;
  int epochs = 50;
  int batch_size = 256;
  std::uint64_t seed = 0;
  double learning_rate = 0.05;
  double momentum = 0.0;
  std::vector<std::size_t> hidden = {64};
  double eps_group = 0.05;
  double lipschitz = 1.0;
  LogicParams logic;
  /// Fraction of the training split kept (stratified).
  double subsample = 1.0;
  SyntheticSpec synthetic;
};

/// The synthetic preset used by the acceptance experiments: 10 classes,
/// 5000/1000 samples, 20 dimensions, 10% label noise, 50 epochs, MLP
/// [20, 64, 10], learning rate 0.05, batch 256.
ExperimentConfig synthetic_preset();

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sets one key (the config file keys: dataset, backend, constraint,
/// formula, tables, lambda, epochs, batch_size, seed, lr, momentum, hidden,
/// eps_group, lipschitz, xi, yager_p, sigmoidal_s, comparison_eps,
/// subsample, n_train, n_test, n_classes, dims, noise, radius, spread). Dashes in keys are
/// accepted as underscores.
void apply_option(ExperimentConfig& config, std::string_view key, std::string_view value);

/// key=value lines; '#' starts a comment.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Checks ranges and names; throws ConfigError.
void validate(const ExperimentConfig& config);

struct EpochReport {
  int epoch = 0;
  double train_ce = 0.0;
  double train_logical = 0.0;
  /// Test prediction accuracy in percent.
  double test_p = 0.0;
  /// Test constraint accuracy in percent.
  double test_c = 0.0;

  friend bool operator==(const EpochReport&, const EpochReport&) = default;
};

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Train and test splits with the constraint compiled for them.
struct ExperimentSetup {
  Dataset train;
  Dataset test;
  Formula constraint;
};

ExperimentSetup setup(const ExperimentConfig& config);

/// Builds the configured constraint for `n_classes` classes.
Formula build_constraint(const ExperimentConfig& config, std::size_t n_classes);

/// Percentage of samples whose argmax matches the label.
double prediction_accuracy(const Model& m, const Dataset& d);

/// Percentage of samples on which `f` holds crisply for the model's
/// probabilities. Formulas with dist(...) pair sample i with sample
/// (i + 1) mod n.
double constraint_accuracy(const Model& m, const Dataset& d, const Formula& f);

/// Trains for config.epochs epochs and reports after each. With lambda = 0
/// no logical term is attached (the run is the cross-entropy baseline and
/// reports a logical loss of 0), so every backend yields the same reports.
std::vector<EpochReport> run(const ExperimentConfig& config);

enum class SelectRule { Product, Sum };

struct Selection {
  double p = 0.0;
  double c = 0.0;
  int epoch = 0;
};

/// Among the last `window` reports (all of them if fewer), the one that
/// maximizes P * C (or P + C); ties go to the later epoch.
Selection select_result(std::span<const EpochReport> reports, std::size_t window = 10,
                        SelectRule rule = SelectRule::Product);

struct SweepRow {
  double lambda = 0.0;
  Selection selection;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::size_t best = 0;

  double best_lambda() const { return rows.at(best).lambda; }
};

/// 0, 0.2, 0.4, 0.6, 0.8, 1, 2, ..., 10.
const std::vector<double>& default_lambda_grid();

/// One run per lambda with otherwise identical settings. `jobs` > 1 runs
/// them on that many threads; results do not depend on `jobs`. The best row
/// maximizes the selection score; ties go to the earlier grid entry.
SweepResult lambda_sweep(const ExperimentConfig& base, std::span<const double> grid, unsigned jobs = 1,
                         SelectRule rule = SelectRule::Product, std::size_t window = 10);

/// Header `Epoch,Train-CE-Loss,Train-L-Loss,Test-P-Acc,Test-C-Acc`, one row
/// per report, shortest round-trip decimal formatting.
std::string format_report(std::span<const EpochReport> reports);
void write_report(std::span<const EpochReport> reports, const std::filesystem::path& path);

/// `Lambda,P,C,Epoch` rows followed by `best,<lambda>`.
std::string format_sweep(const SweepResult& result);

/// Shortest decimal representation that reads back to `v`.
std::string format_double(double v);

}  // namespace dlogic
