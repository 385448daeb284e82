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

#include "dlogic/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <optional>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace dlogic {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw ConfigError(std::string(key) + ": expected a number, got '" + t + "'");
  return v;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  Int v{};
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw ConfigError(std::string(key) + ": expected an integer, got '" + t + "'");
  return v;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Tables {
  std::vector<LabelTriple> triples;
  std::vector<ClassGroup> groups;
};

Tables resolve_tables(const ExperimentConfig& config, std::size_t n_classes) {
  Tables t;
  std::string name = config.tables;
  if (name.empty()) {
    if (config.dataset == "synthetic")
      name = config.constraint == "group" ? "synthetic-groups" : "synthetic";
    else
      return t;
  }
  if (name.rfind("file:", 0) == 0) {
    const std::filesystem::path path = name.substr(5);
    if (config.constraint == "group")
      t.groups = load_class_groups(path);
    else
      t.triples = load_label_triples(path);
    return t;
  }
  auto table = builtin_tables(name, n_classes);
  if (auto* triples = std::get_if<std::vector<LabelTriple>>(&table))
    t.triples = std::move(*triples);
  else
    t.groups = std::get<std::vector<ClassGroup>>(std::move(table));
  return t;
}

void append_row(std::string& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  out += '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::logic_error("format_double: buffer too small");
  return std::string(buf, ptr);
}

ExperimentConfig synthetic_preset() {
  ExperimentConfig c;
  c.dataset = "synthetic";
  c.epochs = 50;
  c.batch_size = 256;
  c.learning_rate = 0.05;
  c.hidden = {64};
  c.synthetic = SyntheticSpec{};
  return c;
}

void apply_option(ExperimentConfig& c, std::string_view raw_key, std::string_view value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string v = trim(value);
  if (key == "dataset") c.dataset = v;
  else if (key == "backend" || key == "logic") c.backend = v;
  else if (key == "constraint") c.constraint = v;
  else if (key == "formula") c.formula = v;
  else if (key == "tables") c.tables = v;
  else if (key == "lambda") c.lambda = parse_double(key, v);
  else if (key == "epochs") c.epochs = parse_int<int>(key, v);
  else if (key == "batch_size") c.batch_size = parse_int<int>(key, v);
  else if (key == "seed") c.seed = parse_int<std::uint64_t>(key, v);
  else if (key == "lr" || key == "learning_rate") c.learning_rate = parse_double(key, v);
  else if (key == "momentum") c.momentum = parse_double(key, v);
  else if (key == "hidden") {
    c.hidden.clear();
    if (!v.empty())
      for (const auto& part : split(v, ',')) c.hidden.push_back(parse_int<std::size_t>(key, part));
  } else if (key == "eps_group") c.eps_group = parse_double(key, v);
  else if (key == "lipschitz") c.lipschitz = parse_double(key, v);
  else if (key == "xi") c.logic.xi = parse_double(key, v);
  else if (key == "yager_p") c.logic.yager_p = parse_double(key, v);
  else if (key == "sigmoidal_s") c.logic.sigmoidal_s = parse_double(key, v);
  else if (key == "comparison_eps") c.logic.comparison_eps = parse_double(key, v);
  else if (key == "subsample") c.subsample = parse_double(key, v);
  else if (key == "n_train") c.synthetic.n_train = parse_int<std::size_t>(key, v);
  else if (key == "n_test") c.synthetic.n_test = parse_int<std::size_t>(key, v);
  else if (key == "n_classes") c.synthetic.n_classes = parse_int<std::size_t>(key, v);
  else if (key == "dims") c.synthetic.dims = parse_int<std::size_t>(key, v);
  else if (key == "noise") c.synthetic.noise_frac = parse_double(key, v);
  else if (key == "radius") c.synthetic.radius = parse_double(key, v);
  else if (key == "spread") c.synthetic.spread = parse_double(key, v);
  else throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    try {
      apply_option(base, std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in, std::move(base));
}

void validate(const ExperimentConfig& c) {
  try {
    make_backend(c.backend, c.logic);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.constraint != "csim" && c.constraint != "group" && c.constraint != "lipschitz" && c.constraint != "custom")
    throw ConfigError("unknown constraint '" + c.constraint + "' (expected csim, group, lipschitz or custom)");
  if (c.constraint == "custom" && c.formula.empty()) throw ConfigError("constraint=custom needs a formula");
  if (c.dataset != "synthetic" && c.dataset.rfind("idx:", 0) != 0)
    throw ConfigError("unknown dataset '" + c.dataset + "' (expected synthetic or idx:<images>,<labels>,...)");
  if (!(c.lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (c.epochs < 1) throw ConfigError("epochs must be at least 1");
  if (c.batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (!(c.learning_rate > 0.0)) throw ConfigError("lr must be positive");
  if (!(c.momentum >= 0.0 && c.momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
  if (!(c.eps_group > 0.0 && c.eps_group < 0.5)) throw ConfigError("eps_group must lie in (0, 0.5)");
  if (!(c.lipschitz > 0.0)) throw ConfigError("lipschitz must be positive");
  if (!(c.subsample > 0.0 && c.subsample <= 1.0)) throw ConfigError("subsample must lie in (0, 1]");
  for (auto h : c.hidden)
    if (h == 0) throw ConfigError("hidden layer sizes must be positive");
}

Formula build_constraint(const ExperimentConfig& config, std::size_t n_classes) {
  if (config.constraint == "lipschitz") return lipschitz_formula(config.lipschitz);
  const Tables t = resolve_tables(config, n_classes);
  if (config.constraint == "csim") {
    if (t.triples.empty()) throw ConfigError("csim constraint needs label triples (set tables)");
    validate(t.triples, n_classes);
    return csim_formula(t.triples, n_classes);
  }
  if (config.constraint == "group") {
    if (t.groups.empty()) throw ConfigError("group constraint needs class groups (set tables)");
    validate(t.groups, n_classes);
    return group_formula(t.groups, config.eps_group);
  }
  ParseContext ctx = constraint_context(n_classes, t.triples, t.groups, config.eps_group);
  return parse(config.formula, ctx);
}

ExperimentSetup setup(const ExperimentConfig& config) {
  validate(config);
  Dataset train, test;
  if (config.dataset == "synthetic") {
    SyntheticSpec spec = config.synthetic;
    spec.seed = config.seed;
    auto data = gen_synthetic(spec);
    train = std::move(data.train);
    test = std::move(data.test);
  } else {
    const auto parts = split(std::string_view(config.dataset).substr(4), ',');
    if (parts.size() == 4) {
      train = load_idx(parts[0], parts[1]);
      test = load_idx(parts[2], parts[3]);
      test.split = Split::Test;
    } else if (parts.size() == 2) {
      Dataset all = load_idx(parts[0], parts[1]);
      const std::size_t n_test = all.size() / 5;
      std::vector<std::size_t> head(all.size() - n_test), tail(n_test);
      std::iota(head.begin(), head.end(), 0);
      std::iota(tail.begin(), tail.end(), all.size() - n_test);
      train = all.select(head);
      test = all.select(tail);
      test.split = Split::Test;
    } else {
      throw ConfigError("idx dataset needs 2 or 4 comma-separated paths");
    }
    const std::size_t n = std::max(train.n_classes, test.n_classes);
    train.n_classes = test.n_classes = n;
    if (train.dims() != test.dims()) throw ConfigError("train and test images differ in size");
  }
  if (config.subsample < 1.0) train = subsample(train, config.subsample, config.seed);
  if (train.size() == 0 || test.size() == 0) throw ExperimentError("empty train or test split");
  Formula f = build_constraint(config, train.n_classes);
  return {std::move(train), std::move(test), std::move(f)};
}

double prediction_accuracy(const Model& m, const Dataset& d) {
  if (d.size() == 0) return 0.0;
  const MatrixXd probs = m.forward_batch(d.features);
  std::size_t correct = 0;
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    Eigen::Index best = 0;
    probs.row(r).maxCoeff(&best);
    if (best == d.labels[static_cast<std::size_t>(r)]) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(d.size());
}

double constraint_accuracy(const Model& m, const Dataset& d, const Formula& f) {
  const std::size_t n = d.size();
  if (n == 0) return 0.0;
  const Formula g = expand(f);
  const RowMatrixXd probs = m.forward_batch(d.features);
  const RowMatrixXd inputs = d.features;
  const auto k = static_cast<std::size_t>(probs.cols());
  const auto dims = static_cast<std::size_t>(inputs.cols());
  auto out_row = [&](std::size_t r) { return std::span<const double>(probs.data() + r * k, k); };
  auto in_row = [&](std::size_t r) { return std::span<const double>(inputs.data() + r * dims, dims); };
  std::size_t satisfied = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t q = (r + 1) % n;
    Bindings<double> env{in_row(r), out_row(r), in_row(q), out_row(q)};
    if (eval_crisp(g, env)) ++satisfied;
  }
  return 100.0 * static_cast<double>(satisfied) / static_cast<double>(n);
}

std::vector<EpochReport> run(const ExperimentConfig& config) {
  const ExperimentSetup s = setup(config);
  const LogicBackend backend = make_backend(config.backend, config.logic);
  std::optional<LogicTerm> term;
  if (config.lambda > 0.0) term = make_logic_term(s.constraint, backend);

  std::vector<std::size_t> layers{s.train.dims()};
  layers.insert(layers.end(), config.hidden.begin(), config.hidden.end());
  layers.push_back(s.train.n_classes);
  Model model = Model::init(layers, config.seed);
  Optimizer opt{config.learning_rate, config.momentum, {}};

  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<std::size_t> order(s.train.size());
  std::iota(order.begin(), order.end(), 0);
  const auto batch_size = static_cast<std::size_t>(config.batch_size);

  std::vector<EpochReport> reports;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double ce_sum = 0.0, logic_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                         order.begin() + static_cast<std::ptrdiff_t>(end));
      const Dataset batch = s.train.select(idx);
      StepResult r;
      try {
        r = train_step(model, opt, batch.features, batch.labels, config.lambda, term ? &*term : nullptr);
      } catch (const NonFiniteLoss& e) {
        throw ExperimentError("epoch " + std::to_string(epoch) + ": " + e.what());
      }
      const auto w = static_cast<double>(end - start);
      ce_sum += r.cross_entropy * w;
      logic_sum += r.logical * w;
    }
    const auto n = static_cast<double>(order.size());
    reports.push_back({epoch, ce_sum / n, logic_sum / n, prediction_accuracy(model, s.test),
                       constraint_accuracy(model, s.test, s.constraint)});
  }
  return reports;
}

Selection select_result(std::span<const EpochReport> reports, std::size_t window, SelectRule rule) {
  if (reports.empty()) throw std::invalid_argument("select_result: no reports");
  if (window == 0) window = 1;
  const std::size_t first = reports.size() > window ? reports.size() - window : 0;
  Selection best;
  double best_score = -1.0;
  for (std::size_t i = first; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const double score = rule == SelectRule::Product ? r.test_p * r.test_c : r.test_p + r.test_c;
    if (score >= best_score) {
      best_score = score;
      best = {r.test_p, r.test_c, r.epoch};
    }
  }
  return best;
}

const std::vector<double>& default_lambda_grid() {
  static const std::vector<double> grid = {0, 0.2, 0.4, 0.6, 0.8, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  return grid;
}

SweepResult lambda_sweep(const ExperimentConfig& base, std::span<const double> grid, unsigned jobs, SelectRule rule,
                         std::size_t window) {
  if (grid.empty()) throw std::invalid_argument("lambda_sweep: empty grid");
  validate(base);
  SweepResult result;
  result.rows.resize(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        ExperimentConfig c = base;
        c.lambda = grid[i];
        const auto reports = run(c);
        result.rows[i] = {grid[i], select_result(reports, window, rule)};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(grid.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw ExperimentError("lambda=" + format_double(grid[i]) + ": " + e.what());
    }
  }
  double best_score = -1.0;
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& s = result.rows[i].selection;
    const double score = rule == SelectRule::Product ? s.p * s.c : s.p + s.c;
    if (score > best_score) {
      best_score = score;
      result.best = i;
    }
  }
  return result;
}

std::string format_report(std::span<const EpochReport> reports) {
  std::string out = "Epoch,Train-CE-Loss,Train-L-Loss,Test-P-Acc,Test-C-Acc\n";
  for (const auto& r : reports)
    append_row(out, {std::to_string(r.epoch), format_double(r.train_ce), format_double(r.train_logical),
                     format_double(r.test_p), format_double(r.test_c)});
  return out;
}

void write_report(std::span<const EpochReport> reports, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ExperimentError("cannot write report " + path.string());
  out << format_report(reports);
  if (!out) throw ExperimentError("error writing report " + path.string());
}

std::string format_sweep(const SweepResult& result) {
  std::string out = "Lambda,P,C,Epoch\n";
  for (const auto& row : result.rows)
    append_row(out, {format_double(row.lambda), format_double(row.selection.p), format_double(row.selection.c),
                     std::to_string(row.selection.epoch)});
  append_row(out, {"best", format_double(result.best_lambda())});
  return out;
}

}  // namespace dlogic
