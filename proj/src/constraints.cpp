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

#include "dlogic/constraints.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dlogic {

namespace {

const std::vector<std::string> kFashionMnist = {"T-shirt/top", "Trouser", "Pullover", "Dress", "Coat",
                                                "Sandal",      "Shirt",   "Sneaker",  "Bag",   "Ankle boot"};

const std::vector<std::string> kCifar10 = {"airplane", "automobile", "bird",  "cat",  "deer",
                                           "dog",      "frog",       "horse", "ship", "truck"};

// Standard 43-class GTSRB ordering.
const std::vector<std::string> kGtsrb = {
    "limit 20km/h",
    "limit 30km/h",
    "limit 50km/h",
    "limit 60km/h",
    "limit 70km/h",
    "limit 80km/h",
    "end of limit 80km/h",
    "limit 100km/h",
    "limit 120km/h",
    "no passing",
    "no passing for trucks",
    "right-of-way at next intersection",
    "priority road",
    "yield",
    "stop",
    "no way",
    "no trucks",
    "no way one-way",
    "caution general",
    "caution curve left",
    "caution curve right",
    "caution curvy",
    "caution bumps",
    "caution slippery",
    "caution narrow road",
    "road work",
    "traffic signals",
    "pedestrians",
    "children crossing",
    "bicycles crossing",
    "beware of ice/snow",
    "wild animals crossing",
    "end of all limits",
    "turn right ahead",
    "turn left ahead",
    "ahead only",
    "go straight or right",
    "go straight or left",
    "keep right",
    "keep left",
    "roundabout",
    "end of no passing",
    "end of no passing for trucks",
};

std::size_t class_index(const std::vector<std::string>& names, std::string_view name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::logic_error("unknown class name " + std::string(name));
  return static_cast<std::size_t>(it - names.begin());
}

std::vector<LabelTriple> triples_by_name(const std::vector<std::string>& names,
                                         std::initializer_list<std::array<std::string_view, 3>> rows) {
  std::vector<LabelTriple> out;
  for (const auto& r : rows) out.push_back({class_index(names, r[0]), class_index(names, r[1]), class_index(names, r[2])});
  return out;
}

ClassGroup group_by_name(const std::vector<std::string>& names, std::string name,
                         std::initializer_list<std::string_view> members) {
  ClassGroup g{std::move(name), {}};
  for (auto m : members) g.members.push_back(class_index(names, m));
  return g;
}

std::vector<Binding> triple_items(const std::vector<LabelTriple>& labels) {
  std::vector<Binding> items;
  for (const auto& t : labels) items.push_back({t.l1, t.l2, t.l3});
  return items;
}

std::vector<Binding> group_items(const std::vector<ClassGroup>& groups) {
  std::vector<Binding> items;
  for (const auto& g : groups) items.push_back(g.members);
  return items;
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

}  // namespace

void validate(const std::vector<LabelTriple>& labels, std::size_t n_classes) {
  if (labels.empty()) throw std::invalid_argument("label triples: empty list");
  for (const auto& t : labels) {
    if (t.l1 >= n_classes || t.l2 >= n_classes || t.l3 >= n_classes)
      throw std::invalid_argument("label triple (" + std::to_string(t.l1) + ", " + std::to_string(t.l2) + ", " +
                                  std::to_string(t.l3) + ") out of range for " + std::to_string(n_classes) +
                                  " classes");
    if (t.l1 == t.l2 || t.l1 == t.l3 || t.l2 == t.l3)
      throw std::invalid_argument("label triple (" + std::to_string(t.l1) + ", " + std::to_string(t.l2) + ", " +
                                  std::to_string(t.l3) + ") has repeated classes");
  }
}

void validate(const std::vector<ClassGroup>& groups, std::size_t n_classes) {
  if (groups.empty()) throw std::invalid_argument("class groups: empty list");
  std::set<std::size_t> seen;
  for (const auto& g : groups) {
    if (g.members.empty()) throw std::invalid_argument("class group '" + g.name + "' is empty");
    for (auto m : g.members) {
      if (m >= n_classes)
        throw std::invalid_argument("class group '" + g.name + "': class " + std::to_string(m) + " out of range");
      if (!seen.insert(m).second)
        throw std::invalid_argument("class group '" + g.name + "': class " + std::to_string(m) +
                                    " appears more than once");
    }
  }
}

Formula csim_formula(const std::vector<LabelTriple>& labels, std::size_t n_classes) {
  if (n_classes == 0) throw std::invalid_argument("csim: class count must be positive");
  validate(labels, n_classes);
  const Formula body =
      Formula::implies(Formula::cmp(CmpOp::Ge, Expr::output(std::string("a")),
                                    Expr::constant(1.0 / static_cast<double>(n_classes))),
                       Formula::cmp(CmpOp::Ge, Expr::output(std::string("b")), Expr::output(std::string("c"))));
  return Formula::forall({"a", "b", "c"}, BindingSet{"Labels", triple_items(labels)}, body);
}

Formula group_formula(const std::vector<ClassGroup>& groups, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("group: eps must lie in (0, 0.5)");
  if (groups.empty()) throw std::invalid_argument("group: empty group list");
  std::size_t max_class = 0;
  for (const auto& g : groups)
    for (auto m : g.members) max_class = std::max(max_class, m);
  validate(groups, max_class + 1);
  const Formula body = Formula::disj(Formula::cmp(CmpOp::Le, Expr::group_sum("g"), Expr::constant(eps)),
                                     Formula::cmp(CmpOp::Ge, Expr::group_sum("g"), Expr::constant(1.0 - eps)));
  return Formula::forall({"g"}, BindingSet{"Groups", group_items(groups)}, body);
}

Formula lipschitz_formula(double lipschitz) {
  if (!(lipschitz > 0.0)) throw std::invalid_argument("lipschitz: constant must be positive");
  return Formula::cmp(CmpOp::Le, Expr::norm2_diff(VectorSource::Outputs),
                      Expr::mul(Expr::constant(lipschitz), Expr::norm2_diff(VectorSource::Inputs)));
}

std::vector<LabelTriple> synthetic_triples(std::size_t n_classes) {
  if (n_classes < 3) throw std::invalid_argument("synthetic triples need at least three classes");
  std::size_t step = std::max<std::size_t>(1, (3 * n_classes + 5) / 10);
  if (2 * step == n_classes) --step;
  std::vector<LabelTriple> out;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const std::size_t x = (c + step) % n_classes, y = (c + n_classes - step) % n_classes;
    out.push_back({c, std::min(x, y), std::max(x, y)});
  }
  return out;
}

std::vector<ClassGroup> synthetic_groups(std::size_t n_classes) {
  if (n_classes < 3) throw std::invalid_argument("synthetic groups need at least three classes");
  std::vector<ClassGroup> out;
  for (std::size_t start = 0; start + 3 <= n_classes; start += 3)
    out.push_back({"group" + std::to_string(out.size()), {start, start + 1, start + 2}});
  return out;
}

const std::vector<std::string>& class_names(std::string_view dataset) {
  if (dataset == "fmnist") return kFashionMnist;
  if (dataset == "cifar10") return kCifar10;
  if (dataset == "gtsrb") return kGtsrb;
  throw std::invalid_argument("no class names for dataset '" + std::string(dataset) + "'");
}

ConstraintTable builtin_tables(std::string_view dataset, std::size_t n_classes) {
  if (dataset == "fmnist") {
    return triples_by_name(kFashionMnist, {
                                              {"T-shirt/top", "Shirt", "Ankle boot"},
                                              {"Trouser", "Dress", "Bag"},
                                              {"Pullover", "Shirt", "Sandal"},
                                              {"Dress", "Coat", "Bag"},
                                              {"Coat", "Pullover", "Shirt"},
                                              {"Sandal", "Sneaker", "Dress"},
                                              {"Shirt", "Pullover", "Sneaker"},
                                              {"Sneaker", "Sandal", "Trouser"},
                                              {"Bag", "Sandal", "Dress"},
                                              {"Ankle boot", "Sneaker", "T-shirt/top"},
                                          });
  }
  if (dataset == "cifar10") {
    return triples_by_name(kCifar10, {
                                         {"airplane", "ship", "dog"},
                                         {"automobile", "truck", "cat"},
                                         {"bird", "airplane", "dog"},
                                         {"cat", "dog", "frog"},
                                         {"deer", "horse", "truck"},
                                         {"dog", "cat", "bird"},
                                         {"frog", "ship", "truck"},
                                         {"horse", "deer", "airplane"},
                                         {"ship", "airplane", "deer"},
                                         {"truck", "automobile", "airplane"},
                                     });
  }
  if (dataset == "gtsrb") {
    return std::vector<ClassGroup>{
        group_by_name(kGtsrb, "speed limits",
                      {"limit 20km/h", "limit 30km/h", "limit 50km/h", "limit 60km/h", "limit 70km/h", "limit 80km/h",
                       "end of limit 80km/h", "limit 100km/h", "limit 120km/h"}),
        group_by_name(kGtsrb, "prohibitions",
                      {"no passing", "no passing for trucks", "no way", "no way one-way", "end of no passing",
                       "end of no passing for trucks"}),
        group_by_name(kGtsrb, "mandatory actions",
                      {"turn right ahead", "turn left ahead", "ahead only", "go straight or right",
                       "go straight or left", "keep right", "keep left", "roundabout"}),
        group_by_name(kGtsrb, "warnings",
                      {"caution general", "caution curve left", "caution curve right", "caution curvy",
                       "caution bumps", "caution slippery", "caution narrow road", "road work", "pedestrians",
                       "children crossing", "wild animals crossing"}),
    };
  }
  if (dataset == "synthetic") return synthetic_triples(n_classes);
  if (dataset == "synthetic-groups") return synthetic_groups(n_classes);
  throw std::invalid_argument("unknown table set '" + std::string(dataset) +
                              "' (valid: fmnist, cifar10, gtsrb, synthetic, synthetic-groups)");
}

std::vector<LabelTriple> load_label_triples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<LabelTriple> out;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    std::istringstream fields(strip_comment(line));
    long long a, b, c;
    if (!(fields >> a)) continue;
    std::string rest;
    if (!(fields >> b >> c) || (fields >> rest) || a < 0 || b < 0 || c < 0)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected three class indices");
    out.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(b), static_cast<std::size_t>(c)});
  }
  if (out.empty()) throw std::runtime_error(path.string() + ": no triples");
  return out;
}

std::vector<ClassGroup> load_class_groups(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<ClassGroup> out;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    const std::string body = strip_comment(line);
    if (body.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = body.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected '<name>: <members>'");
    ClassGroup g;
    g.name = body.substr(0, colon);
    g.name.erase(0, g.name.find_first_not_of(" \t"));
    g.name.erase(g.name.find_last_not_of(" \t") + 1);
    std::istringstream fields(body.substr(colon + 1));
    long long m;
    while (fields >> m) {
      if (m < 0) throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": negative class index");
      g.members.push_back(static_cast<std::size_t>(m));
    }
    if (!fields.eof())
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": malformed class index");
    out.push_back(std::move(g));
  }
  if (out.empty()) throw std::runtime_error(path.string() + ": no groups");
  return out;
}

ParseContext constraint_context(std::size_t n_classes, const std::vector<LabelTriple>& labels,
                                const std::vector<ClassGroup>& groups, double eps) {
  ParseContext ctx;
  ctx.n_outputs = n_classes;
  if (!labels.empty()) ctx.sets["Labels"] = triple_items(labels);
  if (!groups.empty()) ctx.sets["Groups"] = group_items(groups);
  ctx.constants["eps"] = eps;
  return ctx;
}

}  // namespace dlogic
