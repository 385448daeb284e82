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

#include "dlogic/logics.hpp"

#include <algorithm>

namespace dlogic {

std::string_view to_string(TNorm t) {
  switch (t) {
    case TNorm::Godel: return "godel";
    case TNorm::Lukasiewicz: return "lukasiewicz";
    case TNorm::Yager: return "yager";
    case TNorm::Product: return "product";
  }
  return "?";
}

std::string_view to_string(SNorm s) {
  switch (s) {
    case SNorm::Godel: return "godel";
    case SNorm::Lukasiewicz: return "lukasiewicz";
    case SNorm::Yager: return "yager";
    case SNorm::ProbabilisticSum: return "probabilistic-sum";
  }
  return "?";
}

std::string_view to_string(ImplicationKind i) {
  switch (i) {
    case ImplicationKind::Godel: return "godel";
    case ImplicationKind::KleeneDienes: return "kleene-dienes";
    case ImplicationKind::Lukasiewicz: return "lukasiewicz";
    case ImplicationKind::Yager: return "yager";
    case ImplicationKind::Goguen: return "goguen";
    case ImplicationKind::Reichenbach: return "reichenbach";
  }
  return "?";
}

namespace {

struct Entry {
  std::string_view name;
  Semantics semantics;
  TNorm conjunction;
  std::optional<ImplicationKind> implication;
  TransformKind transform;
};

// Implication-study backends conjoin with the product t-norm; the
// conjunction-study backends (t*) pair each t-norm with its own implication.
// Every fuzzy backend disjoins with the probabilistic sum.
constexpr Entry kRegistry[] = {
    {"dl2", Semantics::Dl2, TNorm::Product, std::nullopt, TransformKind::None},
    {"godel", Semantics::Fuzzy, TNorm::Product, ImplicationKind::Godel, TransformKind::None},
    {"kd", Semantics::Fuzzy, TNorm::Product, ImplicationKind::KleeneDienes, TransformKind::None},
    {"lk", Semantics::Fuzzy, TNorm::Product, ImplicationKind::Lukasiewicz, TransformKind::None},
    {"gg", Semantics::Fuzzy, TNorm::Product, ImplicationKind::Goguen, TransformKind::None},
    {"rc", Semantics::Fuzzy, TNorm::Product, ImplicationKind::Reichenbach, TransformKind::None},
    {"rc-s", Semantics::Fuzzy, TNorm::Product, ImplicationKind::Reichenbach, TransformKind::Sigmoidal},
    {"rc-phi", Semantics::Fuzzy, TNorm::Product, ImplicationKind::Reichenbach, TransformKind::Phi},
    {"yg", Semantics::Fuzzy, TNorm::Product, ImplicationKind::Yager, TransformKind::None},
    {"tg", Semantics::Fuzzy, TNorm::Godel, ImplicationKind::Godel, TransformKind::None},
    {"tlk", Semantics::Fuzzy, TNorm::Lukasiewicz, ImplicationKind::Lukasiewicz, TransformKind::None},
    {"trc", Semantics::Fuzzy, TNorm::Product, ImplicationKind::Reichenbach, TransformKind::None},
    {"tyg", Semantics::Fuzzy, TNorm::Yager, ImplicationKind::Yager, TransformKind::None},
};

}  // namespace

const std::vector<std::string>& backend_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : kRegistry) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

LogicBackend make_backend(std::string_view name, const LogicParams& params) {
  if (!(params.xi > 0.0)) throw std::invalid_argument("xi must be positive");
  if (!(params.yager_p >= 1.0)) throw std::invalid_argument("yager p must be >= 1");
  if (!(params.sigmoidal_s > 0.0)) throw std::invalid_argument("sigmoidal steepness must be positive");
  if (!(params.comparison_eps >= 0.0)) throw std::invalid_argument("comparison eps must be non-negative");
  if (!(params.phi_exponent > 0.0)) throw std::invalid_argument("phi exponent must be positive");

  const std::string_view key = name == "g" ? std::string_view("godel") : name;
  auto it = std::find_if(std::begin(kRegistry), std::end(kRegistry), [&](const Entry& e) { return e.name == key; });
  if (it == std::end(kRegistry)) {
    std::string valid;
    for (const auto& n : backend_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown logic '" + std::string(name) + "' (valid: " + valid + ")");
  }
  LogicBackend b;
  b.name = std::string(it->name);
  b.semantics = it->semantics;
  b.conjunction = it->conjunction;
  b.disjunction = SNorm::ProbabilisticSum;
  b.implication = it->implication;
  b.transform = it->transform;
  b.params = params;
  return b;
}

Formula prepare(const Formula& f, const LogicBackend& backend) {
  if (backend.semantics == Semantics::Dl2) return push_negations(expand(f), /*rewrite_implications=*/true);
  return expand(f);
}

}  // namespace dlogic
