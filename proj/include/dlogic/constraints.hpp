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
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dlogic/formula.hpp"

namespace dlogic {

/// (l1, l2, l3): when class l1 is plausible, l2 should be at least as
/// likely as l3.
struct LabelTriple {
  std::size_t l1;
  std::size_t l2;
  std::size_t l3;

  friend bool operator==(const LabelTriple&, const LabelTriple&) = default;
};

struct ClassGroup {
  std::string name;
  std::vector<std::size_t> members;

  friend bool operator==(const ClassGroup&, const ClassGroup&) = default;
};

using ConstraintTable = std::variant<std::vector<LabelTriple>, std::vector<ClassGroup>>;

/// forall (a, b, c) in Labels: (out[a] >= 1/n_classes) -> (out[b] >= out[c])
Formula csim_formula(const std::vector<LabelTriple>& labels, std::size_t n_classes);

/// forall g in Groups: (sum(out[g]) <= eps) or (sum(out[g]) >= 1 - eps),
/// with eps in (0, 0.5).
Formula group_formula(const std::vector<ClassGroup>& groups, double eps);

/// dist(out) <= L * dist(in), over a sample and its paired sample.
Formula lipschitz_formula(double lipschitz);

/// Class-similarity triples (fmnist, cifar10, synthetic) or class groups
/// (gtsrb, synthetic-groups). The synthetic tables are generated for
/// `n_classes` classes; the image datasets ignore it.
ConstraintTable builtin_tables(std::string_view dataset, std::size_t n_classes = 10);

/// For class c, the two classes about 3/10 of the ring away on either side
/// (c + 3 and c + 7 for ten classes), lower index first: whenever c is
/// plausible the lower-indexed one should be at least as likely. All triples
/// rank classes by index, so they can hold simultaneously; the ring of
/// gen_synthetic() is symmetric, so an unconstrained model orders each pair
/// arbitrarily.
std::vector<LabelTriple> synthetic_triples(std::size_t n_classes);

/// Consecutive runs of three classes; trailing classes stay unconstrained.
std::vector<ClassGroup> synthetic_groups(std::size_t n_classes);

/// Class names in canonical index order.
const std::vector<std::string>& class_names(std::string_view dataset);

/// Plain-text tables, one entry per line, '#' starts a comment:
///   triples: "<l1> <l2> <l3>"
///   groups:  "<name>: <member> <member> ..."
std::vector<LabelTriple> load_label_triples(const std::filesystem::path& path);
std::vector<ClassGroup> load_class_groups(const std::filesystem::path& path);

/// Validation shared by the builders and loaders; throws
/// std::invalid_argument.
void validate(const std::vector<LabelTriple>& labels, std::size_t n_classes);
void validate(const std::vector<ClassGroup>& groups, std::size_t n_classes);

/// Binding tables for parsing DSL text that refers to built-in sets
/// ("Labels", "Groups") and the constant "eps".
ParseContext constraint_context(std::size_t n_classes, const std::vector<LabelTriple>& labels,
                                const std::vector<ClassGroup>& groups, double eps = 0.05);

}  // namespace dlogic
