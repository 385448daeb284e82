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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dlogic/autodiff.hpp"
#include "dlogic/formula.hpp"
#include "dlogic/logics.hpp"

namespace dlogic {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Feed-forward classifier: rectifier hidden layers, softmax output.
///
/// Layer l maps activations a (fan_in) to W_l a + b_l with W_l of shape
/// fan_out x fan_in. The flat parameter vector lists, per layer, W_l in
/// row-major order followed by b_l.
class Model {
 public:
  Model() = default;

  /// Zero weights and biases.
  explicit Model(std::vector<std::size_t> layer_sizes);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases drawn from
  /// a generator seeded with `seed`.
  static Model init(std::vector<std::size_t> layer_sizes, std::uint64_t seed);

  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::size_t n_inputs() const { return sizes_.front(); }
  std::size_t n_classes() const { return sizes_.back(); }
  std::size_t n_layers() const { return weights_.size(); }
  std::size_t parameter_count() const;

  const MatrixXd& weight(std::size_t layer) const { return weights_[layer]; }
  const VectorXd& bias(std::size_t layer) const { return biases_[layer]; }
  MatrixXd& weight(std::size_t layer) { return weights_[layer]; }
  VectorXd& bias(std::size_t layer) { return biases_[layer]; }

  VectorXd parameters() const;
  void set_parameters(const Eigen::Ref<const VectorXd>& flat);

  /// Class probabilities for one sample.
  VectorXd forward(const Eigen::Ref<const VectorXd>& x) const;

  /// Class probabilities for a batch; one sample per row.
  MatrixXd forward_batch(const Eigen::Ref<const MatrixXd>& x) const;

  friend bool operator==(const Model& a, const Model& b);

 private:
  std::vector<std::size_t> sizes_;
  std::vector<MatrixXd> weights_;
  std::vector<VectorXd> biases_;
};

/// Forward pass with the parameters supplied as scalars of any kind (for
/// instance tape variables), laid out as in Model::parameters().
template <class T>
std::vector<T> forward_generic(std::span<const std::size_t> layer_sizes, std::span<const T> params,
                               std::span<const double> x) {
  using std::exp;
  using std::max;
  if (layer_sizes.size() < 2) throw std::invalid_argument("forward_generic: need at least two layers");
  if (x.size() != layer_sizes[0]) throw std::invalid_argument("forward_generic: input dimension mismatch");
  std::size_t offset = 0;
  std::vector<T> act;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const std::size_t fan_in = layer_sizes[l], fan_out = layer_sizes[l + 1];
    const std::size_t bias_offset = offset + fan_in * fan_out;
    std::vector<T> next;
    next.reserve(fan_out);
    for (std::size_t o = 0; o < fan_out; ++o) {
      T z = params[bias_offset + o];
      for (std::size_t i = 0; i < fan_in; ++i) {
        const T& w = params[offset + o * fan_in + i];
        z = l == 0 ? z + w * x[i] : z + w * act[i];
      }
      const bool hidden = l + 2 < layer_sizes.size();
      next.push_back(hidden ? max(z, 0.0) : z);
    }
    offset = bias_offset + fan_out;
    act = std::move(next);
  }
  if (offset != params.size()) throw std::invalid_argument("forward_generic: parameter count mismatch");
  // Softmax, shifted by the (constant) maximum logit.
  double shift = value_of(act[0]);
  for (const auto& z : act) shift = std::max(shift, value_of(z));
  std::vector<T> e;
  e.reserve(act.size());
  for (const auto& z : act) e.push_back(exp(z - shift));
  T total = e[0];
  for (std::size_t i = 1; i < e.size(); ++i) total = total + e[i];
  for (auto& v : e) v = v / total;
  return e;
}

struct Optimizer {
  double learning_rate = 0.05;
  double momentum = 0.0;
  VectorXd velocity;

  /// Applies one SGD (with momentum) update to `model`.
  void step(Model& model, const Eigen::Ref<const VectorXd>& gradient);
};

/// A constraint attached to training. `formula` must already be prepared
/// for `backend` (see prepare()). Paired constraints (dist(...) terms) pair
/// sample i of a batch with sample (i + 1) mod batch size.
struct LogicTerm {
  LogicBackend backend;
  Formula formula;
  bool paired = false;
  bool uses_inputs = false;
};

/// Builds a LogicTerm, preparing the formula for the backend and detecting
/// paired-sample terms.
LogicTerm make_logic_term(const Formula& f, const LogicBackend& backend);

/// Per-sample compiled loss (recorded on `tape`) and its gradient with
/// respect to the sample's probabilities and, for paired terms, the paired
/// sample's probabilities.
struct SampleLogic {
  double loss = 0.0;
  VectorXd d_outputs;
  VectorXd d_paired_outputs;
};

SampleLogic sample_logic(ad::Tape& tape, const LogicTerm& term, std::span<const double> inputs,
                         std::span<const double> outputs, std::span<const double> paired_inputs = {},
                         std::span<const double> paired_outputs = {});

struct BatchLoss {
  /// Mean cross-entropy over the batch.
  double cross_entropy = 0.0;
  /// Mean per-sample logical loss (0 without a term).
  double logical = 0.0;
  /// Gradient of cross_entropy + lambda * logical w.r.t. the parameters.
  VectorXd gradient;
};

/// Raised when a loss or gradient becomes NaN.
class NonFiniteLoss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Value and gradient of L_CE + lambda * L_L on one batch. The logical
/// term is the mean of per-sample compiled losses; `term` may be null.
BatchLoss loss_and_gradient(const Model& model, const Eigen::Ref<const MatrixXd>& x, std::span<const int> labels,
                            double lambda, const LogicTerm* term);

/// Loss value only, computed without any tape (finite-difference oracle).
double loss_value(const Model& model, const Eigen::Ref<const MatrixXd>& x, std::span<const int> labels,
                  double lambda, const LogicTerm* term);

struct StepResult {
  double cross_entropy;
  double logical;
};

/// One optimizer update on a batch. Throws NonFiniteLoss on NaN.
StepResult train_step(Model& model, Optimizer& optimizer, const Eigen::Ref<const MatrixXd>& x,
                      std::span<const int> labels, double lambda, const LogicTerm* term);

/// Text checkpoint:
///
///   dlogic-model 1
///   layers <n> <size_1> ... <size_n>
///   <parameter_0>
///   ...
///
/// one parameter per line in Model::parameters() order, written with the
/// shortest representation that reads back to the same double.
void save_checkpoint(const Model& model, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace dlogic
