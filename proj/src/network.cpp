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

#include "dlogic/network.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace dlogic {

namespace {

void check_sizes(const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("model needs at least an input and an output layer");
  for (auto s : sizes)
    if (s == 0) throw std::invalid_argument("layer sizes must be positive");
}

// Row-wise numerically stable softmax.
MatrixXd softmax_rows(const MatrixXd& logits) {
  MatrixXd p = logits;
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    const double m = p.row(r).maxCoeff();
    p.row(r) = (p.row(r).array() - m).exp();
    p.row(r) /= p.row(r).sum();
  }
  return p;
}

bool uses(const Expr& e, Expr::Kind kind) {
  if (e.kind() == kind) return true;
  for (const auto& c : e.children())
    if (uses(c, kind)) return true;
  return false;
}

bool uses(const Formula& f, Expr::Kind kind) {
  if (f.kind() == Formula::Kind::Cmp) return uses(f.lhs(), kind) || uses(f.rhs(), kind);
  for (const auto& c : f.children())
    if (uses(c, kind)) return true;
  return false;
}

struct Activations {
  std::vector<MatrixXd> pre;   // z_l, one per layer
  std::vector<MatrixXd> post;  // a_0 = x, a_l = relu(z_l) for hidden layers
  MatrixXd probabilities;
};

Activations run_forward(const Model& m, const Eigen::Ref<const MatrixXd>& x) {
  if (static_cast<std::size_t>(x.cols()) != m.n_inputs())
    throw std::invalid_argument("input dimension " + std::to_string(x.cols()) + " does not match model input " +
                                std::to_string(m.n_inputs()));
  Activations act;
  act.post.emplace_back(x);
  for (std::size_t l = 0; l < m.n_layers(); ++l) {
    MatrixXd z = act.post.back() * m.weight(l).transpose();
    z.rowwise() += m.bias(l).transpose();
    act.pre.push_back(z);
    if (l + 1 < m.n_layers()) act.post.push_back(z.cwiseMax(0.0));
  }
  act.probabilities = softmax_rows(act.pre.back());
  return act;
}

double mean_cross_entropy(const MatrixXd& logits, std::span<const int> labels) {
  double total = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    const double lse = m + std::log((logits.row(r).array() - m).exp().sum());
    total += lse - logits(r, labels[static_cast<std::size_t>(r)]);
  }
  return total / static_cast<double>(logits.rows());
}

void check_batch(const Model& m, const Eigen::Ref<const MatrixXd>& x, std::span<const int> labels) {
  if (x.rows() == 0) throw std::invalid_argument("empty batch");
  if (static_cast<std::size_t>(x.rows()) != labels.size())
    throw std::invalid_argument("batch has " + std::to_string(x.rows()) + " rows but " +
                                std::to_string(labels.size()) + " labels");
  for (int y : labels)
    if (y < 0 || static_cast<std::size_t>(y) >= m.n_classes())
      throw std::invalid_argument("label " + std::to_string(y) + " out of range");
}

std::span<const double> row_span(const RowMatrixXd& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace

// ---------------------------------------------------------------------------
// Model

Model::Model(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
  check_sizes(sizes_);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    weights_.push_back(MatrixXd::Zero(static_cast<Eigen::Index>(sizes_[l + 1]), static_cast<Eigen::Index>(sizes_[l])));
    biases_.push_back(VectorXd::Zero(static_cast<Eigen::Index>(sizes_[l + 1])));
  }
}

Model Model::init(std::vector<std::size_t> layer_sizes, std::uint64_t seed) {
  Model m(std::move(layer_sizes));
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < m.n_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(m.sizes_[l]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index r = 0; r < m.weights_[l].rows(); ++r)
      for (Eigen::Index c = 0; c < m.weights_[l].cols(); ++c) m.weights_[l](r, c) = dist(rng);
    for (Eigen::Index r = 0; r < m.biases_[l].size(); ++r) m.biases_[l][r] = dist(rng);
  }
  return m;
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) n += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
  return n;
}

VectorXd Model::parameters() const {
  VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < n_layers(); ++l) {
    for (Eigen::Index r = 0; r < weights_[l].rows(); ++r)
      for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) flat[k++] = weights_[l](r, c);
    for (Eigen::Index r = 0; r < biases_[l].size(); ++r) flat[k++] = biases_[l][r];
  }
  return flat;
}

void Model::set_parameters(const Eigen::Ref<const VectorXd>& flat) {
  if (static_cast<std::size_t>(flat.size()) != parameter_count())
    throw std::invalid_argument("set_parameters: expected " + std::to_string(parameter_count()) + " values, got " +
                                std::to_string(flat.size()));
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < n_layers(); ++l) {
    for (Eigen::Index r = 0; r < weights_[l].rows(); ++r)
      for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) weights_[l](r, c) = flat[k++];
    for (Eigen::Index r = 0; r < biases_[l].size(); ++r) biases_[l][r] = flat[k++];
  }
}

VectorXd Model::forward(const Eigen::Ref<const VectorXd>& x) const {
  if (static_cast<std::size_t>(x.size()) != n_inputs())
    throw std::invalid_argument("input dimension " + std::to_string(x.size()) + " does not match model input " +
                                std::to_string(n_inputs()));
  return forward_batch(x.transpose()).row(0).transpose();
}

MatrixXd Model::forward_batch(const Eigen::Ref<const MatrixXd>& x) const { return run_forward(*this, x).probabilities; }

bool operator==(const Model& a, const Model& b) {
  return a.sizes_ == b.sizes_ && a.weights_ == b.weights_ && a.biases_ == b.biases_;
}

void Optimizer::step(Model& model, const Eigen::Ref<const VectorXd>& gradient) {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  VectorXd params = model.parameters();
  if (momentum != 0.0) {
    if (velocity.size() != params.size()) velocity = VectorXd::Zero(params.size());
    velocity = momentum * velocity - learning_rate * gradient;
    params += velocity;
  } else {
    params -= learning_rate * gradient;
  }
  model.set_parameters(params);
}

// ---------------------------------------------------------------------------
// Losses

LogicTerm make_logic_term(const Formula& f, const LogicBackend& backend) {
  LogicTerm term{backend, prepare(f, backend)};
  term.paired = uses(term.formula, Expr::Kind::Norm2Diff);
  term.uses_inputs = term.paired || uses(term.formula, Expr::Kind::Input);
  return term;
}

SampleLogic sample_logic(ad::Tape& tape, const LogicTerm& term, std::span<const double> inputs,
                         std::span<const double> outputs, std::span<const double> paired_inputs,
                         std::span<const double> paired_outputs) {
  tape.clear();
  std::vector<ad::Var> out_vars, paired_vars, in_consts, paired_in_consts;
  out_vars.reserve(outputs.size());
  for (double v : outputs) out_vars.push_back(tape.variable(v));
  for (double v : paired_outputs) paired_vars.push_back(tape.variable(v));
  if (term.uses_inputs) {
    for (double v : inputs) in_consts.push_back(tape.constant(v));
    for (double v : paired_inputs) paired_in_consts.push_back(tape.constant(v));
  }
  Bindings<ad::Var> env{in_consts, out_vars, paired_in_consts, paired_vars};
  const auto value = compile(term.formula, term.backend, env);
  SampleLogic result;
  result.loss = value.loss.value();
  const ad::Gradient g = tape.grad(value.loss);
  result.d_outputs = g.wrt(out_vars);
  result.d_paired_outputs = g.wrt(paired_vars);
  return result;
}

BatchLoss loss_and_gradient(const Model& model, const Eigen::Ref<const MatrixXd>& x, std::span<const int> labels,
                            double lambda, const LogicTerm* term) {
  check_batch(model, x, labels);
  if (lambda < 0.0) throw std::invalid_argument("lambda must be non-negative");
  const Activations act = run_forward(model, x);
  const Eigen::Index batch = x.rows();
  const double inv_batch = 1.0 / static_cast<double>(batch);
  const MatrixXd& p = act.probabilities;

  BatchLoss out;
  out.cross_entropy = mean_cross_entropy(act.pre.back(), labels);

  MatrixXd d_logits = p;
  for (Eigen::Index r = 0; r < batch; ++r) d_logits(r, labels[static_cast<std::size_t>(r)]) -= 1.0;
  d_logits *= inv_batch;

  if (term != nullptr) {
    const RowMatrixXd probs = p;
    const RowMatrixXd inputs = x;
    MatrixXd d_probs = MatrixXd::Zero(p.rows(), p.cols());
    ad::Tape tape;
    double total = 0.0;
    for (Eigen::Index r = 0; r < batch; ++r) {
      const Eigen::Index q = term->paired ? (r + 1) % batch : r;
      const SampleLogic s =
          term->paired ? sample_logic(tape, *term, row_span(inputs, r), row_span(probs, r), row_span(inputs, q),
                                      row_span(probs, q))
                       : sample_logic(tape, *term, row_span(inputs, r), row_span(probs, r));
      total += s.loss;
      d_probs.row(r) += s.d_outputs.transpose();
      if (term->paired) d_probs.row(q) += s.d_paired_outputs.transpose();
    }
    out.logical = total * inv_batch;
    if (lambda != 0.0) {
      d_probs *= lambda * inv_batch;
      // Softmax Jacobian: dz = p * (g - <g, p>).
      for (Eigen::Index r = 0; r < batch; ++r) {
        const double dot = d_probs.row(r).dot(p.row(r));
        d_logits.row(r).array() += p.row(r).array() * (d_probs.row(r).array() - dot);
      }
    }
  }

  out.gradient.resize(static_cast<Eigen::Index>(model.parameter_count()));
  std::vector<VectorXd> pieces(model.n_layers());
  MatrixXd delta = d_logits;
  for (std::size_t l = model.n_layers(); l-- > 0;) {
    const MatrixXd& a_prev = act.post[l];
    const MatrixXd d_w = delta.transpose() * a_prev;
    const VectorXd d_b = delta.colwise().sum().transpose();
    VectorXd piece(d_w.size() + d_b.size());
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < d_w.rows(); ++r)
      for (Eigen::Index c = 0; c < d_w.cols(); ++c) piece[k++] = d_w(r, c);
    piece.tail(d_b.size()) = d_b;
    pieces[l] = std::move(piece);
    if (l > 0) {
      MatrixXd d_a = delta * model.weight(l);
      // Rectifier: the kink at 0 passes the gradient through.
      delta = d_a.cwiseProduct((act.pre[l - 1].array() >= 0.0).cast<double>().matrix());
    }
  }
  Eigen::Index k = 0;
  for (const auto& piece : pieces) {
    out.gradient.segment(k, piece.size()) = piece;
    k += piece.size();
  }
  return out;
}

double loss_value(const Model& model, const Eigen::Ref<const MatrixXd>& x, std::span<const int> labels, double lambda,
                  const LogicTerm* term) {
  check_batch(model, x, labels);
  const Activations act = run_forward(model, x);
  double loss = mean_cross_entropy(act.pre.back(), labels);
  if (term != nullptr && lambda != 0.0) {
    const RowMatrixXd probs = act.probabilities;
    const RowMatrixXd inputs = x;
    const Eigen::Index batch = x.rows();
    double total = 0.0;
    for (Eigen::Index r = 0; r < batch; ++r) {
      const Eigen::Index q = term->paired ? (r + 1) % batch : r;
      Bindings<double> env{row_span(inputs, r), row_span(probs, r), {}, {}};
      if (term->paired) {
        env.paired_inputs = row_span(inputs, q);
        env.paired_outputs = row_span(probs, q);
      }
      total += compile(term->formula, term->backend, env).loss;
    }
    loss += lambda * total / static_cast<double>(batch);
  }
  return loss;
}

StepResult train_step(Model& model, Optimizer& optimizer, const Eigen::Ref<const MatrixXd>& x,
                      std::span<const int> labels, double lambda, const LogicTerm* term) {
  const BatchLoss loss = loss_and_gradient(model, x, labels, lambda, term);
  if (!std::isfinite(loss.cross_entropy) || !std::isfinite(loss.logical) || !loss.gradient.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite loss (cross-entropy " << loss.cross_entropy << ", logical " << loss.logical;
    if (term != nullptr) msg << ", logic " << term->backend.name;
    msg << ", lambda " << lambda << ")";
    throw NonFiniteLoss(msg.str());
  }
  optimizer.step(model, loss.gradient);
  return {loss.cross_entropy, loss.logical};
}

// ---------------------------------------------------------------------------
// Checkpoints

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "dlogic-model 1\nlayers " << model.layer_sizes().size();
  for (auto s : model.layer_sizes()) out << ' ' << s;
  out << '\n';
  const VectorXd params = model.parameters();
  char buf[64];
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), params[i]);
    out.write(buf, end - buf);
    out.put('\n');
  }
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string magic, tag;
  int version = 0;
  std::size_t n = 0;
  in >> magic >> version >> tag >> n;
  if (magic != "dlogic-model" || version != 1 || tag != "layers")
    throw std::runtime_error(path.string() + ": not a dlogic model checkpoint");
  std::vector<std::size_t> sizes(n);
  for (auto& s : sizes) in >> s;
  if (!in) throw std::runtime_error(path.string() + ": truncated header");
  Model m(sizes);
  VectorXd params(static_cast<Eigen::Index>(m.parameter_count()));
  std::string token;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    if (!(in >> token)) throw std::runtime_error(path.string() + ": expected " + std::to_string(params.size()) + " parameters");
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), params[i]);
    if (ec != std::errc() || ptr != token.data() + token.size())
      throw std::runtime_error(path.string() + ": malformed parameter '" + token + "'");
  }
  m.set_parameters(params);
  return m;
}

}  // namespace dlogic
