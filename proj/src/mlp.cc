// src/mlp.cc

// Copyright 2026  The olsad Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "olsad/mlp.h"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace olsad {

namespace {

void Relu(Matrix *m) { *m = m->cwiseMax(0.0); }

// Log-softmax of each row.
Matrix LogSoftmaxRows(const Matrix &logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    const double lse = m + std::log((logits.row(r).array() - m).exp().sum());
    out.row(r) = logits.row(r).array() - lse;
  }
  return out;
}

std::vector<Matrix> ForwardLogits(const MlpModel &model, const Matrix &inputs) {
  std::vector<Matrix> acts;
  acts.reserve(model.layers().size() + 1);
  acts.push_back(inputs);
  for (size_t l = 0; l < model.layers().size(); ++l) {
    const MlpLayer &layer = model.layers()[l];
    Matrix z = acts.back() * layer.weights.transpose();
    z.rowwise() += layer.bias.transpose();
    if (l + 1 < model.layers().size()) Relu(&z);
    acts.push_back(std::move(z));
  }
  return acts;
}

void CheckInputs(const MlpModel &model, const Matrix &inputs,
                 const std::vector<SadLabel> &labels) {
  if (inputs.cols() != model.InputDim())
    throw std::invalid_argument("Mlp: input dimension mismatch");
  if (static_cast<size_t>(inputs.rows()) != labels.size())
    throw std::invalid_argument("Mlp: input/label count mismatch");
}

}  // namespace

MlpModel::MlpModel(std::vector<MlpLayer> layers, int selected_epoch)
    : layers_(std::move(layers)), selected_epoch_(selected_epoch) {
  if (layers_.empty()) throw std::invalid_argument("MlpModel: no layers");
  for (size_t l = 0; l < layers_.size(); ++l) {
    const MlpLayer &layer = layers_[l];
    if (layer.bias.size() != layer.weights.rows() || layer.weights.cols() == 0)
      throw std::invalid_argument("MlpModel: bias/weight shape mismatch");
    if (l > 0 && layer.weights.cols() != layers_[l - 1].weights.rows())
      throw std::invalid_argument("MlpModel: layer " + std::to_string(l + 1) +
                                  " does not chain to layer " + std::to_string(l));
  }
  if (layers_.back().weights.rows() != 2)
    throw std::invalid_argument("MlpModel: output layer must have 2 units");
}

MlpModel MlpModel::Random(const std::vector<int> &dims, std::uint64_t seed) {
  if (dims.size() < 2) throw std::invalid_argument("MlpModel::Random: need >= 2 dims");
  Rng rng(seed);
  std::vector<MlpLayer> layers;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const bool output = l + 2 == dims.size();
    const double stddev = output ? 0.01 : std::sqrt(2.0 / dims[l]);
    MlpLayer layer;
    layer.weights.resize(dims[l + 1], dims[l]);
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i)
      layer.weights.data()[i] = stddev * rng.Normal();
    layer.bias = Vector::Zero(dims[l + 1]);
    layers.push_back(std::move(layer));
  }
  return MlpModel(std::move(layers));
}

std::vector<int> MlpModel::LayerDims() const {
  std::vector<int> dims;
  if (layers_.empty()) return dims;
  dims.push_back(static_cast<int>(layers_[0].weights.cols()));
  for (const MlpLayer &l : layers_) dims.push_back(static_cast<int>(l.weights.rows()));
  return dims;
}

int MlpModel::InputDim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_[0].weights.cols());
}

std::vector<Matrix> MlpModel::Forward(const Matrix &inputs) const {
  if (inputs.cols() != InputDim())
    throw std::invalid_argument("Mlp: input dimension mismatch");
  std::vector<Matrix> acts = ForwardLogits(*this, inputs);
  acts.back() = LogSoftmaxRows(acts.back()).array().exp();
  return acts;
}

Vector MlpModel::FirstHidden(const Vector &x) const {
  if (x.size() != InputDim())
    throw std::invalid_argument("Mlp: input dimension mismatch (got " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(InputDim()) + ")");
  const MlpLayer &l = layers_[0];
  Vector h = l.weights * x + l.bias;
  // A single-layer model has no hidden layer; its output is not rectified.
  if (layers_.size() > 1) h = h.cwiseMax(0.0);
  return h;
}

Vector MlpModel::Probabilities(const Vector &x) const {
  return Forward(Matrix(x.transpose())).back().row(0).transpose();
}

double CrossEntropy(const MlpModel &model, const Matrix &inputs,
                    const std::vector<SadLabel> &labels) {
  CheckInputs(model, inputs, labels);
  if (labels.empty()) return 0.0;
  const Matrix logp = LogSoftmaxRows(ForwardLogits(model, inputs).back());
  double loss = 0.0;
  for (size_t i = 0; i < labels.size(); ++i)
    loss -= logp(static_cast<Eigen::Index>(i), static_cast<int>(labels[i]));
  return loss / static_cast<double>(labels.size());
}

std::vector<MlpLayer> CrossEntropyGradients(const MlpModel &model,
                                            const Matrix &inputs,
                                            const std::vector<SadLabel> &labels,
                                            double *loss) {
  CheckInputs(model, inputs, labels);
  const double n = static_cast<double>(labels.size());
  std::vector<Matrix> acts = ForwardLogits(model, inputs);
  const Matrix logp = LogSoftmaxRows(acts.back());
  Matrix delta = logp.array().exp();
  double total = 0.0;
  for (size_t i = 0; i < labels.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const int c = static_cast<int>(labels[i]);
    total -= logp(r, c);
    delta(r, c) -= 1.0;
  }
  if (loss) *loss = total / n;
  delta /= n;

  const auto &layers = model.layers();
  std::vector<MlpLayer> grads(layers.size());
  for (size_t l = layers.size(); l-- > 0;) {
    grads[l].weights = delta.transpose() * acts[l];
    grads[l].bias = delta.colwise().sum().transpose();
    if (l == 0) break;
    Matrix prev = delta * layers[l].weights;
    // Rectifier derivative: pass where the activation was positive.
    delta = prev.cwiseProduct((acts[l].array() > 0.0).cast<double>().matrix());
  }
  return grads;
}

MlpTrainResult TrainMlp(const Matrix &inputs, const std::vector<SadLabel> &labels,
                        const MlpTrainOptions &opts, const MlpMonitorData &monitor,
                        const std::function<void(int, double, double)> &on_epoch) {
  if (static_cast<size_t>(inputs.rows()) != labels.size())
    throw std::invalid_argument("TrainMlp: input/label count mismatch");
  size_t n_sp = 0;
  for (SadLabel l : labels) n_sp += l == SadLabel::kSpeech;
  if (n_sp == 0 || n_sp == labels.size())
    throw DataError("TrainMlp: training data contains a single class");
  if (opts.epochs < 0 || opts.batch_size < 1 || !(opts.learning_rate > 0.0))
    throw std::invalid_argument("TrainMlp: bad options");

  std::vector<int> dims = {static_cast<int>(inputs.cols())};
  dims.insert(dims.end(), opts.hidden.begin(), opts.hidden.end());
  dims.push_back(2);
  MlpModel model = MlpModel::Random(dims, opts.seed);
  Rng rng(opts.seed ^ 0x5eed5eed5eedULL);

  MlpTrainResult result;
  const int selected = std::min(std::max(opts.selected_epoch, 0), opts.epochs);
  auto record = [&](int epoch) {
    const double train = CrossEntropy(model, inputs, labels);
    result.train_loss.push_back(train);
    double mon = std::nan("");
    if (monitor.inputs && monitor.labels && !monitor.labels->empty()) {
      mon = CrossEntropy(model, *monitor.inputs, *monitor.labels);
      result.monitor_loss.push_back(mon);
    }
    model.set_selected_epoch(epoch);
    if (opts.keep_checkpoints) result.checkpoints.push_back(model);
    if (epoch == selected) result.model = model;
    if (on_epoch) on_epoch(epoch, train, mon);
  };
  record(0);

  const auto n = static_cast<Eigen::Index>(labels.size());
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
    for (Eigen::Index i = n - 1; i > 0; --i)
      std::swap(order[i], order[rng.Below(static_cast<std::uint64_t>(i) + 1)]);
    int batch_no = 0;
    for (Eigen::Index start = 0; start < n; start += opts.batch_size, ++batch_no) {
      const Eigen::Index rows = std::min<Eigen::Index>(opts.batch_size, n - start);
      Matrix x(rows, inputs.cols());
      std::vector<SadLabel> y(static_cast<size_t>(rows));
      for (Eigen::Index r = 0; r < rows; ++r) {
        x.row(r) = inputs.row(order[start + r]);
        y[r] = labels[order[start + r]];
      }
      double loss = 0.0;
      const std::vector<MlpLayer> grads = CrossEntropyGradients(model, x, y, &loss);
      if (!std::isfinite(loss))
        throw DataError("TrainMlp: non-finite loss at epoch " + std::to_string(epoch) +
                        ", batch " + std::to_string(batch_no));
      for (size_t l = 0; l < grads.size(); ++l) {
        model.mutable_layers()[l].weights -= opts.learning_rate * grads[l].weights;
        model.mutable_layers()[l].bias -= opts.learning_rate * grads[l].bias;
      }
    }
    record(epoch);
  }
  return result;
}

}  // namespace olsad
