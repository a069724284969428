// include/olsad/mlp.h

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

#ifndef OLSAD_MLP_H_
#define OLSAD_MLP_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "olsad/common.h"

namespace olsad {

struct MlpLayer {
  Matrix weights;  // out x in
  Vector bias;     // out

  bool operator==(const MlpLayer &o) const {
    return weights == o.weights && bias == o.bias;
  }
};

/// Feed-forward classifier: rectified hidden layers and a softmax output
/// over {non-speech, speech} (index = SadLabel value). Layer 1 activations
/// are the segment embedding.
class MlpModel {
 public:
  MlpModel() = default;
  /// Throws std::invalid_argument unless the layer shapes chain and the
  /// output has two units.
  explicit MlpModel(std::vector<MlpLayer> layers, int selected_epoch = 0);

  /// He-normal hidden layers, small-normal output layer, zero biases.
  static MlpModel Random(const std::vector<int> &dims, std::uint64_t seed);

  std::vector<int> LayerDims() const;
  int InputDim() const;
  int NumLayers() const { return static_cast<int>(layers_.size()); }
  const std::vector<MlpLayer> &layers() const { return layers_; }
  std::vector<MlpLayer> &mutable_layers() { return layers_; }
  int selected_epoch() const { return selected_epoch_; }
  void set_selected_epoch(int e) { selected_epoch_ = e; }

  /// Row-per-sample forward pass. Element 0 is the input, element k the
  /// post-activation output of layer k; the last element holds softmax
  /// probabilities.
  std::vector<Matrix> Forward(const Matrix &inputs) const;
  /// Post-activation output of layer 1 for a single input.
  Vector FirstHidden(const Vector &x) const;
  Vector Probabilities(const Vector &x) const;

  bool operator==(const MlpModel &o) const {
    return layers_ == o.layers_ && selected_epoch_ == o.selected_epoch_;
  }

 private:
  std::vector<MlpLayer> layers_;
  int selected_epoch_ = 0;
};

/// Mean softmax cross-entropy of `labels` given `inputs` (one row each).
double CrossEntropy(const MlpModel &model, const Matrix &inputs,
                    const std::vector<SadLabel> &labels);

/// Gradients of CrossEntropy with respect to every weight and bias.
std::vector<MlpLayer> CrossEntropyGradients(const MlpModel &model,
                                            const Matrix &inputs,
                                            const std::vector<SadLabel> &labels,
                                            double *loss = nullptr);

struct MlpTrainOptions {
  std::vector<int> hidden = {256, 128, 64};
  int epochs = 30;
  /// Checkpoint returned as the model; clamped to `epochs`.
  int selected_epoch = 30;
  double learning_rate = 0.01;
  int batch_size = 256;
  std::uint64_t seed = 0;
  bool keep_checkpoints = true;
};

struct MlpTrainResult {
  MlpModel model;                      // the selected checkpoint
  std::vector<MlpModel> checkpoints;   // index = epoch (0 = initialization)
  std::vector<double> train_loss;      // index = epoch
  std::vector<double> monitor_loss;    // empty without monitor data
};

struct MlpMonitorData {
  const Matrix *inputs = nullptr;
  const std::vector<SadLabel> *labels = nullptr;
};

/// Minibatch SGD on softmax cross-entropy; deterministic given the seed.
/// Throws DataError for single-class data or a non-finite loss.
MlpTrainResult TrainMlp(const Matrix &inputs, const std::vector<SadLabel> &labels,
                        const MlpTrainOptions &opts,
                        const MlpMonitorData &monitor = {},
                        const std::function<void(int, double, double)> &on_epoch = {});

}  // namespace olsad

#endif  // OLSAD_MLP_H_
