// include/olsad/sad-model.h

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

#ifndef OLSAD_SAD_MODEL_H_
#define OLSAD_SAD_MODEL_H_

#include <string>

#include "olsad/common.h"
#include "olsad/context-transform.h"
#include "olsad/diag-gmm.h"
#include "olsad/mfcc.h"
#include "olsad/mlp.h"

namespace olsad {

/// Runtime adaptation of the zero-order model vectors and the threshold.
struct AdaptationConfig {
  double alpha = 0.4;  // model vector weight
  double beta = 0.1;   // threshold weight
  int l_sp = 30;       // speech buffer length, segments
  int l_nsp = 60;      // non-speech buffer length, segments
  bool enabled = true;

  void Validate() const;
  bool operator==(const AdaptationConfig &) const = default;
};

/// Everything the detector needs, produced by the trainer.
struct SadModel {
  int sample_rate = 0;
  FeatureConfig feature_cfg;
  int segment_frames = 10;
  ContextSpec lda_context = ContextSpec::Lda();
  ContextSpec pca_context = ContextSpec::Pca();
  LinearTransform lda;
  LinearTransform pca;
  Gmm ubm1;  // acoustic labeling (training only, kept for inspection)
  Gmm ubm2;  // zero-order statistics
  Gmm ubm3;  // supervectors
  MlpModel mlp;
  Vector w_sp_zero, w_nsp_zero;
  Vector w_sp_emb, w_nsp_emb;
  double theta_m = 0.25;
  AdaptationConfig adaptation;

  /// Checks dimensional consistency across components and that model
  /// vectors are finite, nonzero and the two zero-order vectors differ.
  /// Throws DataError.
  void Validate() const;
};

inline constexpr std::uint32_t kBundleVersion = 1;

/// Versioned binary bundle; every component is a tagged, length-prefixed
/// section. Doubles are stored by bit pattern so the round trip is exact.
std::string SerializeSadModel(const SadModel &model);
SadModel DeserializeSadModel(const std::string &bytes);

void WriteSadModel(const SadModel &model, const std::string &path);
SadModel ReadSadModel(const std::string &path);

}  // namespace olsad

#endif  // OLSAD_SAD_MODEL_H_
