// include/olsad/trainer.h

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

#ifndef OLSAD_TRAINER_H_
#define OLSAD_TRAINER_H_

#include <functional>
#include <string>
#include <vector>

#include "olsad/label-io.h"
#include "olsad/sad-model.h"
#include "olsad/wave-io.h"

namespace olsad {

struct ManifestEntry {
  std::string audio_path;
  std::string label_path;
};

/// One `audio_path<TAB>label_path` pair per line; blank lines and lines
/// starting with '#' are skipped. Relative paths are taken relative to the
/// manifest's directory. Throws DataError.
std::vector<ManifestEntry> ReadManifest(const std::string &path);

struct TrainConfig {
  std::vector<ManifestEntry> manifest;
  std::vector<ManifestEntry> monitor_manifest;  // MLP loss logging only
  FeatureConfig feature_cfg;
  int segment_frames = 10;
  int ubm1_size = 32;
  int ubm2_per_class_size = 64;
  int ubm3_size = 32;
  int gmm_iters = 20;
  int lda_dim = 12;
  int pca_dim = 24;
  std::vector<int> mlp_hidden = {256, 128, 64};
  int mlp_epochs = 30;
  int mlp_selected_epoch = 30;
  double mlp_learning_rate = 0.01;
  int mlp_batch_size = 256;
  std::uint64_t seed = 0;
  double theta_m = 0.25;
  /// Replace theta_m by the value minimizing the weighted training-segment
  /// error (config value `theta_m = auto`).
  bool calibrate_theta = false;
  AdaptationConfig adaptation;

  /// Throws std::invalid_argument.
  void Validate() const;
};

/// Sets one named hyperparameter from its text form. Keys match the field
/// names above, with feature and adaptation fields unprefixed (`hop`,
/// `alpha`, ...). Throws std::invalid_argument for unknown keys or bad
/// values.
void SetConfigValue(TrainConfig *cfg, const std::string &key, const std::string &value);
/// Applies `key = value` lines ('#' starts a comment).
void ParseConfig(std::istream &in, TrainConfig *cfg);
void ReadConfigFile(const std::string &path, TrainConfig *cfg);
/// `key=value` lines for every hyperparameter.
std::string FormatConfig(const TrainConfig &cfg);

/// Threshold minimizing fn_weight * P_FN + fp_weight * P_FP over scored
/// examples under the rule "speech iff score > threshold". Among equal
/// costs the lowest threshold wins; the result lies halfway between the
/// two neighbouring scores. Throws std::invalid_argument if either list is
/// empty.
double CalibrateThreshold(std::vector<double> speech_scores,
                          std::vector<double> nonspeech_scores,
                          double fn_weight = 0.75, double fp_weight = 0.25);

/// Label of each frame: the class whose segment contains the frame centre
/// t * hop + window / 2 (half-open intervals); uncovered time is
/// non-speech.
std::vector<SadLabel> FrameLabels(const std::vector<SegmentLabel> &labels,
                                  int64_t n_frames, double hop, double window);

/// Batch front-end: AppendDeltas(ApplyCmn(ExtractMfcc(audio))).
FrameSequence ExtractFeatures(const AudioStream &audio, const FeatureConfig &cfg);

struct LabeledAudio {
  std::string name;
  AudioStream audio;
  std::vector<SegmentLabel> labels;
};

/// Loads every manifest entry; errors name the offending file.
std::vector<LabeledAudio> LoadCorpus(const std::vector<ManifestEntry> &manifest);

struct StageTiming {
  std::string name;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<StageTiming> stages;
  int64_t total_frames = 0;
  int64_t speech_frames = 0;
  int64_t segments_kept = 0;
  int64_t segments_dropped = 0;
  std::vector<double> mlp_train_loss;
  std::vector<double> mlp_monitor_loss;
  double theta_m = 0.0;

  double DroppedFraction() const;
};

using TrainLog = std::function<void(const std::string &)>;

/// Runs the twelve training stages on an in-memory corpus. A failing stage
/// is reported as DataError("stage N (name): ..."). `monitor` may be empty.
SadModel TrainFromCorpus(const TrainConfig &cfg, const std::vector<LabeledAudio> &corpus,
                         const std::vector<LabeledAudio> &monitor,
                         const TrainLog &log = {}, TrainReport *report = nullptr);

/// Loads cfg.manifest (and cfg.monitor_manifest) and trains.
SadModel Train(const TrainConfig &cfg, const TrainLog &log = {},
               TrainReport *report = nullptr);

}  // namespace olsad

#endif  // OLSAD_TRAINER_H_
