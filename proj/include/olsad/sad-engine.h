// include/olsad/sad-engine.h

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

#ifndef OLSAD_SAD_ENGINE_H_
#define OLSAD_SAD_ENGINE_H_

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <span>
#include <vector>

#include "olsad/context-transform.h"
#include "olsad/label-io.h"
#include "olsad/online-features.h"
#include "olsad/sad-model.h"
#include "olsad/wave-io.h"

namespace olsad {

struct SmoothingConfig {
  bool enabled = true;
  double min_gap = 0.3;     // non-speech gaps shorter than this are filled
  double min_speech = 0.2;  // speech runs shorter than this are removed
};

/// One decision per segment of `segment_frames` frames.
struct Decision {
  int64_t segment_index = 0;
  double start = 0.0;
  double end = 0.0;
  SadLabel label = SadLabel::kNonSpeech;
  double zero_score = 0.0;
  double emb_score = 0.0;
  double fused_score = 0.0;
  double threshold = 0.0;  // threshold the label was decided against

  bool operator==(const Decision &) const = default;
};

/// cos(w_test, w_sp) - cos(w_test, w_nsp), in [-2, 2]. Throws
/// std::invalid_argument on a zero-norm vector or dimension mismatch.
double ScoreVector(const Vector &w_test, const Vector &w_sp, const Vector &w_nsp);

/// Adaptation buffers and the current adapted model vectors / threshold.
/// With empty buffers the adapted values equal the model values.
class AdaptState {
 public:
  AdaptState(const SadModel &model, const AdaptationConfig &cfg);

  /// Appends a decided segment to the buffers, evicting the oldest entry
  /// beyond capacity. Speech segments also record their fused score.
  void Record(const Vector &zero_vector, SadLabel label, double fused_score);

  const Vector &w_sp() const { return w_sp_; }
  const Vector &w_nsp() const { return w_nsp_; }
  double threshold() const { return threshold_; }
  const std::deque<Vector> &sp_buffer() const { return sp_buffer_; }
  const std::deque<Vector> &nsp_buffer() const { return nsp_buffer_; }
  const std::deque<double> &sp_scores() const { return sp_scores_; }

 private:
  friend void Adapt(AdaptState *state, const SadModel &model,
                    const AdaptationConfig &cfg);

  size_t l_sp_, l_nsp_;
  std::deque<Vector> sp_buffer_, nsp_buffer_;
  std::deque<double> sp_scores_;
  Vector w_sp_, w_nsp_;
  double threshold_;
};

/// Recomputes the adapted values from the buffers:
///   w_sp  = (1 - alpha) w_sp_zero  + alpha * mean(sp_buffer)
///   w_nsp = (1 - alpha) w_nsp_zero + alpha * mean(nsp_buffer)
///   theta = (1 - beta)  theta_m    + beta  * mean(sp_scores)
/// An empty buffer leaves its quantity at the model value; a disabled
/// config resets everything to model values.
void Adapt(AdaptState *state, const SadModel &model, const AdaptationConfig &cfg);

/// The two segment representations compared against the model.
struct SegmentVectors {
  Vector zero_order;  // UBM2 posterior counts, L1-normalized
  Vector embedding;   // first hidden layer of the MLP on the UBM3 supervector
};

SegmentVectors ComputeSegmentVectors(std::span<const Vector> frames,
                                     const SadModel &model);

/// Scores `vectors`, fuses the two scores by averaging, labels speech iff
/// fused > current threshold, then records the segment and adapts.
Decision DecideSegment(const SegmentVectors &vectors, const SadModel &model,
                       AdaptState *state, const AdaptationConfig &cfg);

/// ComputeSegmentVectors + DecideSegment. `frames` holds between 1 and
/// segment_frames transformed frames (fewer only for the trailing segment).
/// Fills in the segment index and times.
Decision ProcessSegment(std::span<const Vector> frames, const SadModel &model,
                        AdaptState *state, const AdaptationConfig &cfg,
                        int64_t segment_index);

struct DetectorTimings {
  double features = 0.0;
  double lda = 0.0;
  double pca = 0.0;
  double scoring = 0.0;
};

/// Streaming detector for one audio stream. Decisions depend only on the
/// audio, never on how it was chunked.
class OnlineDetector {
 public:
  /// `model` must outlive the detector.
  OnlineDetector(const SadModel &model, const AdaptationConfig &cfg);

  void AcceptWaveform(std::span<const double> samples);
  /// Flushes lookahead; decides the trailing partial segment if it has at
  /// least half a segment of frames, otherwise folds it into the previous
  /// decision. The last decision is extended to the end of the audio.
  void InputFinished();

  const std::vector<Decision> &decisions() const { return decisions_; }
  const AdaptState &state() const { return state_; }
  DetectorTimings timings() const;

  /// Frames of lookahead past a segment's last frame before it can be
  /// decided (deltas plus both context stages).
  int LookaheadFrames() const;

 private:
  void Pump();
  void DecidePending();

  const SadModel &model_;
  AdaptationConfig cfg_;
  OnlineFeaturePipeline features_;
  OnlineContextTransform transform_;
  AdaptState state_;
  std::vector<Vector> pending_;
  int64_t next_segment_ = 0;
  std::vector<Decision> decisions_;
  bool finished_ = false;
  double features_seconds_ = 0.0;
  double scoring_seconds_ = 0.0;
};

/// Merges consecutive equal labels into segments covering the decisions.
/// With smoothing enabled, interior non-speech gaps shorter than min_gap
/// become speech, then speech runs shorter than min_speech become
/// non-speech.
std::vector<SegmentLabel> DecisionsToSegments(const std::vector<Decision> &decisions,
                                              const SmoothingConfig &smoothing);

struct DetectionResult {
  std::vector<Decision> trace;
  std::vector<SegmentLabel> segments;
};

/// Whole-stream detection. Throws DataError on a sample-rate mismatch or
/// audio shorter than one analysis window.
DetectionResult StreamDetect(const AudioStream &audio, const SadModel &model,
                             const AdaptationConfig &cfg,
                             const SmoothingConfig &smoothing);

/// CSV: index,start,end,zero_score,emb_score,fused_score,theta_adapted,label
void WriteTrace(const std::vector<Decision> &decisions, std::ostream &out);

}  // namespace olsad

#endif  // OLSAD_SAD_ENGINE_H_
