// include/olsad/online-features.h

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

#ifndef OLSAD_ONLINE_FEATURES_H_
#define OLSAD_ONLINE_FEATURES_H_

#include <deque>
#include <span>
#include <vector>

#include "olsad/frame-window.h"
#include "olsad/mfcc.h"

namespace olsad {

/// Streaming front-end producing MFCC + delta + delta-delta frames (CMN
/// applied to the statics) from audio delivered in arbitrary chunks. The
/// output is identical to
///   AppendDeltas(ApplyCmn(ExtractMfcc(audio)))
/// regardless of how the audio is chunked.
class OnlineFeaturePipeline {
 public:
  OnlineFeaturePipeline(const FeatureConfig &cfg, int sample_rate);

  void AcceptWaveform(std::span<const double> samples);
  /// Flushes the delta lookahead using edge replication.
  void InputFinished();

  bool FrameReady() const { return !ready_.empty(); }
  Vector PopFrame();

  int Dim() const { return cfg_.FeatureDim(); }
  /// Frames of lookahead past the frame being emitted.
  int LookaheadFrames() const { return 2 * cfg_.delta_window; }
  int64_t FramesComputed() const { return frames_computed_; }
  int64_t SamplesReceived() const { return samples_received_; }
  const MfccComputer &mfcc() const { return mfcc_; }

 private:
  void Drain();

  FeatureConfig cfg_;
  MfccComputer mfcc_;
  SlidingCmn cmn_;
  FrameWindow deltas_;
  std::vector<double> pending_;  // samples not yet fully consumed
  int64_t samples_received_ = 0;
  int64_t frames_computed_ = 0;
  std::deque<Vector> ready_;
};

}  // namespace olsad

#endif  // OLSAD_ONLINE_FEATURES_H_
