// src/online-features.cc

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

#include "olsad/online-features.h"

namespace olsad {

OnlineFeaturePipeline::OnlineFeaturePipeline(const FeatureConfig &cfg,
                                             int sample_rate)
    : cfg_(cfg),
      mfcc_(cfg, sample_rate),
      cmn_(cfg.CmnFrames()),
      deltas_(2 * cfg.delta_window, 2 * cfg.delta_window) {}

void OnlineFeaturePipeline::AcceptWaveform(std::span<const double> samples) {
  pending_.insert(pending_.end(), samples.begin(), samples.end());
  samples_received_ += static_cast<int64_t>(samples.size());
  const size_t window = mfcc_.WindowSamples();
  const size_t hop = mfcc_.HopSamples();
  size_t offset = 0;
  while (pending_.size() - offset >= window) {
    std::span<const double> frame(pending_.data() + offset, window);
    deltas_.Push(cmn_.Apply(mfcc_.Compute(frame)));
    ++frames_computed_;
    offset += hop;
  }
  if (offset > 0)
    pending_.erase(pending_.begin(),
                   pending_.begin() + static_cast<std::ptrdiff_t>(std::min(offset, pending_.size())));
  Drain();
}

void OnlineFeaturePipeline::InputFinished() {
  deltas_.Finish();
  Drain();
}

void OnlineFeaturePipeline::Drain() {
  auto get = [this](int64_t j) -> const Vector & { return deltas_.At(j); };
  auto clamp = [this](int64_t j) { return deltas_.Clamp(j); };
  while (deltas_.Ready()) {
    ready_.push_back(DeltaFeaturesAt(get, clamp, deltas_.next(), cfg_.delta_window));
    deltas_.Advance();
  }
}

Vector OnlineFeaturePipeline::PopFrame() {
  Vector v = std::move(ready_.front());
  ready_.pop_front();
  return v;
}

}  // namespace olsad
