// src/sad-engine.cc

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

#include "olsad/sad-engine.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "olsad/embeddings.h"

namespace olsad {

namespace {

double Cosine(const Vector &a, const Vector &b) {
  const double c = a.dot(b) / (a.norm() * b.norm());
  return std::clamp(c, -1.0, 1.0);
}

double SecondsSince(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

}  // namespace

double ScoreVector(const Vector &w_test, const Vector &w_sp, const Vector &w_nsp) {
  if (w_test.size() != w_sp.size() || w_test.size() != w_nsp.size())
    throw std::invalid_argument("ScoreVector: dimension mismatch");
  if (w_test.squaredNorm() == 0.0 || w_sp.squaredNorm() == 0.0 ||
      w_nsp.squaredNorm() == 0.0)
    throw std::invalid_argument("ScoreVector: zero-norm vector");
  return Cosine(w_test, w_sp) - Cosine(w_test, w_nsp);
}

AdaptState::AdaptState(const SadModel &model, const AdaptationConfig &cfg)
    : l_sp_(static_cast<size_t>(cfg.l_sp)),
      l_nsp_(static_cast<size_t>(cfg.l_nsp)),
      w_sp_(model.w_sp_zero),
      w_nsp_(model.w_nsp_zero),
      threshold_(model.theta_m) {
  cfg.Validate();
}

void AdaptState::Record(const Vector &zero_vector, SadLabel label, double fused_score) {
  if (label == SadLabel::kSpeech) {
    sp_buffer_.push_back(zero_vector);
    sp_scores_.push_back(fused_score);
    if (sp_buffer_.size() > l_sp_) sp_buffer_.pop_front();
    if (sp_scores_.size() > l_sp_) sp_scores_.pop_front();
  } else {
    nsp_buffer_.push_back(zero_vector);
    if (nsp_buffer_.size() > l_nsp_) nsp_buffer_.pop_front();
  }
}

void Adapt(AdaptState *state, const SadModel &model, const AdaptationConfig &cfg) {
  if (!cfg.enabled) {
    state->w_sp_ = model.w_sp_zero;
    state->w_nsp_ = model.w_nsp_zero;
    state->threshold_ = model.theta_m;
    return;
  }
  auto blend = [](const Vector &model_vec, const std::deque<Vector> &buffer,
                  double weight) -> Vector {
    if (buffer.empty()) return model_vec;
    Vector sum = Vector::Zero(model_vec.size());
    for (const Vector &v : buffer) sum += v;
    return (1.0 - weight) * model_vec + (weight / static_cast<double>(buffer.size())) * sum;
  };
  state->w_sp_ = blend(model.w_sp_zero, state->sp_buffer_, cfg.alpha);
  state->w_nsp_ = blend(model.w_nsp_zero, state->nsp_buffer_, cfg.alpha);
  if (state->sp_scores_.empty()) {
    state->threshold_ = model.theta_m;
  } else {
    double sum = 0.0;
    for (double s : state->sp_scores_) sum += s;
    state->threshold_ = (1.0 - cfg.beta) * model.theta_m +
                        (cfg.beta / static_cast<double>(state->sp_scores_.size())) * sum;
  }
}

SegmentVectors ComputeSegmentVectors(std::span<const Vector> frames,
                                     const SadModel &model) {
  if (frames.empty()) throw std::invalid_argument("ComputeSegmentVectors: no frames");
  SegmentVectors v;
  v.zero_order = ZeroOrderStats(frames, model.ubm2);
  v.zero_order /= v.zero_order.sum();
  v.embedding = ExtractEmbedding(MakeSupervector(AccumulateStats(frames, model.ubm3)),
                                 model.mlp);
  return v;
}

Decision DecideSegment(const SegmentVectors &vectors, const SadModel &model,
                       AdaptState *state, const AdaptationConfig &cfg) {
  Decision d;
  d.zero_score = ScoreVector(vectors.zero_order, state->w_sp(), state->w_nsp());
  // A segment whose embedding is entirely rectified away carries no evidence.
  d.emb_score = vectors.embedding.squaredNorm() > 0.0
                    ? ScoreVector(vectors.embedding, model.w_sp_emb, model.w_nsp_emb)
                    : 0.0;
  d.fused_score = (d.zero_score + d.emb_score) / 2.0;
  for (double s : {d.zero_score, d.emb_score, d.fused_score})
    if (!(s >= -2.0 && s <= 2.0))
      throw std::logic_error("DecideSegment: score " + std::to_string(s) +
                             " outside [-2, 2]");
  d.threshold = state->threshold();
  d.label = d.fused_score > d.threshold ? SadLabel::kSpeech : SadLabel::kNonSpeech;
  if (cfg.enabled) state->Record(vectors.zero_order, d.label, d.fused_score);
  Adapt(state, model, cfg);
  return d;
}

Decision ProcessSegment(std::span<const Vector> frames, const SadModel &model,
                        AdaptState *state, const AdaptationConfig &cfg,
                        int64_t segment_index) {
  if (frames.empty() || static_cast<int>(frames.size()) > model.segment_frames)
    throw std::invalid_argument("ProcessSegment: need 1.." +
                                std::to_string(model.segment_frames) + " frames");
  Decision d = DecideSegment(ComputeSegmentVectors(frames, model), model, state, cfg);
  const int64_t hop = model.feature_cfg.HopSamples(model.sample_rate);
  const int64_t first = segment_index * model.segment_frames;
  d.segment_index = segment_index;
  d.start = static_cast<double>(first * hop) / model.sample_rate;
  d.end = static_cast<double>((first + static_cast<int64_t>(frames.size())) * hop) /
          model.sample_rate;
  return d;
}

OnlineDetector::OnlineDetector(const SadModel &model, const AdaptationConfig &cfg)
    : model_(model),
      cfg_(cfg),
      features_(model.feature_cfg, model.sample_rate),
      transform_(model.lda, model.lda_context, model.pca, model.pca_context),
      state_(model, cfg) {
  model.Validate();
}

int OnlineDetector::LookaheadFrames() const {
  return features_.LookaheadFrames() + transform_.LookaheadFrames();
}

void OnlineDetector::AcceptWaveform(std::span<const double> samples) {
  if (finished_) throw std::logic_error("OnlineDetector: input already finished");
  const auto start = std::chrono::steady_clock::now();
  features_.AcceptWaveform(samples);
  features_seconds_ += SecondsSince(start);
  Pump();
}

void OnlineDetector::Pump() {
  while (features_.FrameReady()) {
    transform_.Accept(features_.PopFrame());
    while (transform_.FrameReady()) {
      pending_.push_back(transform_.PopFrame());
      if (static_cast<int>(pending_.size()) == model_.segment_frames) DecidePending();
    }
  }
}

void OnlineDetector::DecidePending() {
  const auto start = std::chrono::steady_clock::now();
  decisions_.push_back(ProcessSegment(pending_, model_, &state_, cfg_, next_segment_++));
  pending_.clear();
  scoring_seconds_ += SecondsSince(start);
}

void OnlineDetector::InputFinished() {
  if (finished_) return;
  finished_ = true;
  const auto start = std::chrono::steady_clock::now();
  features_.InputFinished();
  features_seconds_ += SecondsSince(start);
  Pump();
  transform_.InputFinished();
  while (transform_.FrameReady()) {
    pending_.push_back(transform_.PopFrame());
    if (static_cast<int>(pending_.size()) == model_.segment_frames) DecidePending();
  }
  if (!pending_.empty()) {
    if (2 * static_cast<int>(pending_.size()) >= model_.segment_frames || decisions_.empty())
      DecidePending();
    else
      pending_.clear();
  }
  if (!decisions_.empty()) {
    const double duration =
        static_cast<double>(features_.SamplesReceived()) / model_.sample_rate;
    decisions_.back().end = std::max(decisions_.back().end, duration);
  }
}

DetectorTimings OnlineDetector::timings() const {
  DetectorTimings t;
  t.features = features_seconds_;
  t.lda = transform_.lda_seconds();
  t.pca = transform_.pca_seconds();
  t.scoring = scoring_seconds_;
  return t;
}

namespace {

std::vector<SegmentLabel> MergeRuns(const std::vector<SegmentLabel> &runs) {
  std::vector<SegmentLabel> out;
  for (const SegmentLabel &r : runs) {
    if (!out.empty() && out.back().label == r.label)
      out.back().end = r.end;
    else
      out.push_back(r);
  }
  return out;
}

}  // namespace

std::vector<SegmentLabel> DecisionsToSegments(const std::vector<Decision> &decisions,
                                              const SmoothingConfig &smoothing) {
  std::vector<SegmentLabel> runs;
  for (const Decision &d : decisions) runs.push_back({d.start, d.end, d.label});
  runs = MergeRuns(runs);
  if (!smoothing.enabled) return runs;

  constexpr double kEps = 1e-9;
  for (size_t i = 1; i + 1 < runs.size(); ++i) {
    SegmentLabel &r = runs[i];
    if (r.label == SadLabel::kNonSpeech && runs[i - 1].label == SadLabel::kSpeech &&
        runs[i + 1].label == SadLabel::kSpeech && r.end - r.start < smoothing.min_gap - kEps)
      r.label = SadLabel::kSpeech;
  }
  runs = MergeRuns(runs);
  for (SegmentLabel &r : runs)
    if (r.label == SadLabel::kSpeech && r.end - r.start < smoothing.min_speech - kEps)
      r.label = SadLabel::kNonSpeech;
  return MergeRuns(runs);
}

DetectionResult StreamDetect(const AudioStream &audio, const SadModel &model,
                             const AdaptationConfig &cfg,
                             const SmoothingConfig &smoothing) {
  if (audio.sample_rate != model.sample_rate)
    throw DataError("sample rate mismatch: audio is " + std::to_string(audio.sample_rate) +
                    " Hz, model expects " + std::to_string(model.sample_rate) + " Hz");
  if (audio.samples.size() <
      static_cast<size_t>(model.feature_cfg.WindowSamples(model.sample_rate)))
    throw DataError("audio too short for one analysis window");
  OnlineDetector detector(model, cfg);
  detector.AcceptWaveform(audio.samples);
  detector.InputFinished();
  DetectionResult result;
  result.trace = detector.decisions();
  result.segments = DecisionsToSegments(result.trace, smoothing);
  return result;
}

void WriteTrace(const std::vector<Decision> &decisions, std::ostream &out) {
  out << "index,start,end,zero_score,emb_score,fused_score,theta_adapted,label\n";
  char buf[256];
  for (const Decision &d : decisions) {
    std::snprintf(buf, sizeof(buf), "%lld,%.3f,%.3f,%.9g,%.9g,%.9g,%.9g,%s\n",
                  static_cast<long long>(d.segment_index), d.start, d.end, d.zero_score,
                  d.emb_score, d.fused_score, d.threshold, LabelName(d.label));
    out << buf;
  }
}

}  // namespace olsad
