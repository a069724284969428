// src/evaluation.cc

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

#include "olsad/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace olsad {

void IntervalSet::Add(double start, double end) {
  if (!(end > start)) return;
  IntervalSet single;
  single.iv_.push_back({start, end});
  *this = Union(single);
}

IntervalSet IntervalSet::Union(const IntervalSet &other) const {
  std::vector<std::pair<double, double>> all = iv_;
  all.insert(all.end(), other.iv_.begin(), other.iv_.end());
  std::sort(all.begin(), all.end());
  IntervalSet out;
  for (const auto &iv : all) {
    if (!out.iv_.empty() && iv.first <= out.iv_.back().second)
      out.iv_.back().second = std::max(out.iv_.back().second, iv.second);
    else
      out.iv_.push_back(iv);
  }
  return out;
}

IntervalSet IntervalSet::Intersect(const IntervalSet &other) const {
  IntervalSet out;
  size_t i = 0, j = 0;
  while (i < iv_.size() && j < other.iv_.size()) {
    const double lo = std::max(iv_[i].first, other.iv_[j].first);
    const double hi = std::min(iv_[i].second, other.iv_[j].second);
    if (hi > lo) out.iv_.push_back({lo, hi});
    if (iv_[i].second < other.iv_[j].second)
      ++i;
    else
      ++j;
  }
  return out;
}

IntervalSet IntervalSet::Subtract(const IntervalSet &other) const {
  IntervalSet out;
  size_t j = 0;
  for (const auto &[s, e] : iv_) {
    double cur = s;
    while (j < other.iv_.size() && other.iv_[j].second <= cur) ++j;
    size_t k = j;
    while (k < other.iv_.size() && other.iv_[k].first < e) {
      if (other.iv_[k].first > cur) out.iv_.push_back({cur, other.iv_[k].first});
      cur = std::max(cur, other.iv_[k].second);
      if (cur >= e) break;
      ++k;
    }
    if (cur < e) out.iv_.push_back({cur, e});
  }
  return out;
}

IntervalSet IntervalSet::Clip(double start, double end) const {
  IntervalSet window;
  window.Add(start, end);
  return Intersect(window);
}

double IntervalSet::Length() const {
  double total = 0.0;
  for (const auto &[s, e] : iv_) total += e - s;
  return total;
}

void EvalConfig::Validate() const {
  if (!(collar >= 0.0)) throw std::invalid_argument("EvalConfig: collar must be >= 0");
  if (!(fn_weight >= 0.0 && fp_weight >= 0.0) ||
      std::abs(fn_weight + fp_weight - 1.0) > 1e-12)
    throw std::invalid_argument("EvalConfig: weights must be non-negative and sum to 1");
}

IntervalSet SpeechIntervals(const std::vector<SegmentLabel> &segments) {
  IntervalSet s;
  for (const SegmentLabel &seg : segments)
    if (seg.label == SadLabel::kSpeech) s.Add(seg.start, seg.end);
  return s;
}

ScoringMask ApplyCollar(const std::vector<SegmentLabel> &ref, double collar,
                        double file_duration) {
  const IntervalSet speech = SpeechIntervals(ref).Clip(0.0, file_duration);
  IntervalSet all;
  all.Add(0.0, file_duration);
  IntervalSet excluded;
  if (collar > 0.0) {
    for (const auto &[s, e] : speech.intervals()) {
      excluded.Add(s - collar, s + collar);
      excluded.Add(e - collar, e + collar);
    }
  }
  ScoringMask mask;
  mask.scored_speech = speech.Subtract(excluded);
  mask.scored_nonspeech = all.Subtract(speech).Subtract(excluded);
  return mask;
}

double DefaultDuration(const std::vector<SegmentLabel> &ref,
                       const std::vector<SegmentLabel> &hyp) {
  double d = 0.0;
  for (const auto &s : ref) d = std::max(d, s.end);
  for (const auto &s : hyp) d = std::max(d, s.end);
  return d;
}

EvalReport Score(const std::vector<SegmentLabel> &ref,
                 const std::vector<SegmentLabel> &hyp, const EvalConfig &cfg,
                 double file_duration, const std::string &name) {
  cfg.Validate();
  const ScoringMask mask = ApplyCollar(ref, cfg.collar, file_duration);
  const IntervalSet hyp_speech = SpeechIntervals(hyp).Clip(0.0, file_duration);
  EvalReport r;
  r.name = name;
  r.fn_weight = cfg.fn_weight;
  r.fp_weight = cfg.fp_weight;
  r.scored_speech = mask.scored_speech.Length();
  r.scored_nonspeech = mask.scored_nonspeech.Length();
  r.missed = mask.scored_speech.Subtract(hyp_speech).Length();
  r.false_alarm = mask.scored_nonspeech.Intersect(hyp_speech).Length();
  const std::string who = name.empty() ? std::string("score") : name;
  if (!(r.scored_speech > 0.0))
    throw DataError(who + ": no scored speech, P_FN is undefined");
  if (!(r.scored_nonspeech > 0.0))
    throw DataError(who + ": no scored non-speech, P_FP is undefined");
  return r;
}

EvalReport Aggregate(const std::vector<EvalReport> &reports) {
  if (reports.empty()) throw std::invalid_argument("Aggregate: no reports");
  EvalReport pooled;
  pooled.name = "pooled";
  pooled.fn_weight = reports[0].fn_weight;
  pooled.fp_weight = reports[0].fp_weight;
  for (const EvalReport &r : reports) {
    pooled.scored_speech += r.scored_speech;
    pooled.scored_nonspeech += r.scored_nonspeech;
    pooled.missed += r.missed;
    pooled.false_alarm += r.false_alarm;
    EvalReport flat = r;
    flat.per_file.clear();
    pooled.per_file.push_back(std::move(flat));
  }
  if (!(pooled.scored_speech > 0.0) || !(pooled.scored_nonspeech > 0.0))
    throw DataError("Aggregate: pooled reports have no scored speech or non-speech");
  return pooled;
}

namespace {

std::string Row(const EvalReport &r, const std::string &name) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-24s %8.3f %8.3f %9.3f %9.3f %7.2f%% %7.2f%% %7.2f%%\n",
                name.c_str(), r.scored_speech, r.scored_nonspeech, r.missed,
                r.false_alarm, 100.0 * r.p_fn(), 100.0 * r.p_fp(), 100.0 * r.dcf());
  return buf;
}

}  // namespace

std::string FormatReportTable(const EvalReport &pooled) {
  char head[256];
  std::snprintf(head, sizeof(head), "%-24s %8s %8s %9s %9s %8s %8s %8s\n", "file",
                "speech", "nonsp", "missed", "false_al", "P_FN", "P_FP", "DCF");
  std::string out = head;
  for (const EvalReport &r : pooled.per_file) out += Row(r, r.name);
  out += Row(pooled, "POOLED");
  return out;
}

std::string FormatReportKeyValue(const EvalReport &pooled) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "dcf=%.6g\np_fn=%.6g\np_fp=%.6g\nscored_speech=%.3f\n"
                "scored_nonspeech=%.3f\nmissed=%.3f\nfalse_alarm=%.3f\n",
                pooled.dcf(), pooled.p_fn(), pooled.p_fp(), pooled.scored_speech,
                pooled.scored_nonspeech, pooled.missed, pooled.false_alarm);
  std::string out = buf;
  for (const EvalReport &r : pooled.per_file) {
    std::snprintf(buf, sizeof(buf), "file=%s dcf=%.6g p_fn=%.6g p_fp=%.6g\n",
                  r.name.c_str(), r.dcf(), r.p_fn(), r.p_fp());
    out += buf;
  }
  return out;
}

}  // namespace olsad
