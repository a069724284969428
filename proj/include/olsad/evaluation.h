// include/olsad/evaluation.h

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

#ifndef OLSAD_EVALUATION_H_
#define OLSAD_EVALUATION_H_

#include <string>
#include <utility>
#include <vector>

#include "olsad/label-io.h"

namespace olsad {

/// Finite union of disjoint, sorted intervals. Endpoints carry no measure,
/// so open/closed distinctions are ignored.
class IntervalSet {
 public:
  IntervalSet() = default;

  /// Adds [start, end); empty or inverted intervals are ignored.
  void Add(double start, double end);

  IntervalSet Union(const IntervalSet &other) const;
  IntervalSet Intersect(const IntervalSet &other) const;
  IntervalSet Subtract(const IntervalSet &other) const;
  IntervalSet Clip(double start, double end) const;
  double Length() const;

  const std::vector<std::pair<double, double>> &intervals() const { return iv_; }
  bool operator==(const IntervalSet &) const = default;

 private:
  std::vector<std::pair<double, double>> iv_;
};

struct EvalConfig {
  double collar = 0.25;
  double fn_weight = 0.75;
  double fp_weight = 0.25;

  void Validate() const;
};

/// Partition of the scored part of a file into reference speech and
/// reference non-speech.
struct ScoringMask {
  IntervalSet scored_speech;
  IntervalSet scored_nonspeech;
};

/// Removes [b - collar, b + collar] around every reference speech boundary
/// (touching speech segments are merged first); time not covered by
/// reference speech is non-speech. Everything is clipped to
/// [0, file_duration].
ScoringMask ApplyCollar(const std::vector<SegmentLabel> &ref, double collar,
                        double file_duration);

/// Error and scored times for one file or a pooled set of files. The
/// probabilities and DCF are always derived from the stored times.
struct EvalReport {
  std::string name;
  double scored_speech = 0.0;
  double scored_nonspeech = 0.0;
  double missed = 0.0;
  double false_alarm = 0.0;
  double fn_weight = 0.75;
  double fp_weight = 0.25;
  std::vector<EvalReport> per_file;

  double p_fn() const { return missed / scored_speech; }
  double p_fp() const { return false_alarm / scored_nonspeech; }
  double dcf() const { return fn_weight * p_fn() + fp_weight * p_fp(); }
};

/// Speech time of a label list as an interval set.
IntervalSet SpeechIntervals(const std::vector<SegmentLabel> &segments);

/// Default duration when none comes from audio: max(ref end, hyp end).
double DefaultDuration(const std::vector<SegmentLabel> &ref,
                       const std::vector<SegmentLabel> &hyp);

/// Exact interval scoring. Throws DataError when there is no scored speech
/// or no scored non-speech.
EvalReport Score(const std::vector<SegmentLabel> &ref,
                 const std::vector<SegmentLabel> &hyp, const EvalConfig &cfg,
                 double file_duration, const std::string &name = "");

/// Pools times across reports; `per_file` of the result lists the inputs.
EvalReport Aggregate(const std::vector<EvalReport> &reports);

std::string FormatReportTable(const EvalReport &pooled);
/// `dcf=`, `p_fn=`, `p_fp=` lines for the pooled report followed by one
/// `file=<name> dcf=... p_fn=... p_fp=...` row per file.
std::string FormatReportKeyValue(const EvalReport &pooled);

}  // namespace olsad

#endif  // OLSAD_EVALUATION_H_
