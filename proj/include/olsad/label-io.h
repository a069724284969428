// include/olsad/label-io.h

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

#ifndef OLSAD_LABEL_IO_H_
#define OLSAD_LABEL_IO_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "olsad/common.h"

namespace olsad {

/// Half-open interval [start, end) in seconds carrying a speech/non-speech
/// label.
struct SegmentLabel {
  double start = 0.0;
  double end = 0.0;
  SadLabel label = SadLabel::kNonSpeech;

  bool operator==(const SegmentLabel &) const = default;
};

/// Checks 0 <= start < end, sortedness and non-overlap. Throws DataError.
void ValidateSegments(const std::vector<SegmentLabel> &segments,
                      const std::string &name);

/// Parses `start<TAB>end<TAB>label` lines. Blank lines are skipped. Output
/// is sorted by start time; overlapping segments, inverted intervals and
/// unknown label tokens are rejected with DataError.
std::vector<SegmentLabel> ParseLabels(std::istream &in, const std::string &name);
std::vector<SegmentLabel> ReadLabels(const std::string &path);

/// Formats segments as `%.3f\t%.3f\t(speech|non-speech)\n` lines.
std::string FormatLabels(const std::vector<SegmentLabel> &segments);
void WriteLabels(const std::vector<SegmentLabel> &segments,
                 const std::string &path);

}  // namespace olsad

#endif  // OLSAD_LABEL_IO_H_
