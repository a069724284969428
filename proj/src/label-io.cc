// src/label-io.cc

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

#include "olsad/label-io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>

namespace olsad {

namespace {

double ParseTime(const std::string &field, const std::string &where) {
  double value = 0.0;
  const char *first = field.data();
  const char *last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    throw DataError(where + ": bad time value '" + field + "'");
  return value;
}

}  // namespace

void ValidateSegments(const std::vector<SegmentLabel> &segments,
                      const std::string &name) {
  for (size_t i = 0; i < segments.size(); ++i) {
    const SegmentLabel &s = segments[i];
    if (!(s.start >= 0.0) || !(s.end > s.start))
      throw DataError(name + ": invalid segment [" + std::to_string(s.start) +
                      ", " + std::to_string(s.end) + ")");
    if (i > 0 && s.start < segments[i - 1].end)
      throw DataError(name + ": overlapping segments at " +
                      std::to_string(s.start) + " s");
  }
}

std::vector<SegmentLabel> ParseLabels(std::istream &in, const std::string &name) {
  std::vector<SegmentLabel> segments;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = name + ":" + std::to_string(line_no);
    const size_t tab1 = line.find('\t');
    const size_t tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos || line.find('\t', tab2 + 1) != std::string::npos)
      throw DataError(where + ": expected start<TAB>end<TAB>label");
    SegmentLabel seg;
    seg.start = ParseTime(line.substr(0, tab1), where);
    seg.end = ParseTime(line.substr(tab1 + 1, tab2 - tab1 - 1), where);
    const std::string token = line.substr(tab2 + 1);
    if (token == "speech")
      seg.label = SadLabel::kSpeech;
    else if (token == "non-speech")
      seg.label = SadLabel::kNonSpeech;
    else
      throw DataError(where + ": unknown label '" + token + "'");
    if (!(seg.start >= 0.0) || !(seg.end > seg.start))
      throw DataError(where + ": end must be greater than start");
    segments.push_back(seg);
  }
  std::stable_sort(segments.begin(), segments.end(),
                   [](const SegmentLabel &a, const SegmentLabel &b) {
                     return a.start < b.start;
                   });
  ValidateSegments(segments, name);
  return segments;
}

std::vector<SegmentLabel> ReadLabels(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open label file");
  return ParseLabels(in, path);
}

std::string FormatLabels(const std::vector<SegmentLabel> &segments) {
  std::string out;
  char buf[96];
  for (const SegmentLabel &s : segments) {
    std::snprintf(buf, sizeof(buf), "%.3f\t%.3f\t%s\n", s.start, s.end,
                  LabelName(s.label));
    out += buf;
  }
  return out;
}

void WriteLabels(const std::vector<SegmentLabel> &segments,
                 const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path + ": cannot open for writing");
  out << FormatLabels(segments);
  if (!out) throw DataError(path + ": write failed");
}

}  // namespace olsad
