// include/olsad/wave-io.h

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

#ifndef OLSAD_WAVE_IO_H_
#define OLSAD_WAVE_IO_H_

#include <string>
#include <vector>

namespace olsad {

/// Mono PCM signal with samples normalized to [-1, 1].
struct AudioStream {
  int sample_rate = 0;
  std::vector<double> samples;

  double Duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

inline constexpr int kMinSampleRate = 8000;

/// Reads a RIFF/WAVE file holding mono 16-bit PCM. Samples are divided by
/// 32768. Throws DataError naming the offending property for unsupported
/// encodings, multi-channel input, truncated data or an empty data chunk.
AudioStream ReadWav(const std::string &path);

/// Parses WAV bytes already in memory; `name` is used in error messages.
AudioStream ParseWav(const std::string &bytes, const std::string &name);

/// Writes mono 16-bit PCM. Samples are scaled by 32768, rounded and clipped.
void WriteWav(const AudioStream &audio, const std::string &path);

std::string EncodeWav(const AudioStream &audio);

}  // namespace olsad

#endif  // OLSAD_WAVE_IO_H_
