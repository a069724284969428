// include/olsad/synth-corpus.h

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

#ifndef OLSAD_SYNTH_CORPUS_H_
#define OLSAD_SYNTH_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "olsad/label-io.h"
#include "olsad/trainer.h"
#include "olsad/wave-io.h"

namespace olsad {

/// Two-class test corpus labeled by construction. The "speech" class is a
/// voiced harmonic source shaped by formant resonances and amplitude
/// modulated at a syllabic rate; the background is stationary coloured
/// noise present throughout the file.
struct SynthConfig {
  int sample_rate = 8000;
  double duration = 60.0;   // seconds
  double min_region = 1.0;  // seconds
  double max_region = 4.0;
  double min_snr_db = 0.0;  // per-file SNR drawn uniformly from this range
  double max_snr_db = 20.0;
};

/// Deterministic in (cfg, seed). Region boundaries fall on whole
/// milliseconds.
LabeledAudio GenerateSynthFile(const SynthConfig &cfg, std::uint64_t seed,
                               const std::string &name = "synth");

/// Background noise only, labeled non-speech throughout.
LabeledAudio GenerateBackgroundFile(const SynthConfig &cfg, std::uint64_t seed,
                                    const std::string &name = "background");

/// Files named <prefix>NNN, seeds derived from `seed`.
std::vector<LabeledAudio> GenerateSynthCorpus(const SynthConfig &cfg, int n_files,
                                              std::uint64_t seed,
                                              const std::string &prefix = "synth");

/// Writes <dir>/<name>.wav and <dir>/<name>.lab for each file and returns
/// the manifest entries.
std::vector<ManifestEntry> WriteCorpus(const std::vector<LabeledAudio> &files,
                                       const std::string &dir);
void WriteManifest(const std::vector<ManifestEntry> &entries, const std::string &path);

}  // namespace olsad

#endif  // OLSAD_SYNTH_CORPUS_H_
