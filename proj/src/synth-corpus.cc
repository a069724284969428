// src/synth-corpus.cc

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

#include "olsad/synth-corpus.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace olsad {

namespace {

constexpr double kPi = std::numbers::pi;

struct Background {
  double ar1, ar2, gain;
};

Background DrawBackground(Rng *rng) {
  Background b;
  b.ar1 = 0.6 + 0.3 * rng->Uniform();
  b.ar2 = -0.2 * rng->Uniform();
  b.gain = 0.02 + 0.08 * rng->Uniform();
  return b;
}

std::vector<double> MakeNoise(const Background &b, size_t n, Rng *rng) {
  std::vector<double> out(n);
  double y1 = 0.0, y2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double y = rng->Normal() + b.ar1 * y1 + b.ar2 * y2;
    y2 = y1;
    y1 = y;
    out[i] = b.gain * y;
  }
  return out;
}

double Power(const std::vector<double> &x, size_t b, size_t e) {
  double s = 0.0;
  for (size_t i = b; i < e; ++i) s += x[i] * x[i];
  return e > b ? s / static_cast<double>(e - b) : 0.0;
}

// Harmonic amplitude under three Gaussian formant bumps.
double FormantGain(double f, const double *formants) {
  double g = 0.02;
  for (int k = 0; k < 3; ++k) {
    const double bw = 80.0 + 40.0 * k;
    g += std::exp(-0.5 * (f - formants[k]) * (f - formants[k]) / (bw * bw)) / (k + 1.0);
  }
  return g;
}

// Syllable-like units of 120-300 ms, each with its own formants, f0 glide
// and a rise/fall envelope.
void AddVoicedRegion(std::vector<double> *speech, size_t b, size_t e, int sr, Rng *rng) {
  const double base_f0 = 100.0 + 120.0 * rng->Uniform();
  const double nyq = 0.45 * sr;
  double phase = 0.0;
  for (size_t sb = b; sb < e;) {
    size_t se = sb + static_cast<size_t>((0.12 + 0.18 * rng->Uniform()) * sr);
    if (se > e || e - se < static_cast<size_t>(0.06 * sr)) se = e;
    const double f_start = base_f0 * (0.85 + 0.3 * rng->Uniform());
    const double f_end = base_f0 * (0.85 + 0.3 * rng->Uniform());
    const double formants[3] = {300.0 + 500.0 * rng->Uniform(),
                                900.0 + 1200.0 * rng->Uniform(),
                                2200.0 + 1000.0 * rng->Uniform()};
    const double len = static_cast<double>(se - sb);
    for (size_t i = sb; i < se; ++i) {
      const double u = static_cast<double>(i - sb) / len;
      const double f = f_start + (f_end - f_start) * u;
      phase += 2.0 * kPi * f / sr;
      if (phase > 2.0 * kPi) phase -= 2.0 * kPi;
      double v = 0.0;
      for (int h = 1; h * f < nyq; ++h) v += FormantGain(h * f, formants) * std::sin(h * phase);
      (*speech)[i] = (0.25 + 0.75 * std::sin(kPi * u)) * v;
    }
    sb = se;
  }
}

}  // namespace

LabeledAudio GenerateSynthFile(const SynthConfig &cfg, std::uint64_t seed,
                               const std::string &name) {
  Rng rng(seed);
  const int sr = cfg.sample_rate;
  const int64_t total_ms = static_cast<int64_t>(std::llround(cfg.duration * 1000.0));
  const size_t n = static_cast<size_t>(total_ms) * sr / 1000;
  const Background bg = DrawBackground(&rng);
  const double snr_db = cfg.min_snr_db + (cfg.max_snr_db - cfg.min_snr_db) * rng.Uniform();

  LabeledAudio out;
  out.name = name;
  SadLabel cur = rng.Uniform() < 0.5 ? SadLabel::kSpeech : SadLabel::kNonSpeech;
  const int64_t lo = std::llround(cfg.min_region * 1000.0);
  const int64_t hi = std::llround(cfg.max_region * 1000.0);
  for (int64_t ms = 0; ms < total_ms;) {
    int64_t end = ms + lo + static_cast<int64_t>(rng.Below(hi - lo + 1));
    if (total_ms - end < lo) end = total_ms;
    out.labels.push_back({ms / 1000.0, end / 1000.0, cur});
    ms = end;
    cur = cur == SadLabel::kSpeech ? SadLabel::kNonSpeech : SadLabel::kSpeech;
  }

  std::vector<double> speech(n, 0.0);
  size_t sp_samples = 0;
  for (const SegmentLabel &seg : out.labels) {
    if (seg.label != SadLabel::kSpeech) continue;
    const size_t b = static_cast<size_t>(std::llround(seg.start * 1000.0)) * sr / 1000;
    const size_t e = static_cast<size_t>(std::llround(seg.end * 1000.0)) * sr / 1000;
    AddVoicedRegion(&speech, b, e, sr, &rng);
    sp_samples += e - b;
  }
  const std::vector<double> noise = MakeNoise(bg, n, &rng);
  const double p_speech = sp_samples ? Power(speech, 0, n) * n / sp_samples : 0.0;
  const double p_noise = Power(noise, 0, n);
  const double scale =
      p_speech > 0.0 ? std::sqrt(p_noise * std::pow(10.0, snr_db / 10.0) / p_speech) : 0.0;

  out.audio.sample_rate = sr;
  out.audio.samples.resize(n);
  for (size_t i = 0; i < n; ++i) out.audio.samples[i] = noise[i] + scale * speech[i];
  double peak = 0.0;
  for (double s : out.audio.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.95)
    for (double &s : out.audio.samples) s *= 0.95 / peak;
  return out;
}

LabeledAudio GenerateBackgroundFile(const SynthConfig &cfg, std::uint64_t seed,
                                    const std::string &name) {
  Rng rng(seed);
  const int64_t total_ms = static_cast<int64_t>(std::llround(cfg.duration * 1000.0));
  const size_t n = static_cast<size_t>(total_ms) * cfg.sample_rate / 1000;
  const Background bg = DrawBackground(&rng);
  LabeledAudio out;
  out.name = name;
  out.audio.sample_rate = cfg.sample_rate;
  out.audio.samples = MakeNoise(bg, n, &rng);
  out.labels.push_back({0.0, total_ms / 1000.0, SadLabel::kNonSpeech});
  return out;
}

std::vector<LabeledAudio> GenerateSynthCorpus(const SynthConfig &cfg, int n_files,
                                              std::uint64_t seed,
                                              const std::string &prefix) {
  std::vector<LabeledAudio> out;
  Rng seeds(seed);
  for (int i = 0; i < n_files; ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "%s%03d", prefix.c_str(), i);
    out.push_back(GenerateSynthFile(cfg, seeds.Next(), name));
  }
  return out;
}

std::vector<ManifestEntry> WriteCorpus(const std::vector<LabeledAudio> &files,
                                       const std::string &dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<ManifestEntry> out;
  for (const LabeledAudio &f : files) {
    const std::string wav = (fs::path(dir) / (f.name + ".wav")).string();
    const std::string lab = (fs::path(dir) / (f.name + ".lab")).string();
    WriteWav(f.audio, wav);
    WriteLabels(f.labels, lab);
    out.push_back({wav, lab});
  }
  return out;
}

void WriteManifest(const std::vector<ManifestEntry> &entries, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ": cannot write manifest");
  for (const ManifestEntry &e : entries) out << e.audio_path << '\t' << e.label_path << '\n';
}

}  // namespace olsad
