// include/olsad/mfcc.h

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

#ifndef OLSAD_MFCC_H_
#define OLSAD_MFCC_H_

#include <deque>
#include <memory>
#include <span>
#include <vector>

#include "olsad/common.h"
#include "olsad/wave-io.h"

namespace olsad {

class RealFft;

struct FeatureConfig {
  double window_length = 0.025;  // seconds
  double hop = 0.010;            // seconds
  int n_mfcc = 12;               // C0 is not included
  double mel_low = 150.0;        // Hz
  double mel_high = 0.0;         // Hz; <= 0 means Nyquist
  int n_mel_filters = 23;
  double cmn_window = 1.0;  // seconds
  int delta_window = 2;     // frames on each side
  double pre_emphasis = 0.97;

  int WindowSamples(int sample_rate) const;
  int HopSamples(int sample_rate) const;
  int CmnFrames() const;
  double MelHigh(int sample_rate) const;
  /// Output dimension after deltas: 3 * n_mfcc.
  int FeatureDim() const { return 3 * n_mfcc; }

  /// Throws std::invalid_argument when the config cannot be used at
  /// `sample_rate`.
  void Validate(int sample_rate) const;

  bool operator==(const FeatureConfig &) const = default;
};

double MelScale(double hz);
double InverseMelScale(double mel);

/// Per-frame MFCC computation: pre-emphasis, Hamming window, magnitude
/// spectrum, triangular mel filterbank, log, DCT-II keeping coefficients
/// 1..n_mfcc.
class MfccComputer {
 public:
  MfccComputer(const FeatureConfig &cfg, int sample_rate);
  ~MfccComputer();
  MfccComputer(MfccComputer &&) noexcept;
  MfccComputer &operator=(MfccComputer &&) noexcept;

  int WindowSamples() const { return window_samples_; }
  int HopSamples() const { return hop_samples_; }
  int FftSize() const;
  int sample_rate() const { return sample_rate_; }

  /// floor((n - window) / hop) + 1, or 0 when n < window.
  int64_t NumFrames(size_t num_samples) const;

  /// `window` must hold exactly WindowSamples() samples.
  Vector Compute(std::span<const double> window) const;
  Vector LogMelEnergies(std::span<const double> window) const;

  /// Center frequency (Hz) of each mel filter.
  std::vector<double> FilterCenters() const;

 private:
  Vector MelEnergies(std::span<const double> window) const;

  FeatureConfig cfg_;
  int sample_rate_;
  int window_samples_;
  int hop_samples_;
  std::unique_ptr<RealFft> fft_;
  Vector hamming_;
  // Filter m covers FFT bins [first_bin_[m], first_bin_[m] + weights_[m].size()).
  std::vector<int> first_bin_;
  std::vector<Vector> weights_;
  Matrix dct_;  // n_mfcc x n_mel_filters
};

/// Static MFCCs for every full window of `audio`. Throws
/// std::invalid_argument if the audio is shorter than one window.
FrameSequence ExtractMfcc(const AudioStream &audio, const FeatureConfig &cfg);

/// Causal sliding-window mean normalization: each frame has the mean of the
/// last min(CmnFrames(), frames so far) frames (itself included) subtracted.
class SlidingCmn {
 public:
  explicit SlidingCmn(int window_frames);
  Vector Apply(const Vector &frame);

 private:
  int window_frames_;
  std::deque<Vector> history_;
};

FrameSequence ApplyCmn(const FrameSequence &frames, const FeatureConfig &cfg);

/// Regression deltas over +-`window` frames with edge replication; `get`
/// returns the frame at an index already clamped to the valid range and
/// `clamp` maps an arbitrary index into it. Returns [x, delta, delta-delta].
/// Delta-deltas apply the same regression to the (edge-replicated) deltas.
template <class Get, class Clamp>
Vector DeltaFeaturesAt(Get &&get, Clamp &&clamp, int64_t t, int window) {
  double denom = 0.0;
  for (int k = 1; k <= window; ++k) denom += 2.0 * k * k;
  auto delta = [&](int64_t j) {
    Vector acc = Vector::Zero(get(clamp(j)).size());
    for (int k = 1; k <= window; ++k)
      acc += static_cast<double>(k) * (get(clamp(j + k)) - get(clamp(j - k)));
    return Vector(acc / denom);
  };
  const Vector &x = get(clamp(t));
  const int64_t d = x.size();
  Vector acc = Vector::Zero(d);
  for (int k = 1; k <= window; ++k)
    acc += static_cast<double>(k) * (delta(clamp(t + k)) - delta(clamp(t - k)));
  Vector out(3 * d);
  out.head(d) = x;
  out.segment(d, d) = delta(t);
  out.tail(d) = acc / denom;
  return out;
}

FrameSequence AppendDeltas(const FrameSequence &frames, const FeatureConfig &cfg);

}  // namespace olsad

#endif  // OLSAD_MFCC_H_
