// src/mfcc.cc

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

#include "olsad/mfcc.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.h"

namespace olsad {

int FeatureConfig::WindowSamples(int sample_rate) const {
  return static_cast<int>(std::lround(window_length * sample_rate));
}

int FeatureConfig::HopSamples(int sample_rate) const {
  return static_cast<int>(std::lround(hop * sample_rate));
}

int FeatureConfig::CmnFrames() const {
  return std::max(1, static_cast<int>(std::lround(cmn_window / hop)));
}

double FeatureConfig::MelHigh(int sample_rate) const {
  return mel_high > 0.0 ? mel_high : 0.5 * sample_rate;
}

void FeatureConfig::Validate(int sample_rate) const {
  auto fail = [](const std::string &what) {
    throw std::invalid_argument("FeatureConfig: " + what);
  };
  if (sample_rate <= 0) fail("sample rate must be positive");
  if (!(hop > 0.0) || !(hop <= window_length)) fail("need 0 < hop <= window_length");
  if (HopSamples(sample_rate) < 1) fail("hop shorter than one sample");
  if (!(mel_low >= 0.0) || !(mel_low < MelHigh(sample_rate)) ||
      MelHigh(sample_rate) > 0.5 * sample_rate)
    fail("need 0 <= mel_low < mel_high <= sample_rate / 2");
  if (n_mfcc < 1 || n_mfcc > n_mel_filters) fail("need 1 <= n_mfcc <= n_mel_filters");
  if (!(cmn_window > 0.0)) fail("cmn_window must be positive");
  if (delta_window < 1) fail("delta_window must be >= 1");
  if (!(pre_emphasis >= 0.0 && pre_emphasis < 1.0)) fail("pre_emphasis must be in [0, 1)");
}

double MelScale(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }

double InverseMelScale(double mel) { return 700.0 * (std::exp(mel / 1127.0) - 1.0); }

MfccComputer::MfccComputer(const FeatureConfig &cfg, int sample_rate)
    : cfg_(cfg), sample_rate_(sample_rate) {
  cfg.Validate(sample_rate);
  window_samples_ = cfg.WindowSamples(sample_rate);
  hop_samples_ = cfg.HopSamples(sample_rate);
  int fft_size = 1;
  while (fft_size < window_samples_) fft_size <<= 1;
  fft_ = std::make_unique<RealFft>(fft_size);

  hamming_.resize(window_samples_);
  for (int n = 0; n < window_samples_; ++n)
    hamming_[n] = window_samples_ > 1
                      ? 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n /
                                                (window_samples_ - 1))
                      : 1.0;

  const int num_bins = fft_size / 2 + 1;
  const double mel_low = MelScale(cfg.mel_low);
  const double mel_high = MelScale(cfg.MelHigh(sample_rate));
  const double mel_delta = (mel_high - mel_low) / (cfg.n_mel_filters + 1);
  first_bin_.resize(cfg.n_mel_filters);
  weights_.resize(cfg.n_mel_filters);
  for (int m = 0; m < cfg.n_mel_filters; ++m) {
    const double left = mel_low + m * mel_delta;
    const double center = left + mel_delta;
    const double right = center + mel_delta;
    std::vector<double> w;
    int first = -1;
    for (int k = 0; k < num_bins; ++k) {
      const double mel = MelScale(static_cast<double>(k) * sample_rate / fft_size);
      if (mel > left && mel < right) {
        const double weight = mel <= center ? (mel - left) / (center - left)
                                            : (right - mel) / (right - center);
        if (first < 0) first = k;
        // Bins inside a filter are contiguous.
        w.resize(k - first + 1, 0.0);
        w[k - first] = weight;
      }
    }
    if (first < 0)
      throw std::invalid_argument("MfccComputer: mel filter " + std::to_string(m) +
                                  " covers no FFT bins; reduce n_mel_filters");
    first_bin_[m] = first;
    weights_[m] = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
  }

  const int n = cfg.n_mel_filters;
  dct_.resize(cfg.n_mfcc, n);
  const double scale = std::sqrt(2.0 / n);
  for (int i = 0; i < cfg.n_mfcc; ++i)
    for (int j = 0; j < n; ++j)
      dct_(i, j) = scale * std::cos(std::numbers::pi * (i + 1) * (j + 0.5) / n);
}

MfccComputer::~MfccComputer() = default;
MfccComputer::MfccComputer(MfccComputer &&) noexcept = default;
MfccComputer &MfccComputer::operator=(MfccComputer &&) noexcept = default;

int MfccComputer::FftSize() const { return fft_->size(); }

int64_t MfccComputer::NumFrames(size_t num_samples) const {
  if (num_samples < static_cast<size_t>(window_samples_)) return 0;
  return static_cast<int64_t>((num_samples - window_samples_) / hop_samples_) + 1;
}

Vector MfccComputer::MelEnergies(std::span<const double> window) const {
  if (static_cast<int>(window.size()) != window_samples_)
    throw std::invalid_argument("MfccComputer: window has wrong length");
  std::vector<double> frame(window_samples_);
  const double k = cfg_.pre_emphasis;
  for (int n = window_samples_ - 1; n >= 0; --n) {
    const double prev = n > 0 ? window[n - 1] : window[0];
    frame[n] = (window[n] - k * prev) * hamming_[n];
  }
  std::vector<double> mag;
  fft_->Magnitudes(frame, &mag);
  Vector energies(static_cast<Eigen::Index>(weights_.size()));
  for (size_t m = 0; m < weights_.size(); ++m) {
    double e = 0.0;
    for (Eigen::Index i = 0; i < weights_[m].size(); ++i)
      e += weights_[m][i] * mag[first_bin_[m] + i];
    energies[static_cast<Eigen::Index>(m)] = e;
  }
  return energies;
}

Vector MfccComputer::LogMelEnergies(std::span<const double> window) const {
  return MelEnergies(window).unaryExpr(
      [](double e) { return std::log(std::max(e, 1e-10)); });
}

Vector MfccComputer::Compute(std::span<const double> window) const {
  return dct_ * LogMelEnergies(window);
}

std::vector<double> MfccComputer::FilterCenters() const {
  const double mel_low = MelScale(cfg_.mel_low);
  const double mel_high = MelScale(cfg_.MelHigh(sample_rate_));
  const double mel_delta = (mel_high - mel_low) / (cfg_.n_mel_filters + 1);
  std::vector<double> centers(cfg_.n_mel_filters);
  for (int m = 0; m < cfg_.n_mel_filters; ++m)
    centers[m] = InverseMelScale(mel_low + (m + 1) * mel_delta);
  return centers;
}

FrameSequence ExtractMfcc(const AudioStream &audio, const FeatureConfig &cfg) {
  MfccComputer mfcc(cfg, audio.sample_rate);
  const int64_t n_frames = mfcc.NumFrames(audio.samples.size());
  if (n_frames == 0)
    throw std::invalid_argument("ExtractMfcc: audio shorter than one window");
  FrameSequence frames;
  frames.reserve(static_cast<size_t>(n_frames));
  std::span<const double> samples(audio.samples);
  for (int64_t t = 0; t < n_frames; ++t)
    frames.push_back(
        mfcc.Compute(samples.subspan(t * mfcc.HopSamples(), mfcc.WindowSamples())));
  return frames;
}

SlidingCmn::SlidingCmn(int window_frames) : window_frames_(window_frames) {
  if (window_frames < 1) throw std::invalid_argument("SlidingCmn: window must be >= 1");
}

Vector SlidingCmn::Apply(const Vector &frame) {
  history_.push_back(frame);
  if (static_cast<int>(history_.size()) > window_frames_) history_.pop_front();
  // Summed afresh each frame so the result does not depend on history.
  Vector sum = Vector::Zero(frame.size());
  for (const Vector &h : history_) sum += h;
  return frame - sum / static_cast<double>(history_.size());
}

FrameSequence ApplyCmn(const FrameSequence &frames, const FeatureConfig &cfg) {
  SlidingCmn cmn(cfg.CmnFrames());
  FrameSequence out;
  out.reserve(frames.size());
  for (const Vector &f : frames) out.push_back(cmn.Apply(f));
  return out;
}

FrameSequence AppendDeltas(const FrameSequence &frames, const FeatureConfig &cfg) {
  const int64_t n = static_cast<int64_t>(frames.size());
  FrameSequence out;
  out.reserve(frames.size());
  auto get = [&](int64_t j) -> const Vector & { return frames[j]; };
  auto clamp = [n](int64_t j) { return ClampIndex(j, n); };
  for (int64_t t = 0; t < n; ++t)
    out.push_back(DeltaFeaturesAt(get, clamp, t, cfg.delta_window));
  return out;
}

}  // namespace olsad
