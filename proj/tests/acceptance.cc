// tests/acceptance.cc

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

// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failed criteria (capped at 1).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "olsad/diag-gmm.h"
#include "olsad/evaluation.h"
#include "olsad/label-io.h"
#include "olsad/mfcc.h"
#include "olsad/mlp.h"
#include "olsad/sad-engine.h"
#include "olsad/sad-model.h"
#include "olsad/synth-corpus.h"
#include "olsad/trainer.h"
#include "oracles.h"
#include "test-util.h"

namespace olsad {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failed = 0;

void Report(const std::string &name, const std::function<Outcome()> &check) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception &e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++g_failed;
  std::printf("%s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
              Seconds(t0));
  std::fflush(stdout);
}

std::string Fmt(const char *fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

// Shared state for the end-to-end run.
struct E2e {
  std::vector<LabeledAudio> corpus;
  std::string bundle;
  std::vector<DetectionResult> detections;  // held-out files
};

constexpr int kFiles = 30;
constexpr int kTrainFiles = 25;

TrainConfig E2eConfig() {
  TrainConfig cfg;
  cfg.calibrate_theta = true;
  cfg.seed = 1;
  return cfg;
}

void TrainAndDetect(const std::vector<LabeledAudio> &corpus, std::string *bundle,
                    std::vector<DetectionResult> *detections) {
  const std::vector<LabeledAudio> train(corpus.begin(), corpus.begin() + kTrainFiles);
  *bundle = SerializeSadModel(TrainFromCorpus(E2eConfig(), train, {}));
  const SadModel model = DeserializeSadModel(*bundle);
  detections->clear();
  for (int i = kTrainFiles; i < kFiles; ++i)
    detections->push_back(StreamDetect(corpus[i].audio, model, model.adaptation, SmoothingConfig()));
}

Outcome EndToEnd(E2e *e2e) {
  e2e->corpus = GenerateSynthCorpus(SynthConfig(), kFiles, 1);
  const auto t0 = Clock::now();
  TrainAndDetect(e2e->corpus, &e2e->bundle, &e2e->detections);
  const double secs = Seconds(t0);
  std::vector<EvalReport> reports;
  for (int i = kTrainFiles; i < kFiles; ++i) {
    const LabeledAudio &f = e2e->corpus[i];
    reports.push_back(Score(f.labels, e2e->detections[i - kTrainFiles].segments, EvalConfig(),
                            f.audio.Duration(), f.name));
  }
  const EvalReport pooled = Aggregate(reports);
  return {pooled.dcf() < 0.05 && secs < 600.0,
          Fmt("pooled DCF %.2f%% (P_FN %.2f%%, P_FP %.2f%%)", 100 * pooled.dcf(),
              100 * pooled.p_fn(), 100 * pooled.p_fp()) +
              Fmt(", train+detect %.0f s", secs)};
}

std::vector<SegmentLabel> RandomLabels(Rng *rng, double duration) {
  std::vector<SegmentLabel> out;
  int64_t ms = static_cast<int64_t>(rng->Below(500));
  const int64_t end = static_cast<int64_t>(duration * 1000);
  while (ms < end) {
    const int64_t len = 50 + static_cast<int64_t>(rng->Below(3000));
    const int64_t stop = std::min(end, ms + len);
    out.push_back({ms / 1000.0, stop / 1000.0,
                   rng->Uniform() < 0.6 ? SadLabel::kSpeech : SadLabel::kNonSpeech});
    ms = stop + static_cast<int64_t>(rng->Below(2)) * static_cast<int64_t>(rng->Below(800));
  }
  return out;
}

Outcome DcfOracle() {
  Rng rng(2024);
  const EvalConfig cfg;
  int checked = 0, bad = 0;
  double worst = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    const double duration = 20.0 + rng.Below(40);
    const auto ref = RandomLabels(&rng, duration);
    const auto hyp = RandomLabels(&rng, duration);
    const oracle::GridResult g = oracle::GridScore(ref, hyp, cfg.collar, duration);
    if (g.scored_speech <= 0 || g.scored_nonspeech <= 0) continue;
    const EvalReport r = Score(ref, hyp, cfg, duration);
    const double tol = 0.002 * static_cast<double>(2 * (ref.size() + hyp.size()));
    const double err = std::max(std::abs(r.missed - g.missed),
                                std::abs(r.false_alarm - g.false_alarm));
    worst = std::max(worst, err);
    ++checked;
    if (err > tol || std::abs(r.scored_speech - g.scored_speech) > tol ||
        std::abs(r.scored_nonspeech - g.scored_nonspeech) > tol)
      ++bad;
  }
  const EvalReport fx = Score({{2.0, 5.0, SadLabel::kSpeech}}, {{2.5, 5.0, SadLabel::kSpeech}},
                              cfg, 10.0);
  const bool fixture = std::abs(fx.dcf() - 0.075) <= 1e-15;
  return {checked == 100 && bad == 0 && fixture,
          Fmt("%.0f/100 pairs within tolerance, worst error-time gap %.4f s", checked - bad, worst) +
              Fmt(", fixture DCF %.17g", fx.dcf())};
}

Outcome EmMonotone() {
  Rng rng(77);
  int violations = 0;
  double worst = 0.0;
  for (int d = 0; d < 20; ++d) {
    const int c = d % 2 ? 32 : 2;
    const int n = 3000;
    const int clusters = 1 + static_cast<int>(rng.Below(6));
    Matrix centers(clusters, 24);
    for (int k = 0; k < clusters; ++k)
      for (int j = 0; j < 24; ++j) centers(k, j) = 4.0 * rng.Normal();
    Matrix data(n, 24);
    for (int i = 0; i < n; ++i) {
      const int k = static_cast<int>(rng.Below(clusters));
      for (int j = 0; j < 24; ++j) data(i, j) = centers(k, j) + (0.5 + j % 3) * rng.Normal();
    }
    GmmTrainOptions o;
    o.n_components = c;
    o.n_iters = 15;
    o.seed = d;
    const auto ll = TrainGmmWithHistory(data, o).log_likelihoods;
    for (size_t i = 1; i < ll.size(); ++i) {
      const double drop = (ll[i - 1] - ll[i]) / std::abs(ll[i - 1]);
      worst = std::max(worst, drop);
      if (drop > 1e-8) ++violations;
    }
  }
  return {violations == 0,
          Fmt("%.0f violations over 20 datasets, worst relative decrease %.3g", violations, worst)};
}

std::vector<double> Signal(int kind, int sr, double seconds, Rng *rng) {
  const int n = static_cast<int>(seconds * sr);
  std::vector<double> x(n);
  const double f0 = 200.0 + 150.0 * kind, f1 = 0.45 * sr - 100.0 * kind;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sr;
    switch (kind % 3) {
      case 0:
        x[i] = 0.5 * std::sin(2 * std::numbers::pi * f0 * t);
        break;
      case 1:
        x[i] = 0.4 * std::sin(2 * std::numbers::pi * (f0 * t + 0.5 * (f1 - f0) * t * t / seconds));
        break;
      default:
        x[i] = 0.1 * (kind + 1) * rng->Normal();
    }
  }
  return x;
}

Outcome MfccOracle() {
  Rng rng(5);
  const FeatureConfig cfg;
  double worst = 0.0;
  size_t frames = 0;
  for (int s = 0; s < 10; ++s) {
    AudioStream a;
    a.sample_rate = s % 2 ? 16000 : 8000;
    a.samples = Signal(s, a.sample_rate, 0.5, &rng);
    const FrameSequence got = ExtractMfcc(a, cfg);
    const auto want = oracle::DirectMfccFrames(a.samples, a.sample_rate, cfg);
    if (got.size() != want.size()) return {false, "frame count mismatch"};
    for (size_t t = 0; t < got.size(); ++t)
      for (int i = 0; i < cfg.n_mfcc; ++i) worst = std::max(worst, std::abs(got[t][i] - want[t][i]));
    frames += got.size();
  }
  return {worst < 1e-4, Fmt("max |diff| %.3g over %.0f frames of 10 signals", worst, frames)};
}

Outcome GradientCheck() {
  const MlpModel m = MlpModel::Random({12, 9, 7, 5, 2}, 31);
  Rng rng(6);
  Matrix x(40, 12);
  std::vector<SadLabel> y;
  for (int i = 0; i < 40; ++i) {
    y.push_back(i % 2 ? SadLabel::kSpeech : SadLabel::kNonSpeech);
    for (int j = 0; j < 12; ++j) x(i, j) = rng.Normal() + (i % 2 ? 0.7 : -0.7);
  }
  const auto grads = CrossEntropyGradients(m, x, y);
  const double h = 1e-5;
  double worst = 0.0;
  int params = 0;
  for (int l = 0; l < m.NumLayers(); ++l) {
    auto check = [&](auto get, double analytic) {
      MlpModel p = m, q = m;
      get(p) += h;
      get(q) -= h;
      const double numeric = (CrossEntropy(p, x, y) - CrossEntropy(q, x, y)) / (2 * h);
      const double denom = std::max(1e-8, std::abs(numeric) + std::abs(analytic));
      worst = std::max(worst, std::abs(numeric - analytic) / denom);
      ++params;
    };
    const MlpLayer &g = grads[l];
    for (int i = 0; i < g.weights.rows(); ++i)
      for (int j = 0; j < g.weights.cols(); ++j)
        check([&](MlpModel &mm) -> double & { return mm.mutable_layers()[l].weights(i, j); },
              g.weights(i, j));
    for (int i = 0; i < g.bias.size(); ++i)
      check([&](MlpModel &mm) -> double & { return mm.mutable_layers()[l].bias[i]; }, g.bias[i]);
  }
  return {worst < 1e-4, Fmt("worst relative error %.3g over %.0f parameters", worst, params)};
}

Outcome AdaptationIdentities(const E2e &e2e) {
  const SadModel model = DeserializeSadModel(e2e.bundle);
  AdaptationConfig zero = model.adaptation, off = model.adaptation;
  zero.alpha = zero.beta = 0.0;
  off.enabled = false;
  int files = 0, differ = 0;
  for (int i = kTrainFiles; i < kFiles; ++i) {
    const AudioStream &a = e2e.corpus[i].audio;
    const DetectionResult r0 = StreamDetect(a, model, zero, SmoothingConfig());
    const DetectionResult r1 = StreamDetect(a, model, off, SmoothingConfig());
    ++files;
    if (!(r0.trace == r1.trace) || !(r0.segments == r1.segments)) ++differ;
  }

  // alpha = 1 with single-entry buffers returns the buffered vector exactly.
  AdaptationConfig full = model.adaptation;
  full.alpha = 1.0;
  full.beta = 1.0;
  full.l_sp = full.l_nsp = 1;
  AdaptState s(model, full);
  Rng rng(9);
  bool exact = true;
  for (int k = 0; k < 20; ++k) {
    Vector v(model.w_sp_zero.size());
    for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = rng.Uniform();
    const SadLabel label = k % 3 ? SadLabel::kSpeech : SadLabel::kNonSpeech;
    const double score = rng.Uniform() - 0.5;
    s.Record(v, label, score);
    Adapt(&s, model, full);
    if (label == SadLabel::kSpeech) {
      exact = exact && s.w_sp() == v && s.threshold() == score;
    } else {
      exact = exact && s.w_nsp() == v;
    }
  }
  return {differ == 0 && exact,
          Fmt("alpha=beta=0 vs off identical on %.0f/%.0f files", files - differ, files) +
              (exact ? ", alpha=1 single buffer exact" : ", alpha=1 single buffer MISMATCH")};
}

Outcome StreamingEquivalence(const E2e &e2e) {
  const SadModel model = DeserializeSadModel(e2e.bundle);
  const AudioStream &a = e2e.corpus[kTrainFiles].audio;
  const auto whole = StreamDetect(a, model, model.adaptation, SmoothingConfig()).trace;
  Rng rng(12);
  int same = 0;
  for (int p = 0; p < 20; ++p) {
    // Alternate tiny, medium and very uneven chunk regimes.
    const size_t scale = p % 4 == 0 ? 16 : p % 4 == 1 ? 900 : p % 4 == 2 ? 50000 : 0;
    OnlineDetector det(model, model.adaptation);
    size_t pos = 0;
    while (pos < a.samples.size()) {
      size_t n = scale ? 1 + rng.Below(scale) : (rng.Uniform() < 0.8 ? 1 + rng.Below(5) : 1 + rng.Below(40000));
      n = std::min(n, a.samples.size() - pos);
      det.AcceptWaveform(std::span<const double>(a.samples.data() + pos, n));
      pos += n;
    }
    det.InputFinished();
    if (det.decisions() == whole) ++same;
  }
  return {same == 20, Fmt("%.0f/20 partitions bit-identical over %.0f decisions", same, whole.size())};
}

Outcome ScoreRange(const E2e &e2e) {
  int violations = 0;
  size_t n = 0;
  for (const DetectionResult &r : e2e.detections)
    for (const Decision &d : r.trace)
      for (double s : {d.zero_score, d.emb_score, d.fused_score}) {
        ++n;
        if (!(s >= -2.0 && s <= 2.0)) ++violations;
      }
  return {violations == 0 && n > 0, Fmt("%.0f violations among %.0f scores", violations, n)};
}

Outcome Performance(const E2e &e2e) {
  const SadModel model = DeserializeSadModel(e2e.bundle);
  SynthConfig sc;
  sc.duration = 600.0;
  const AudioStream a = GenerateSynthFile(sc, 4242, "long").audio;
  const size_t chunk = static_cast<size_t>(0.1 * a.sample_rate);
  const int hop = model.feature_cfg.HopSamples(a.sample_rate);
  const int win = model.feature_cfg.WindowSamples(a.sample_rate);
  OnlineDetector det(model, model.adaptation);
  const int look = det.LookaheadFrames();
  const int seg = model.segment_frames;
  int cadence_errors = 0;
  const auto t0 = Clock::now();
  for (size_t pos = 0; pos < a.samples.size(); pos += chunk) {
    const size_t n = std::min(chunk, a.samples.size() - pos);
    det.AcceptWaveform(std::span<const double>(a.samples.data() + pos, n));
    const int64_t have = pos + n;
    const int64_t frames = have < win ? 0 : (have - win) / hop + 1;
    const int64_t expect = frames < seg + look ? 0 : (frames - seg - look) / seg + 1;
    if (static_cast<int64_t>(det.decisions().size()) != expect) ++cadence_errors;
  }
  det.InputFinished();
  const double wall = Seconds(t0);
  const auto &d = det.decisions();
  const int64_t total_frames = (static_cast<int64_t>(a.samples.size()) - win) / hop + 1;
  const int64_t expect_total = total_frames / seg + (total_frames % seg >= (seg + 1) / 2 ? 1 : 0);
  if (static_cast<int64_t>(d.size()) != expect_total) ++cadence_errors;
  for (size_t i = 0; i < d.size(); ++i) {
    if (std::abs(d[i].start - 0.1 * i) > 1e-9) ++cadence_errors;
    if (i + 1 < d.size() && std::abs(d[i].end - d[i].start - 0.1) > 1e-9) ++cadence_errors;
  }
  const double rtf = wall / a.Duration();
  return {rtf < 0.1 && cadence_errors == 0,
          Fmt("RTF %.4f on %.0f s, %.0f decisions", rtf, a.Duration(), d.size()) +
              Fmt(", %.0f cadence errors", cadence_errors)};
}

std::string LabelBytes(const std::vector<DetectionResult> &dets) {
  std::ostringstream out;
  for (const DetectionResult &r : dets) out << FormatLabels(r.segments) << "--\n";
  return out.str();
}

Outcome Determinism(const E2e &e2e) {
  std::string bundle;
  std::vector<DetectionResult> dets;
  TrainAndDetect(e2e.corpus, &bundle, &dets);
  const bool same_bundle = bundle == e2e.bundle;
  const bool same_labels = LabelBytes(dets) == LabelBytes(e2e.detections);
  return {same_bundle && same_labels,
          std::string("bundle ") + (same_bundle ? "identical" : "DIFFERS") + Fmt(" (%.0f bytes)", bundle.size()) +
              ", labels " + (same_labels ? "identical" : "DIFFER")};
}

}  // namespace
}  // namespace olsad

int main() {
  using namespace olsad;
  E2e e2e;
  Report("dcf-oracle-equivalence", DcfOracle);
  Report("em-monotonicity", EmMonotone);
  Report("mfcc-oracle", MfccOracle);
  Report("mlp-gradient-check", GradientCheck);
  Report("end-to-end-synthetic-dcf", [&] { return EndToEnd(&e2e); });
  Report("adaptation-identities", [&] { return AdaptationIdentities(e2e); });
  Report("streaming-equivalence", [&] { return StreamingEquivalence(e2e); });
  Report("score-range", [&] { return ScoreRange(e2e); });
  Report("performance-rtf-cadence", [&] { return Performance(e2e); });
  Report("determinism", [&] { return Determinism(e2e); });
  std::printf("%d criteria failed\n", g_failed);
  return g_failed ? 1 : 0;
}
