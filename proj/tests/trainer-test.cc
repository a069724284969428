// tests/trainer-test.cc

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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "olsad/evaluation.h"
#include "olsad/sad-engine.h"
#include "olsad/synth-corpus.h"
#include "olsad/trainer.h"
#include "test-util.h"

namespace olsad {
namespace {

constexpr SadLabel kSp = SadLabel::kSpeech;
constexpr SadLabel kNsp = SadLabel::kNonSpeech;

TEST(FrameLabels, Examples) {
  const auto all = FrameLabels({{0.0, 10.0, kSp}}, 50, 0.01, 0.025);
  for (SadLabel l : all) EXPECT_EQ(l, kSp);
  // Frame 4 centre = 0.0525; a boundary there belongs to the later segment.
  const auto tie = FrameLabels({{0.0, 0.0525, kNsp}, {0.0525, 1.0, kSp}}, 10, 0.01, 0.025);
  EXPECT_EQ(tie[3], kNsp);
  EXPECT_EQ(tie[4], kSp);
  const auto gap = FrameLabels({{0.2, 0.3, kSp}}, 40, 0.01, 0.025);
  EXPECT_EQ(gap[0], kNsp);
  EXPECT_EQ(gap[39], kNsp);
}

TEST(FrameLabels, MatchesPointQuery) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<SegmentLabel> labels;
    int64_t ms = 0;
    while (ms < 20000) {
      const int64_t len = 5 + static_cast<int64_t>(rng.Below(900));
      labels.push_back({ms / 1000.0, (ms + len) / 1000.0, rng.Uniform() < 0.5 ? kSp : kNsp});
      ms += len + static_cast<int64_t>(rng.Below(2)) * static_cast<int64_t>(rng.Below(300));
    }
    const auto got = FrameLabels(labels, 2000, 0.01, 0.025);
    for (int t = 0; t < 2000; ++t) {
      const double c = t * 0.01 + 0.0125;
      SadLabel want = kNsp;
      for (const auto &s : labels)
        if (s.start <= c && c < s.end) want = s.label;
      EXPECT_EQ(got[t], want) << t;
    }
  }
}

TEST(Manifest, ParsesAndResolves) {
  testing::TempDir dir;
  {
    std::ofstream m(dir.File("m.tsv"));
    m << "# comment\n\na.wav\ta.lab\n/abs/b.wav\t/abs/b.lab\n";
  }
  const auto e = ReadManifest(dir.File("m.tsv"));
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].audio_path, dir.File("a.wav"));
  EXPECT_EQ(e[1].label_path, "/abs/b.lab");
  {
    std::ofstream m(dir.File("bad.tsv"));
    m << "only-one-column\n";
  }
  EXPECT_THROW(ReadManifest(dir.File("bad.tsv")), DataError);
  EXPECT_THROW(ReadManifest(dir.File("missing.tsv")), DataError);
}

TEST(Config, ParseOverrideAndValidate) {
  TrainConfig cfg;
  std::istringstream in("ubm1_size = 16  # small\nalpha=0.5\nmlp_hidden=32,16\ntheta_m=auto\n");
  ParseConfig(in, &cfg);
  EXPECT_EQ(cfg.ubm1_size, 16);
  EXPECT_EQ(cfg.adaptation.alpha, 0.5);
  EXPECT_EQ(cfg.mlp_hidden, (std::vector<int>{32, 16}));
  EXPECT_TRUE(cfg.calibrate_theta);
  SetConfigValue(&cfg, "theta_m", "0.3");
  EXPECT_FALSE(cfg.calibrate_theta);
  EXPECT_EQ(cfg.theta_m, 0.3);
  EXPECT_THROW(SetConfigValue(&cfg, "nonsense", "1"), std::invalid_argument);
  EXPECT_THROW(SetConfigValue(&cfg, "lda_dim", "x"), std::invalid_argument);
  cfg.lda_dim = 2 * cfg.ubm1_size;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
  // Formatting and re-parsing reproduces the config.
  TrainConfig a;
  a.seed = 12345;
  a.adaptation.beta = 0.2;
  TrainConfig b;
  std::istringstream text(FormatConfig(a));
  ParseConfig(text, &b);
  EXPECT_EQ(FormatConfig(b), FormatConfig(a));
  const TrainConfig defaults;
  EXPECT_EQ(defaults.ubm1_size, 32);
  EXPECT_EQ(defaults.ubm2_per_class_size, 64);
  EXPECT_EQ(defaults.ubm3_size, 32);
  EXPECT_EQ(defaults.lda_dim, 12);
  EXPECT_EQ(defaults.pca_dim, 24);
  EXPECT_EQ(defaults.mlp_epochs, 30);
  EXPECT_EQ(defaults.theta_m, 0.25);
}

TEST(CalibrateThreshold, MinimizesWeightedError) {
  EXPECT_DOUBLE_EQ(CalibrateThreshold({0.5, 0.6}, {-0.5, -0.4}), 0.05);
  // Brute force over a fine grid never beats the returned threshold.
  Rng rng(4);
  std::vector<double> sp, nsp;
  for (int i = 0; i < 300; ++i) {
    sp.push_back(0.2 + 0.3 * rng.Normal());
    nsp.push_back(-0.2 + 0.3 * rng.Normal());
  }
  auto cost = [&](double th) {
    double fn = 0, fp = 0;
    for (double s : sp) fn += !(s > th);
    for (double s : nsp) fp += s > th;
    return 0.75 * fn / sp.size() + 0.25 * fp / nsp.size();
  };
  const double th = CalibrateThreshold(sp, nsp);
  for (double g = -2.0; g <= 2.0; g += 0.001) EXPECT_LE(cost(th), cost(g) + 1e-12);
  EXPECT_THROW(CalibrateThreshold({}, {1.0}), std::invalid_argument);
}

TEST(Train, TwoFileCorpusEndToEnd) {
  SynthConfig sc;
  const auto corpus = GenerateSynthCorpus(sc, 3, 2024);
  const std::vector<LabeledAudio> train(corpus.begin(), corpus.begin() + 2);
  TrainConfig cfg;
  cfg.calibrate_theta = true;
  cfg.seed = 5;
  std::vector<std::string> log;
  TrainReport rep;
  const SadModel m =
      TrainFromCorpus(cfg, train, {corpus[2]}, [&](const std::string &l) { log.push_back(l); }, &rep);
  EXPECT_EQ(rep.stages.size(), 13u);  // includes calibrate-theta
  EXPECT_EQ(rep.mlp_train_loss.size(), 31u);
  EXPECT_EQ(rep.mlp_monitor_loss.size(), 31u);
  EXPECT_LT(rep.DroppedFraction(), 0.05);
  EXPECT_EQ(m.mlp.selected_epoch(), 30);
  const DetectionResult r = StreamDetect(corpus[2].audio, m, m.adaptation, SmoothingConfig());
  const EvalReport e = Score(corpus[2].labels, r.segments, EvalConfig(), corpus[2].audio.Duration());
  EXPECT_LT(e.dcf(), 0.05) << FormatReportKeyValue(Aggregate({e}));
}

TEST(Train, DeterministicBundles) {
  SynthConfig sc;
  sc.duration = 15.0;
  const auto corpus = GenerateSynthCorpus(sc, 2, 7);
  const TrainConfig cfg = testing::QuickConfig();
  EXPECT_EQ(SerializeSadModel(TrainFromCorpus(cfg, corpus, {})),
            SerializeSadModel(TrainFromCorpus(cfg, corpus, {})));
}

TEST(Train, SpeechOnlyFailsAtStageSeven) {
  SynthConfig sc;
  sc.duration = 15.0;
  auto corpus = GenerateSynthCorpus(sc, 2, 8);
  for (auto &f : corpus) f.labels = {{0.0, sc.duration, kSp}};
  try {
    TrainFromCorpus(testing::QuickConfig(), corpus, {});
    FAIL();
  } catch (const DataError &e) {
    EXPECT_NE(std::string(e.what()).find("stage 7"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("class absent"), std::string::npos) << e.what();
  }
}

TEST(Train, MissingLabelFileNamed) {
  testing::TempDir dir;
  SynthConfig sc;
  sc.duration = 2.0;
  auto entries = WriteCorpus(GenerateSynthCorpus(sc, 1, 1), dir.path());
  entries[0].label_path = dir.File("nope.lab");
  TrainConfig cfg = testing::QuickConfig();
  cfg.manifest = entries;
  try {
    Train(cfg);
    FAIL();
  } catch (const DataError &e) {
    EXPECT_NE(std::string(e.what()).find("nope.lab"), std::string::npos);
  }
}

TEST(SynthCorpus, DeterministicAndLabeled) {
  SynthConfig sc;
  sc.duration = 30.0;
  const LabeledAudio a = GenerateSynthFile(sc, 3), b = GenerateSynthFile(sc, 3);
  EXPECT_EQ(a.audio.samples, b.audio.samples);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.audio.samples.size(), 240000u);
  EXPECT_NO_THROW(ValidateSegments(a.labels, "synth"));
  EXPECT_EQ(a.labels.back().end, 30.0);
  for (size_t i = 0; i + 1 < a.labels.size(); ++i) {
    EXPECT_EQ(a.labels[i].end, a.labels[i + 1].start);
    EXPECT_NE(a.labels[i].label, a.labels[i + 1].label);
    EXPECT_GE(a.labels[i].end - a.labels[i].start, 1.0 - 1e-9);
  }
}

}  // namespace
}  // namespace olsad
