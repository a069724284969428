// tools/olsad.cc

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

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "olsad/evaluation.h"
#include "olsad/sad-engine.h"
#include "olsad/trainer.h"

namespace fs = std::filesystem;
using namespace olsad;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

// Thrown for bad invocations detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string Stem(const std::string &path) { return fs::path(path).stem().string(); }

void RequireFile(const std::string &path, const std::string &what) {
  if (!fs::is_regular_file(path)) throw UsageError(what + " not found: " + path);
}

void RequireDir(const std::string &path, const std::string &what) {
  if (!fs::is_directory(path)) throw UsageError(what + " is not a directory: " + path);
}

uint64_t Fnv1a(const std::string &s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ---- train

struct TrainArgs {
  std::string manifest, config, out, monitor, log_file;
  std::vector<std::string> overrides;
  int64_t seed = -1;
  bool quiet = false;
};

int RunTrain(const TrainArgs &a) {
  RequireFile(a.manifest, "manifest");
  if (!a.config.empty()) RequireFile(a.config, "config file");
  if (!a.monitor.empty()) RequireFile(a.monitor, "monitor manifest");
  TrainConfig cfg;
  try {
    if (!a.config.empty()) ReadConfigFile(a.config, &cfg);
    for (const std::string &kv : a.overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value");
      SetConfigValue(&cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (a.seed >= 0) cfg.seed = static_cast<uint64_t>(a.seed);
    cfg.Validate();
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
  cfg.manifest = ReadManifest(a.manifest);
  if (!a.monitor.empty()) cfg.monitor_manifest = ReadManifest(a.monitor);
  // Every referenced file must exist before training starts.
  for (const auto *list : {&cfg.manifest, &cfg.monitor_manifest})
    for (const ManifestEntry &e : *list) {
      if (!fs::is_regular_file(e.audio_path))
        throw DataError("audio file not found: " + e.audio_path);
      if (!fs::is_regular_file(e.label_path))
        throw DataError("label file not found: " + e.label_path);
    }
  const fs::path out_dir = fs::path(a.out).parent_path();
  if (!out_dir.empty() && !fs::is_directory(out_dir))
    throw UsageError("output directory does not exist: " + out_dir.string());

  std::ofstream log_out;
  if (!a.log_file.empty()) {
    log_out.open(a.log_file);
    if (!log_out) throw UsageError("cannot write log file: " + a.log_file);
  }
  auto log = [&](const std::string &line) {
    if (!a.quiet) std::cout << line << std::endl;
    if (log_out) log_out << line << std::endl;
  };
  log("config:");
  std::istringstream lines(FormatConfig(cfg));
  for (std::string l; std::getline(lines, l);) log("  " + l);
  TrainReport report;
  const SadModel model = Train(cfg, log, &report);
  WriteSadModel(model, a.out);
  double total = 0.0;
  for (const StageTiming &s : report.stages) total += s.seconds;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "trained %zu stages in %.2f s; %lld frames; segments kept %lld, "
                "dropped %.2f%%; wrote %s",
                report.stages.size(), total, static_cast<long long>(report.total_frames),
                static_cast<long long>(report.segments_kept), 100.0 * report.DroppedFraction(),
                a.out.c_str());
  log(buf);
  return kOk;
}

// ---- detect

struct DetectArgs {
  std::string model, out_dir;
  std::vector<std::string> audio;
  bool no_adapt = false, no_smoothing = false, trace = false;
};

int RunDetect(const DetectArgs &a) {
  if (a.audio.empty()) throw UsageError("no audio files given");
  RequireFile(a.model, "model bundle");
  for (const std::string &p : a.audio) RequireFile(p, "audio file");
  fs::create_directories(a.out_dir);
  const SadModel model = ReadSadModel(a.model);
  AdaptationConfig adapt = model.adaptation;
  if (a.no_adapt) adapt.enabled = false;
  SmoothingConfig smoothing;
  smoothing.enabled = !a.no_smoothing;

  int failures = 0;
  for (const std::string &path : a.audio) {
    try {
      const AudioStream audio = ReadWav(path);
      const DetectionResult r = StreamDetect(audio, model, adapt, smoothing);
      const fs::path base = fs::path(a.out_dir) / Stem(path);
      WriteLabels(r.segments, base.string() + ".lab");
      if (a.trace) {
        std::ofstream t(base.string() + ".trace.csv");
        WriteTrace(r.trace, t);
      }
      std::cout << path << ": " << r.trace.size() << " decisions, " << r.segments.size()
                << " segments\n";
    } catch (const DataError &e) {
      ++failures;
      std::cerr << "error: " << path << ": " << e.what() << "\n";
    }
  }
  return failures ? kData : kOk;
}

// ---- score

std::map<std::string, std::string> LabelFiles(const std::string &dir) {
  std::map<std::string, std::string> out;
  for (const auto &e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".lab")
      out[e.path().stem().string()] = e.path().string();
  return out;
}

struct ScoreArgs {
  std::string ref_dir, hyp_dir;
  double collar = 0.25;
};

int RunScore(const ScoreArgs &a) {
  RequireDir(a.ref_dir, "reference directory");
  RequireDir(a.hyp_dir, "hypothesis directory");
  EvalConfig cfg;
  cfg.collar = a.collar;
  try {
    cfg.Validate();
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
  const auto ref = LabelFiles(a.ref_dir);
  const auto hyp = LabelFiles(a.hyp_dir);
  std::vector<std::string> unmatched;
  for (const auto &[stem, path] : ref)
    if (!hyp.count(stem)) unmatched.push_back("missing hypothesis: " + stem);
  for (const auto &[stem, path] : hyp)
    if (!ref.count(stem)) unmatched.push_back("missing reference: " + stem);
  if (!unmatched.empty()) {
    for (const std::string &u : unmatched) std::cerr << u << "\n";
    throw DataError("unmatched file stems, nothing scored");
  }
  if (ref.empty()) throw DataError("no .lab files in " + a.ref_dir);
  std::vector<EvalReport> reports;
  for (const auto &[stem, ref_path] : ref) {
    const auto r = ReadLabels(ref_path);
    const auto h = ReadLabels(hyp.at(stem));
    reports.push_back(Score(r, h, cfg, DefaultDuration(r, h), stem));
  }
  const EvalReport pooled = Aggregate(reports);
  std::cout << FormatReportTable(pooled) << "\n" << FormatReportKeyValue(pooled);
  return kOk;
}

// ---- bench

struct BenchArgs {
  std::string model;
  std::vector<std::string> audio;
  double chunk = 0.1;
  bool no_adapt = false;
};

int RunBench(const BenchArgs &a) {
  if (a.audio.empty()) throw UsageError("no audio files given");
  if (!(a.chunk > 0.0)) throw UsageError("--chunk must be positive");
  RequireFile(a.model, "model bundle");
  for (const std::string &p : a.audio) RequireFile(p, "audio file");
  const SadModel model = ReadSadModel(a.model);
  AdaptationConfig adapt = model.adaptation;
  if (a.no_adapt) adapt.enabled = false;
  using Clock = std::chrono::steady_clock;
  int failures = 0;
  for (const std::string &path : a.audio) {
    try {
      const AudioStream audio = ReadWav(path);
      if (audio.sample_rate != model.sample_rate)
        throw DataError("sample rate " + std::to_string(audio.sample_rate) +
                        " does not match model rate " + std::to_string(model.sample_rate));
      OnlineDetector det(model, adapt);
      const size_t step = std::max<size_t>(1, static_cast<size_t>(a.chunk * audio.sample_rate));
      double peak_chunk = 0.0;
      const auto t0 = Clock::now();
      for (size_t b = 0; b < audio.samples.size(); b += step) {
        const auto c0 = Clock::now();
        const size_t n = std::min(step, audio.samples.size() - b);
        det.AcceptWaveform(std::span<const double>(audio.samples.data() + b, n));
        peak_chunk =
            std::max(peak_chunk, std::chrono::duration<double>(Clock::now() - c0).count());
      }
      det.InputFinished();
      const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
      const DetectorTimings t = det.timings();
      const double dur = audio.Duration();
      const double hop = static_cast<double>(model.feature_cfg.HopSamples(model.sample_rate)) /
                         model.sample_rate;
      const double window =
          static_cast<double>(model.feature_cfg.WindowSamples(model.sample_rate)) /
          model.sample_rate;
      // Audio that must have arrived after a segment's last frame starts.
      const double algorithmic = det.LookaheadFrames() * hop + window;
      std::ostringstream trace;
      WriteTrace(det.decisions(), trace);
      std::printf("file=%s\n", path.c_str());
      std::printf("audio_seconds=%.3f\n", dur);
      std::printf("stage_features_seconds=%.6f\n", t.features);
      std::printf("stage_lda_seconds=%.6f\n", t.lda);
      std::printf("stage_pca_seconds=%.6f\n", t.pca);
      std::printf("stage_scoring_seconds=%.6f\n", t.scoring);
      std::printf("wall_seconds=%.6f\n", wall);
      std::printf("rtf=%.6f\n", wall / dur);
      std::printf("decisions=%zu\n", det.decisions().size());
      std::printf("decision_checksum=%016llx\n",
                  static_cast<unsigned long long>(Fnv1a(trace.str())));
      std::printf("algorithmic_latency_seconds=%.3f\n", algorithmic);
      std::printf("peak_decision_latency_seconds=%.6f\n", algorithmic + peak_chunk);
    } catch (const DataError &e) {
      ++failures;
      std::cerr << "error: " << path << ": " << e.what() << "\n";
    }
  }
  return failures ? kData : kOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"olsad: streaming speech activity detection"};
  app.require_subcommand(1);

  TrainArgs train;
  auto *t = app.add_subcommand("train", "train a model bundle from a labeled corpus");
  t->add_option("--manifest", train.manifest, "audio<TAB>labels manifest")->required();
  t->add_option("--config", train.config, "key = value hyperparameter file");
  t->add_option("--set", train.overrides, "override one hyperparameter, key=value");
  t->add_option("--seed", train.seed, "random seed");
  t->add_option("--monitor", train.monitor, "manifest used only to log MLP loss");
  t->add_option("--log", train.log_file, "also write the training log here");
  t->add_option("--out", train.out, "output bundle path")->required();
  t->add_flag("--quiet", train.quiet, "no log on stdout");

  DetectArgs detect;
  auto *d = app.add_subcommand("detect", "label audio files");
  d->add_option("--model", detect.model, "model bundle")->required();
  d->add_option("--out-dir", detect.out_dir, "directory for .lab outputs")->required();
  d->add_flag("--no-adapt", detect.no_adapt, "disable runtime adaptation");
  d->add_flag("--no-smoothing", detect.no_smoothing, "emit raw segment decisions");
  d->add_flag("--trace", detect.trace, "write a per-segment CSV trace");
  d->add_option("audio", detect.audio, "input WAV files")->required();

  ScoreArgs score;
  auto *s = app.add_subcommand("score", "DCF of hypothesis labels against references");
  s->add_option("ref_dir", score.ref_dir, "reference .lab directory")->required();
  s->add_option("hyp_dir", score.hyp_dir, "hypothesis .lab directory")->required();
  s->add_option("--collar", score.collar, "collar in seconds")->capture_default_str();

  BenchArgs bench;
  auto *b = app.add_subcommand("bench", "timing and real-time factor");
  b->add_option("--model", bench.model, "model bundle")->required();
  b->add_option("--chunk", bench.chunk, "seconds of audio per call")->capture_default_str();
  b->add_flag("--no-adapt", bench.no_adapt, "disable runtime adaptation");
  b->add_option("audio", bench.audio, "input WAV files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  try {
    if (*t) return RunTrain(train);
    if (*d) return RunDetect(detect);
    if (*s) return RunScore(score);
    if (*b) return RunBench(bench);
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
