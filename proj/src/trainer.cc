// src/trainer.cc

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

#include "olsad/trainer.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "olsad/context-transform.h"
#include "olsad/diag-gmm.h"
#include "olsad/embeddings.h"
#include "olsad/mfcc.h"
#include "olsad/mlp.h"
#include "olsad/sad-engine.h"

namespace olsad {

namespace fs = std::filesystem;

namespace {

std::string Trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int ParseInt(const std::string &key, const std::string &v) {
  size_t pos = 0;
  int out = 0;
  try {
    out = std::stoi(v, &pos);
  } catch (const std::exception &) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size())
    throw std::invalid_argument("config: " + key + " expects an integer, got '" + v + "'");
  return out;
}

double ParseDouble(const std::string &key, const std::string &v) {
  size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception &) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size())
    throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
  return out;
}

bool ParseBool(const std::string &key, const std::string &v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw std::invalid_argument("config: " + key + " expects a boolean, got '" + v + "'");
}

std::vector<int> ParseIntList(const std::string &key, const std::string &v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ParseInt(key, Trim(item)));
  return out;
}

}  // namespace

std::vector<ManifestEntry> ReadManifest(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open manifest");
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&](const std::string &p) {
    fs::path q(p);
    return q.is_absolute() || base.empty() ? q.string() : (base / q).string();
  };
  std::vector<ManifestEntry> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto tab = t.find('\t');
    if (tab == std::string::npos)
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected audio_path<TAB>label_path");
    const std::string audio = Trim(t.substr(0, tab));
    const std::string labels = Trim(t.substr(tab + 1));
    if (audio.empty() || labels.empty() || labels.find('\t') != std::string::npos)
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected audio_path<TAB>label_path");
    out.push_back({resolve(audio), resolve(labels)});
  }
  if (out.empty()) throw DataError(path + ": manifest is empty");
  return out;
}

void TrainConfig::Validate() const {
  auto need = [](bool ok, const std::string &msg) {
    if (!ok) throw std::invalid_argument("TrainConfig: " + msg);
  };
  need(segment_frames > 0, "segment_frames must be positive");
  need(ubm1_size > 0 && ubm2_per_class_size > 0 && ubm3_size > 0,
       "UBM sizes must be positive");
  need(gmm_iters >= 0, "gmm_iters must be >= 0");
  need(lda_dim > 0 && pca_dim > 0, "lda_dim and pca_dim must be positive");
  need(lda_dim <= 2 * ubm1_size - 1, "lda_dim must be <= 2 * ubm1_size - 1");
  need(lda_dim <= feature_cfg.FeatureDim() * ContextSpec::Lda().size(),
       "lda_dim exceeds the stacked feature dimension");
  need(pca_dim <= lda_dim * ContextSpec::Pca().size(),
       "pca_dim exceeds the stacked LDA dimension");
  need(!mlp_hidden.empty(), "mlp_hidden must list at least one layer");
  for (int h : mlp_hidden) need(h > 0, "mlp_hidden sizes must be positive");
  need(mlp_epochs > 0, "mlp_epochs must be positive");
  need(mlp_selected_epoch >= 0 && mlp_selected_epoch <= mlp_epochs,
       "mlp_selected_epoch must lie in [0, mlp_epochs]");
  need(mlp_learning_rate > 0.0, "mlp_learning_rate must be positive");
  need(mlp_batch_size > 0, "mlp_batch_size must be positive");
  need(theta_m >= -2.0 && theta_m <= 2.0, "theta_m must lie in [-2, 2]");
  adaptation.Validate();
}

void SetConfigValue(TrainConfig *cfg, const std::string &key, const std::string &raw) {
  const std::string v = Trim(raw);
  FeatureConfig &f = cfg->feature_cfg;
  AdaptationConfig &a = cfg->adaptation;
  if (key == "seed") {
    size_t pos = 0;
    unsigned long long s = 0;
    try {
      s = std::stoull(v, &pos);
    } catch (const std::exception &) {
      pos = 0;
    }
    if (pos == 0 || pos != v.size() || v[0] == '-')
      throw std::invalid_argument("config: seed expects a non-negative integer");
    cfg->seed = s;
  } else if (key == "segment_frames") cfg->segment_frames = ParseInt(key, v);
  else if (key == "ubm1_size") cfg->ubm1_size = ParseInt(key, v);
  else if (key == "ubm2_per_class_size") cfg->ubm2_per_class_size = ParseInt(key, v);
  else if (key == "ubm3_size") cfg->ubm3_size = ParseInt(key, v);
  else if (key == "gmm_iters") cfg->gmm_iters = ParseInt(key, v);
  else if (key == "lda_dim") cfg->lda_dim = ParseInt(key, v);
  else if (key == "pca_dim") cfg->pca_dim = ParseInt(key, v);
  else if (key == "mlp_hidden") cfg->mlp_hidden = ParseIntList(key, v);
  else if (key == "mlp_epochs") cfg->mlp_epochs = ParseInt(key, v);
  else if (key == "mlp_selected_epoch") cfg->mlp_selected_epoch = ParseInt(key, v);
  else if (key == "mlp_learning_rate") cfg->mlp_learning_rate = ParseDouble(key, v);
  else if (key == "mlp_batch_size") cfg->mlp_batch_size = ParseInt(key, v);
  else if (key == "theta_m") {
    cfg->calibrate_theta = v == "auto";
    if (!cfg->calibrate_theta) cfg->theta_m = ParseDouble(key, v);
  }
  else if (key == "alpha") a.alpha = ParseDouble(key, v);
  else if (key == "beta") a.beta = ParseDouble(key, v);
  else if (key == "l_sp") a.l_sp = ParseInt(key, v);
  else if (key == "l_nsp") a.l_nsp = ParseInt(key, v);
  else if (key == "adapt") a.enabled = ParseBool(key, v);
  else if (key == "window_length") f.window_length = ParseDouble(key, v);
  else if (key == "hop") f.hop = ParseDouble(key, v);
  else if (key == "n_mfcc") f.n_mfcc = ParseInt(key, v);
  else if (key == "mel_low") f.mel_low = ParseDouble(key, v);
  else if (key == "mel_high") f.mel_high = ParseDouble(key, v);
  else if (key == "n_mel_filters") f.n_mel_filters = ParseInt(key, v);
  else if (key == "cmn_window") f.cmn_window = ParseDouble(key, v);
  else if (key == "delta_window") f.delta_window = ParseInt(key, v);
  else if (key == "pre_emphasis") f.pre_emphasis = ParseDouble(key, v);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

void ParseConfig(std::istream &in, TrainConfig *cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = Trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    SetConfigValue(cfg, Trim(t.substr(0, eq)), t.substr(eq + 1));
  }
}

void ReadConfigFile(const std::string &path, TrainConfig *cfg) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(path + ": cannot open config file");
  ParseConfig(in, cfg);
}

std::string FormatConfig(const TrainConfig &cfg) {
  std::ostringstream o;
  o.precision(17);
  const FeatureConfig &f = cfg.feature_cfg;
  const AdaptationConfig &a = cfg.adaptation;
  o << "seed=" << cfg.seed << "\n"
    << "segment_frames=" << cfg.segment_frames << "\n"
    << "ubm1_size=" << cfg.ubm1_size << "\n"
    << "ubm2_per_class_size=" << cfg.ubm2_per_class_size << "\n"
    << "ubm3_size=" << cfg.ubm3_size << "\n"
    << "gmm_iters=" << cfg.gmm_iters << "\n"
    << "lda_dim=" << cfg.lda_dim << "\n"
    << "pca_dim=" << cfg.pca_dim << "\n"
    << "mlp_hidden=";
  for (size_t i = 0; i < cfg.mlp_hidden.size(); ++i)
    o << (i ? "," : "") << cfg.mlp_hidden[i];
  o << "\n"
    << "mlp_epochs=" << cfg.mlp_epochs << "\n"
    << "mlp_selected_epoch=" << cfg.mlp_selected_epoch << "\n"
    << "mlp_learning_rate=" << cfg.mlp_learning_rate << "\n"
    << "mlp_batch_size=" << cfg.mlp_batch_size << "\n"
    << "theta_m=";
  if (cfg.calibrate_theta)
    o << "auto";
  else
    o << cfg.theta_m;
  o << "\n"
    << "alpha=" << a.alpha << "\n"
    << "beta=" << a.beta << "\n"
    << "l_sp=" << a.l_sp << "\n"
    << "l_nsp=" << a.l_nsp << "\n"
    << "adapt=" << (a.enabled ? "true" : "false") << "\n"
    << "window_length=" << f.window_length << "\n"
    << "hop=" << f.hop << "\n"
    << "n_mfcc=" << f.n_mfcc << "\n"
    << "mel_low=" << f.mel_low << "\n"
    << "mel_high=" << f.mel_high << "\n"
    << "n_mel_filters=" << f.n_mel_filters << "\n"
    << "cmn_window=" << f.cmn_window << "\n"
    << "delta_window=" << f.delta_window << "\n"
    << "pre_emphasis=" << f.pre_emphasis << "\n";
  return o.str();
}

double CalibrateThreshold(std::vector<double> sp, std::vector<double> nsp,
                          double fn_weight, double fp_weight) {
  if (sp.empty() || nsp.empty())
    throw std::invalid_argument("CalibrateThreshold: need scores of both classes");
  std::vector<std::pair<double, int>> all;
  for (double s : sp) all.push_back({s, 1});
  for (double s : nsp) all.push_back({s, 0});
  std::sort(all.begin(), all.end());
  const double n_sp = static_cast<double>(sp.size());
  const double n_nsp = static_cast<double>(nsp.size());
  // Threshold below every score: everything is speech.
  double fn = 0.0, fp = n_nsp;
  double best_cost = fp_weight * fp / n_nsp;
  double best = std::max(-2.0, all.front().first - 1e-3);
  for (size_t i = 0; i < all.size();) {
    size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) {
      (all[j].second ? fn : fp) += all[j].second ? 1.0 : -1.0;
      ++j;
    }
    const double cost = fn_weight * fn / n_sp + fp_weight * fp / n_nsp;
    if (cost < best_cost) {
      best_cost = cost;
      best = j < all.size() ? 0.5 * (all[i].first + all[j].first) : all[i].first;
    }
    i = j;
  }
  return best;
}

std::vector<SadLabel> FrameLabels(const std::vector<SegmentLabel> &labels,
                                  int64_t n_frames, double hop, double window) {
  std::vector<SadLabel> out(n_frames, SadLabel::kNonSpeech);
  size_t k = 0;
  for (int64_t t = 0; t < n_frames; ++t) {
    const double c = t * hop + window / 2.0;
    while (k < labels.size() && labels[k].end <= c) ++k;
    if (k < labels.size() && labels[k].start <= c) out[t] = labels[k].label;
  }
  return out;
}

FrameSequence ExtractFeatures(const AudioStream &audio, const FeatureConfig &cfg) {
  return AppendDeltas(ApplyCmn(ExtractMfcc(audio, cfg), cfg), cfg);
}

std::vector<LabeledAudio> LoadCorpus(const std::vector<ManifestEntry> &manifest) {
  std::vector<LabeledAudio> out;
  out.reserve(manifest.size());
  for (const ManifestEntry &e : manifest) {
    if (!fs::exists(e.audio_path)) throw DataError(e.audio_path + ": audio file not found");
    if (!fs::exists(e.label_path)) throw DataError(e.label_path + ": label file not found");
    LabeledAudio f;
    f.name = fs::path(e.audio_path).stem().string();
    f.audio = ReadWav(e.audio_path);
    f.labels = ReadLabels(e.label_path);
    out.push_back(std::move(f));
  }
  return out;
}

double TrainReport::DroppedFraction() const {
  const int64_t total = segments_kept + segments_dropped;
  return total ? static_cast<double>(segments_dropped) / total : 0.0;
}

namespace {

using Clock = std::chrono::steady_clock;

struct FileFeatures {
  FrameSequence frames;  // 36-d, then replaced by 24-d after stage 6
  std::vector<SadLabel> labels;
};

Matrix RowsWhere(const std::vector<FileFeatures> &files, bool pick_all, SadLabel which) {
  int64_t n = 0;
  int dim = 0;
  for (const auto &f : files)
    for (size_t t = 0; t < f.frames.size(); ++t)
      if (pick_all || f.labels[t] == which) {
        ++n;
        dim = static_cast<int>(f.frames[t].size());
      }
  Matrix m(n, dim);
  int64_t r = 0;
  for (const auto &f : files)
    for (size_t t = 0; t < f.frames.size(); ++t)
      if (pick_all || f.labels[t] == which) m.row(r++) = f.frames[t].transpose();
  return m;
}

FileFeatures Featurize(const LabeledAudio &file, const FeatureConfig &fc, int sr) {
  if (file.audio.sample_rate != sr)
    throw DataError(file.name + ": sample rate " + std::to_string(file.audio.sample_rate) +
                    " differs from corpus rate " + std::to_string(sr));
  FileFeatures ff;
  ff.frames = ExtractFeatures(file.audio, fc);
  ff.labels = FrameLabels(file.labels, static_cast<int64_t>(ff.frames.size()),
                          static_cast<double>(fc.HopSamples(sr)) / sr,
                          static_cast<double>(fc.WindowSamples(sr)) / sr);
  return ff;
}

// One detection segment of a training file, in stream order, for threshold
// calibration. Mixed-label segments still drive adaptation but are not
// counted as errors.
struct CalibSegment {
  Vector zero;
  int64_t sv_row = -1;  // row of the training supervector matrix
  Vector mixed_sv;      // supervector of a mixed segment
  SadLabel label = SadLabel::kNonSpeech;
  bool scored = false;
  bool file_start = false;
};

// Non-overlapping segments aligned with detection; segments whose frames
// disagree on the label are counted and skipped.
void CutSegments(const FileFeatures &f, int seg, const Gmm &ubm2, const Gmm &ubm3,
                 std::vector<Vector> *svs, std::vector<CalibSegment> *calib,
                 std::vector<SadLabel> *labels, int64_t *dropped) {
  const int64_t n = static_cast<int64_t>(f.frames.size()) / seg;
  for (int64_t s = 0; s < n; ++s) {
    const int64_t b = s * seg;
    bool uniform = true;
    for (int64_t t = b + 1; t < b + seg; ++t) uniform &= f.labels[t] == f.labels[b];
    std::span<const Vector> frames(f.frames.data() + b, seg);
    if (calib) {
      CalibSegment c;
      c.zero = ZeroOrderStats(frames, ubm2);
      c.zero /= c.zero.sum();
      c.label = f.labels[b];
      c.scored = uniform;
      c.file_start = s == 0;
      if (uniform)
        c.sv_row = static_cast<int64_t>(svs->size());
      else
        c.mixed_sv = MakeSupervector(AccumulateStats(frames, ubm3));
      calib->push_back(std::move(c));
    }
    if (!uniform) {
      ++*dropped;
      continue;
    }
    svs->push_back(MakeSupervector(AccumulateStats(frames, ubm3)));
    labels->push_back(f.labels[b]);
  }
}

// Weighted segment error of the detector replayed over the training files
// with threshold theta and the given adaptation.
double ReplayCost(const std::vector<CalibSegment> &segs, const std::vector<Vector> &emb,
                  SadModel *model, double theta, const AdaptationConfig &cfg) {
  model->theta_m = theta;
  std::optional<AdaptState> state;
  double fn = 0, fp = 0, n_sp = 0, n_nsp = 0;
  for (size_t i = 0; i < segs.size(); ++i) {
    if (segs[i].file_start) state.emplace(*model, cfg);
    const SegmentVectors v{segs[i].zero, emb[i]};
    const SadLabel got = DecideSegment(v, *model, &*state, cfg).label;
    if (!segs[i].scored) continue;
    if (segs[i].label == SadLabel::kSpeech) {
      n_sp += 1;
      fn += got != SadLabel::kSpeech;
    } else {
      n_nsp += 1;
      fp += got == SadLabel::kSpeech;
    }
  }
  return 0.75 * fn / n_sp + 0.25 * fp / n_nsp;
}

Matrix Rows(const std::vector<Vector> &v) {
  if (v.empty()) return Matrix();
  return StackRows(v);
}

}  // namespace

SadModel TrainFromCorpus(const TrainConfig &cfg, const std::vector<LabeledAudio> &corpus,
                         const std::vector<LabeledAudio> &monitor, const TrainLog &log,
                         TrainReport *report) {
  cfg.Validate();
  TrainReport local;
  TrainReport &rep = report ? *report : local;
  rep = TrainReport();
  auto say = [&](const std::string &msg) {
    if (log) log(msg);
  };
  auto stage = [&](int index, const char *name, auto &&body) {
    const auto t0 = Clock::now();
    try {
      body();
    } catch (const DataError &e) {
      throw DataError("stage " + std::to_string(index) + " (" + name + "): " + e.what());
    } catch (const std::invalid_argument &e) {
      throw DataError("stage " + std::to_string(index) + " (" + name + "): " + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    rep.stages.push_back({name, secs});
    char buf[160];
    std::snprintf(buf, sizeof(buf), "stage %2d %-16s %8.2f s", index, name, secs);
    say(buf);
  };

  SadModel model;
  model.feature_cfg = cfg.feature_cfg;
  model.segment_frames = cfg.segment_frames;
  model.theta_m = cfg.theta_m;
  model.adaptation = cfg.adaptation;
  std::vector<FileFeatures> files;
  std::vector<std::vector<int>> acoustic;

  stage(1, "features", [&] {
    if (corpus.empty()) throw DataError("corpus is empty");
    model.sample_rate = corpus[0].audio.sample_rate;
    cfg.feature_cfg.Validate(model.sample_rate);
    for (const LabeledAudio &file : corpus) {
      ValidateSegments(file.labels, file.name);
      files.push_back(Featurize(file, cfg.feature_cfg, model.sample_rate));
      rep.total_frames += static_cast<int64_t>(files.back().frames.size());
      for (SadLabel l : files.back().labels) rep.speech_frames += l == SadLabel::kSpeech;
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %zu files, %lld frames, %.1f%% speech", files.size(),
                  static_cast<long long>(rep.total_frames),
                  rep.total_frames ? 100.0 * rep.speech_frames / rep.total_frames : 0.0);
    say(buf);
  });

  stage(2, "ubm1", [&] {
    model.ubm1 = TrainGmm(RowsWhere(files, true, SadLabel::kSpeech), cfg.ubm1_size,
                          cfg.gmm_iters, cfg.seed + 1);
  });

  stage(3, "acoustic-labels", [&] {
    for (const FileFeatures &f : files)
      acoustic.push_back(AcousticLabels(f.frames, model.ubm1, f.labels));
  });

  stage(4, "lda", [&] {
    const int dim = cfg.feature_cfg.FeatureDim() * model.lda_context.size();
    LdaAccumulator acc(dim);
    for (size_t i = 0; i < files.size(); ++i)
      for (size_t t = 0; t < files[i].frames.size(); ++t)
        acc.Accumulate(StackContext(files[i].frames, model.lda_context, t), acoustic[i][t]);
    model.lda = acc.Estimate(cfg.lda_dim);
    acoustic.clear();
  });

  stage(5, "pca", [&] {
    PcaAccumulator acc(cfg.lda_dim * model.pca_context.size());
    for (const FileFeatures &f : files) {
      FrameSequence y(f.frames.size());
      for (size_t t = 0; t < f.frames.size(); ++t)
        y[t] = model.lda.Apply(StackContext(f.frames, model.lda_context, t));
      for (size_t t = 0; t < y.size(); ++t)
        acc.Accumulate(StackContext(y, model.pca_context, t));
    }
    model.pca = acc.Estimate(cfg.pca_dim);
  });

  stage(6, "transform", [&] {
    for (FileFeatures &f : files)
      f.frames = ApplyContextTransform(f.frames, model.lda, model.lda_context, model.pca,
                                       model.pca_context);
  });

  stage(7, "ubm2", [&] {
    if (rep.speech_frames == 0) throw DataError("class absent: no speech frames in corpus");
    if (rep.speech_frames == rep.total_frames)
      throw DataError("class absent: no non-speech frames in corpus");
    const Gmm sp = TrainGmm(RowsWhere(files, false, SadLabel::kSpeech),
                            cfg.ubm2_per_class_size, cfg.gmm_iters, cfg.seed + 2);
    const Gmm nsp = TrainGmm(RowsWhere(files, false, SadLabel::kNonSpeech),
                             cfg.ubm2_per_class_size, cfg.gmm_iters, cfg.seed + 3);
    model.ubm2 = MergeGmms(sp, nsp, 0.5);
  });

  stage(8, "zero-order", [&] {
    Vector sp = Vector::Zero(model.ubm2.NumComponents());
    Vector nsp = sp;
    for (const FileFeatures &f : files)
      for (size_t t = 0; t < f.frames.size(); ++t)
        (f.labels[t] == SadLabel::kSpeech ? sp : nsp) += model.ubm2.Posteriors(f.frames[t]);
    model.w_sp_zero = sp / sp.sum();
    model.w_nsp_zero = nsp / nsp.sum();
  });

  stage(9, "ubm3", [&] {
    model.ubm3 = TrainGmm(RowsWhere(files, true, SadLabel::kSpeech), cfg.ubm3_size,
                          cfg.gmm_iters, cfg.seed + 4);
  });

  Matrix train_sv;
  std::vector<SadLabel> train_labels;
  std::vector<CalibSegment> calib;
  stage(10, "mlp", [&] {
    std::vector<Vector> svs;
    for (const FileFeatures &f : files)
      CutSegments(f, cfg.segment_frames, model.ubm2, model.ubm3, &svs,
                  cfg.calibrate_theta ? &calib : nullptr, &train_labels,
                  &rep.segments_dropped);
    rep.segments_kept = static_cast<int64_t>(svs.size());
    files.clear();
    char buf[200];
    std::snprintf(buf, sizeof(buf), "  %lld segments kept, %lld dropped (%.2f%%)",
                  static_cast<long long>(rep.segments_kept),
                  static_cast<long long>(rep.segments_dropped),
                  100.0 * rep.DroppedFraction());
    say(buf);
    if (rep.DroppedFraction() > 0.05)
      say("  warning: more than 5% of segments straddle a label boundary");
    if (svs.empty()) throw DataError("no training segments");
    train_sv = Rows(svs);
    svs.clear();

    Matrix mon_sv;
    std::vector<SadLabel> mon_labels;
    if (!monitor.empty()) {
      std::vector<Vector> msv;
      int64_t mdrop = 0;
      for (const LabeledAudio &file : monitor) {
        FileFeatures f = Featurize(file, cfg.feature_cfg, model.sample_rate);
        f.frames = ApplyContextTransform(f.frames, model.lda, model.lda_context, model.pca,
                                         model.pca_context);
        CutSegments(f, cfg.segment_frames, model.ubm2, model.ubm3, &msv, nullptr,
                    &mon_labels, &mdrop);
      }
      mon_sv = Rows(msv);
    }
    MlpTrainOptions mo;
    mo.hidden = cfg.mlp_hidden;
    mo.epochs = cfg.mlp_epochs;
    mo.selected_epoch = cfg.mlp_selected_epoch;
    mo.learning_rate = cfg.mlp_learning_rate;
    mo.batch_size = cfg.mlp_batch_size;
    mo.seed = cfg.seed + 5;
    mo.keep_checkpoints = true;
    MlpMonitorData md;
    if (!mon_labels.empty()) {
      md.inputs = &mon_sv;
      md.labels = &mon_labels;
    }
    MlpTrainResult r = TrainMlp(
        train_sv, train_labels, mo, md, [&](int epoch, double train, double mon) {
          char line[160];
          if (md.inputs)
            std::snprintf(line, sizeof(line), "  epoch %3d train_loss=%.6f monitor_loss=%.6f",
                          epoch, train, mon);
          else
            std::snprintf(line, sizeof(line), "  epoch %3d train_loss=%.6f", epoch, train);
          say(line);
        });
    model.mlp = std::move(r.model);
    rep.mlp_train_loss = std::move(r.train_loss);
    rep.mlp_monitor_loss = std::move(r.monitor_loss);
  });

  stage(11, "class-embeddings", [&] {
    auto [sp, nsp] = ClassEmbeddings(train_sv, train_labels, model.mlp);
    model.w_sp_emb = std::move(sp);
    model.w_nsp_emb = std::move(nsp);
  });

  if (cfg.calibrate_theta) {
    stage(11, "calibrate-theta", [&] {
      std::vector<Vector> emb;
      emb.reserve(calib.size());
      for (const CalibSegment &c : calib)
        emb.push_back(ExtractEmbedding(
            c.sv_row >= 0 ? Vector(train_sv.row(c.sv_row).transpose()) : c.mixed_sv,
            model.mlp));
      AdaptationConfig off = model.adaptation;
      off.enabled = false;
      std::vector<double> sp, nsp;
      {
        AdaptState state(model, off);
        for (size_t i = 0; i < calib.size(); ++i) {
          if (!calib[i].scored) continue;
          const double fused =
              DecideSegment({calib[i].zero, emb[i]}, model, &state, off).fused_score;
          (calib[i].label == SadLabel::kSpeech ? sp : nsp).push_back(fused);
        }
      }
      double theta = CalibrateThreshold(std::move(sp), std::move(nsp));
      if (model.adaptation.enabled) {
        // Coarse then fine grid around the static optimum, replaying the
        // adaptive detector. Ties keep the candidate nearest the centre.
        SadModel probe = model;
        for (double step : {0.01, 0.001}) {
          const double centre = theta;
          double best = ReplayCost(calib, emb, &probe, centre, model.adaptation);
          for (int k = 1; k <= 30; ++k)
            for (double cand : {centre - k * step, centre + k * step}) {
              if (cand < -2.0 || cand > 2.0) continue;
              const double c = ReplayCost(calib, emb, &probe, cand, model.adaptation);
              if (c < best) {
                best = c;
                theta = cand;
              }
            }
        }
      }
      model.theta_m = theta;
      char buf[96];
      std::snprintf(buf, sizeof(buf), "  theta_m=%.6f", model.theta_m);
      say(buf);
    });
  }
  rep.theta_m = model.theta_m;

  stage(12, "assemble", [&] { model.Validate(); });
  return model;
}

SadModel Train(const TrainConfig &cfg, const TrainLog &log, TrainReport *report) {
  if (cfg.manifest.empty()) throw DataError("stage 1 (features): manifest is empty");
  std::vector<LabeledAudio> corpus, monitor;
  try {
    corpus = LoadCorpus(cfg.manifest);
    monitor = LoadCorpus(cfg.monitor_manifest);
  } catch (const DataError &e) {
    throw DataError(std::string("stage 1 (features): ") + e.what());
  }
  return TrainFromCorpus(cfg, corpus, monitor, log, report);
}

}  // namespace olsad
