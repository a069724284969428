// src/sad-model.cc

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

#include "olsad/sad-model.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace olsad {

void AdaptationConfig::Validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("AdaptationConfig: alpha and beta must be in [0, 1]");
  if (l_sp < 1 || l_nsp < 1)
    throw std::invalid_argument("AdaptationConfig: buffer lengths must be >= 1");
}

void SadModel::Validate() const {
  auto fail = [](const std::string &what) { throw DataError("SadModel: " + what); };
  if (sample_rate < kMinSampleRate) fail("bad sample rate");
  if (segment_frames < 1) fail("segment_frames must be >= 1");
  if (lda.InputDim() != feature_cfg.FeatureDim() * lda_context.size())
    fail("LDA input dimension does not match feature context");
  if (pca.InputDim() != lda.OutputDim() * pca_context.size())
    fail("PCA input dimension does not match LDA context");
  if (ubm1.empty() || ubm2.empty() || ubm3.empty()) fail("missing UBM");
  if (ubm1.Dim() != feature_cfg.FeatureDim()) fail("UBM1 dimension mismatch");
  if (ubm2.Dim() != pca.OutputDim() || ubm3.Dim() != pca.OutputDim())
    fail("UBM2/UBM3 dimension does not match transformed features");
  if (mlp.InputDim() != ubm3.NumComponents() * ubm3.Dim())
    fail("MLP input does not match supervector dimension");
  if (w_sp_zero.size() != ubm2.NumComponents() || w_nsp_zero.size() != ubm2.NumComponents())
    fail("zero-order model vectors do not match UBM2");
  const Eigen::Index emb = mlp.layers().at(0).weights.rows();
  if (w_sp_emb.size() != emb || w_nsp_emb.size() != emb)
    fail("embedding model vectors do not match the first hidden layer");
  for (const Vector *v : {&w_sp_zero, &w_nsp_zero, &w_sp_emb, &w_nsp_emb})
    if (!v->allFinite() || v->squaredNorm() == 0.0) fail("model vector is zero or non-finite");
  if (w_sp_zero == w_nsp_zero) fail("speech and non-speech zero-order vectors coincide");
  adaptation.Validate();
}

namespace {

class Writer {
 public:
  void U32(std::uint32_t v) { Raw(v, 4); }
  void U64(std::uint64_t v) { Raw(v, 8); }
  void I32(std::int32_t v) { U32(static_cast<std::uint32_t>(v)); }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  void Vec(const Vector &v) {
    U64(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) F64(v[i]);
  }
  void Mat(const Matrix &m) {
    U64(static_cast<std::uint64_t>(m.rows()));
    U64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) F64(m(r, c));
  }
  std::string &bytes() { return bytes_; }
  const std::string &data() const { return bytes_; }

 private:
  void Raw(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::string bytes_;
};

class Reader {
 public:
  Reader(const std::string &bytes, size_t pos, size_t end)
      : b_(bytes), pos_(pos), end_(end) {}
  std::uint32_t U32() { return static_cast<std::uint32_t>(Raw(4)); }
  std::uint64_t U64() { return Raw(8); }
  std::int32_t I32() { return static_cast<std::int32_t>(U32()); }
  double F64() { return std::bit_cast<double>(U64()); }
  std::uint64_t Count(std::uint64_t elem_bytes) {
    const std::uint64_t n = U64();
    if (n > (end_ - pos_) / elem_bytes) throw DataError("model bundle: corrupt length");
    return n;
  }
  Vector Vec() {
    Vector v(static_cast<Eigen::Index>(Count(8)));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = F64();
    return v;
  }
  Matrix Mat() {
    const auto rows = static_cast<Eigen::Index>(U64());
    const auto cols = static_cast<Eigen::Index>(U64());
    if (rows < 0 || cols < 0 ||
        (cols > 0 && static_cast<std::uint64_t>(rows) > (end_ - pos_) / 8 / static_cast<std::uint64_t>(cols)))
      throw DataError("model bundle: corrupt matrix shape");
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = F64();
    return m;
  }
  bool AtEnd() const { return pos_ == end_; }

 private:
  std::uint64_t Raw(int n) {
    if (end_ - pos_ < static_cast<size_t>(n)) throw DataError("model bundle: truncated section");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b_[pos_ + i])) << (8 * i);
    pos_ += n;
    return v;
  }
  const std::string &b_;
  size_t pos_, end_;
};

constexpr char kMagic[8] = {'O', 'L', 'S', 'A', 'D', 'M', 'D', 'L'};

void Section(Writer *out, const char tag[5], const Writer &body) {
  out->bytes().append(tag, 4);
  out->U64(body.data().size());
  out->bytes() += body.data();
}

void PutTransform(Writer *w, const LinearTransform &t, const ContextSpec &spec) {
  w->U32(static_cast<std::uint32_t>(t.kind));
  w->U32(static_cast<std::uint32_t>(spec.offsets.size()));
  for (int o : spec.offsets) w->I32(o);
  w->Mat(t.matrix);
  w->Vec(t.mean_offset);
}

void GetTransform(Reader *r, LinearTransform *t, ContextSpec *spec) {
  const std::uint32_t kind = r->U32();
  if (kind > 1) throw DataError("model bundle: unknown transform kind");
  t->kind = static_cast<TransformKind>(kind);
  const std::uint32_t n = r->U32();
  if (n > 4096) throw DataError("model bundle: corrupt context spec");
  spec->offsets.resize(n);
  for (auto &o : spec->offsets) o = r->I32();
  t->matrix = r->Mat();
  t->mean_offset = r->Vec();
  if (t->mean_offset.size() != t->matrix.cols())
    throw DataError("model bundle: transform offset/matrix mismatch");
  try {
    spec->Validate();
  } catch (const std::invalid_argument &e) {
    throw DataError(std::string("model bundle: ") + e.what());
  }
}

void PutGmm(Writer *w, const Gmm &g) {
  w->Vec(g.weights());
  w->Mat(g.means());
  w->Mat(g.variances());
}

Gmm GetGmm(Reader *r) {
  Vector weights = r->Vec();
  Matrix means = r->Mat();
  Matrix vars = r->Mat();
  try {
    return Gmm(std::move(weights), std::move(means), std::move(vars));
  } catch (const std::invalid_argument &e) {
    throw DataError(std::string("model bundle: ") + e.what());
  }
}

}  // namespace

std::string SerializeSadModel(const SadModel &model) {
  Writer out;
  out.bytes().append(kMagic, 8);
  out.U32(kBundleVersion);

  Writer feat;
  const FeatureConfig &f = model.feature_cfg;
  feat.I32(model.sample_rate);
  feat.F64(f.window_length);
  feat.F64(f.hop);
  feat.I32(f.n_mfcc);
  feat.F64(f.mel_low);
  feat.F64(f.mel_high);
  feat.I32(f.n_mel_filters);
  feat.F64(f.cmn_window);
  feat.I32(f.delta_window);
  feat.F64(f.pre_emphasis);
  feat.I32(model.segment_frames);
  Section(&out, "FEAT", feat);

  Writer lda, pca;
  PutTransform(&lda, model.lda, model.lda_context);
  PutTransform(&pca, model.pca, model.pca_context);
  Section(&out, "LDA ", lda);
  Section(&out, "PCA ", pca);

  const Gmm *ubms[3] = {&model.ubm1, &model.ubm2, &model.ubm3};
  const char *ubm_tags[3] = {"UBM1", "UBM2", "UBM3"};
  for (int i = 0; i < 3; ++i) {
    Writer g;
    PutGmm(&g, *ubms[i]);
    Section(&out, ubm_tags[i], g);
  }

  Writer mlp;
  mlp.U32(static_cast<std::uint32_t>(model.mlp.NumLayers()));
  for (const MlpLayer &l : model.mlp.layers()) {
    mlp.Mat(l.weights);
    mlp.Vec(l.bias);
  }
  mlp.I32(model.mlp.selected_epoch());
  Section(&out, "MLP ", mlp);

  Writer vz, ve;
  vz.Vec(model.w_sp_zero);
  vz.Vec(model.w_nsp_zero);
  ve.Vec(model.w_sp_emb);
  ve.Vec(model.w_nsp_emb);
  Section(&out, "VZRO", vz);
  Section(&out, "VEMB", ve);

  Writer th;
  th.F64(model.theta_m);
  Section(&out, "THTA", th);

  Writer ad;
  ad.F64(model.adaptation.alpha);
  ad.F64(model.adaptation.beta);
  ad.I32(model.adaptation.l_sp);
  ad.I32(model.adaptation.l_nsp);
  ad.U32(model.adaptation.enabled ? 1 : 0);
  Section(&out, "ADPT", ad);
  return std::move(out.bytes());
}

SadModel DeserializeSadModel(const std::string &bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw DataError("model bundle: bad magic");
  Reader head(bytes, 8, 12);
  const std::uint32_t version = head.U32();
  if (version != kBundleVersion)
    throw DataError("model bundle: unsupported version " + std::to_string(version));

  size_t pos = 12;
  // Returns a reader over the body of the next section, which must be `tag`.
  auto next = [&](const char *tag) {
    if (bytes.size() - pos < 12 || bytes.compare(pos, 4, tag) != 0)
      throw DataError(std::string("model bundle: expected section '") + tag + "'");
    Reader len(bytes, pos + 4, pos + 12);
    const std::uint64_t n = len.U64();
    if (n > bytes.size() - pos - 12)
      throw DataError(std::string("model bundle: truncated section '") + tag + "'");
    Reader body(bytes, pos + 12, pos + 12 + n);
    pos += 12 + n;
    return body;
  };
  auto done = [](const Reader &r, const char *tag) {
    if (!r.AtEnd())
      throw DataError(std::string("model bundle: trailing bytes in section '") + tag + "'");
  };

  SadModel m;
  {
    Reader r = next("FEAT");
    FeatureConfig &f = m.feature_cfg;
    m.sample_rate = r.I32();
    f.window_length = r.F64();
    f.hop = r.F64();
    f.n_mfcc = r.I32();
    f.mel_low = r.F64();
    f.mel_high = r.F64();
    f.n_mel_filters = r.I32();
    f.cmn_window = r.F64();
    f.delta_window = r.I32();
    f.pre_emphasis = r.F64();
    m.segment_frames = r.I32();
    done(r, "FEAT");
  }
  {
    Reader r = next("LDA ");
    GetTransform(&r, &m.lda, &m.lda_context);
    done(r, "LDA ");
  }
  {
    Reader r = next("PCA ");
    GetTransform(&r, &m.pca, &m.pca_context);
    done(r, "PCA ");
  }
  Gmm *ubms[3] = {&m.ubm1, &m.ubm2, &m.ubm3};
  const char *ubm_tags[3] = {"UBM1", "UBM2", "UBM3"};
  for (int i = 0; i < 3; ++i) {
    Reader r = next(ubm_tags[i]);
    *ubms[i] = GetGmm(&r);
    done(r, ubm_tags[i]);
  }
  {
    Reader r = next("MLP ");
    const std::uint32_t n = r.U32();
    if (n == 0 || n > 64) throw DataError("model bundle: corrupt layer count");
    std::vector<MlpLayer> layers(n);
    for (MlpLayer &l : layers) {
      l.weights = r.Mat();
      l.bias = r.Vec();
    }
    const int epoch = r.I32();
    done(r, "MLP ");
    try {
      m.mlp = MlpModel(std::move(layers), epoch);
    } catch (const std::invalid_argument &e) {
      throw DataError(std::string("model bundle: ") + e.what());
    }
  }
  {
    Reader r = next("VZRO");
    m.w_sp_zero = r.Vec();
    m.w_nsp_zero = r.Vec();
    done(r, "VZRO");
  }
  {
    Reader r = next("VEMB");
    m.w_sp_emb = r.Vec();
    m.w_nsp_emb = r.Vec();
    done(r, "VEMB");
  }
  {
    Reader r = next("THTA");
    m.theta_m = r.F64();
    done(r, "THTA");
  }
  {
    Reader r = next("ADPT");
    m.adaptation.alpha = r.F64();
    m.adaptation.beta = r.F64();
    m.adaptation.l_sp = r.I32();
    m.adaptation.l_nsp = r.I32();
    m.adaptation.enabled = r.U32() != 0;
    done(r, "ADPT");
  }
  if (pos != bytes.size()) throw DataError("model bundle: trailing data");
  try {
    m.feature_cfg.Validate(m.sample_rate);
  } catch (const std::invalid_argument &e) {
    throw DataError(std::string("model bundle: ") + e.what());
  }
  m.Validate();
  return m;
}

void WriteSadModel(const SadModel &model, const std::string &path) {
  const std::string bytes = SerializeSadModel(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path + ": cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError(path + ": write failed");
}

SadModel ReadSadModel(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open model bundle");
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return DeserializeSadModel(bytes);
}

}  // namespace olsad
