// tests/mlp-test.cc

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

#include <cmath>

#include "olsad/embeddings.h"
#include "olsad/mlp.h"
#include "oracles.h"

namespace olsad {
namespace {

void Blobs(int n, int d, double sep, uint64_t seed, Matrix *x, std::vector<SadLabel> *y) {
  Rng rng(seed);
  *x = Matrix(n, d);
  y->clear();
  for (int i = 0; i < n; ++i) {
    const bool sp = i % 2 == 0;
    for (int j = 0; j < d; ++j) (*x)(i, j) = rng.Normal() + (sp && j < 3 ? sep : 0.0);
    y->push_back(sp ? SadLabel::kSpeech : SadLabel::kNonSpeech);
  }
}

TEST(Mlp, ForwardMatchesNaiveOracle) {
  const MlpModel m = MlpModel::Random({7, 5, 4, 2}, 3);
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    Vector x(7);
    for (int j = 0; j < 7; ++j) x[j] = rng.Normal();
    const auto want = oracle::NaiveMlp(m, x);
    const Vector h = m.FirstHidden(x);
    const Vector p = m.Probabilities(x);
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(h[i], want.hidden1[i], 1e-12);
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(p[i], want.probs[i], 1e-12);
    EXPECT_NEAR(p.sum(), 1.0, 1e-9);
    // Embedding is a prefix of the full pass.
    const auto acts = m.Forward(x.transpose());
    EXPECT_EQ(Vector(acts[1].row(0).transpose()), ExtractEmbedding(x, m));
  }
}

TEST(Mlp, ShapeValidation) {
  std::vector<MlpLayer> bad = {{Matrix::Zero(3, 4), Vector::Zero(3)},
                               {Matrix::Zero(2, 2), Vector::Zero(2)}};
  EXPECT_THROW(MlpModel m(bad), std::invalid_argument);
  std::vector<MlpLayer> three = {{Matrix::Zero(3, 4), Vector::Zero(3)}};
  EXPECT_THROW(MlpModel m(three), std::invalid_argument);
  const MlpModel full = MlpModel::Random({768, 256, 128, 64, 2}, 1);
  EXPECT_EQ(full.LayerDims(), (std::vector<int>{768, 256, 128, 64, 2}));
}

TEST(Mlp, GradientCheck) {
  const MlpModel m = MlpModel::Random({6, 5, 4, 3, 2}, 8);
  Matrix x;
  std::vector<SadLabel> y;
  Blobs(9, 6, 1.0, 9, &x, &y);
  const auto grads = CrossEntropyGradients(m, x, y);
  const double h = 1e-5;
  double worst = 0.0;
  for (int l = 0; l < m.NumLayers(); ++l) {
    auto check = [&](auto get, double analytic) {
      MlpModel p = m, q = m;
      get(p) += h;
      get(q) -= h;
      const double numeric = (CrossEntropy(p, x, y) - CrossEntropy(q, x, y)) / (2 * h);
      const double denom = std::max(1e-8, std::abs(numeric) + std::abs(analytic));
      worst = std::max(worst, std::abs(numeric - analytic) / denom);
    };
    const MlpLayer &g = grads[l];
    for (int i = 0; i < g.weights.rows(); ++i)
      for (int j = 0; j < g.weights.cols(); ++j)
        check([&](MlpModel &mm) -> double & { return mm.mutable_layers()[l].weights(i, j); },
              g.weights(i, j));
    for (int i = 0; i < g.bias.size(); ++i)
      check([&](MlpModel &mm) -> double & { return mm.mutable_layers()[l].bias[i]; }, g.bias[i]);
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(TrainMlp, SeparableBlobs) {
  Matrix x;
  std::vector<SadLabel> y;
  Blobs(2000, 20, 2.5, 1, &x, &y);
  // The blobs are linearly separable up to noise: a mean-difference classifier
  // already gets most points right.
  Vector mu_sp = Vector::Zero(20), mu_nsp = Vector::Zero(20);
  for (int i = 0; i < 2000; ++i) (y[i] == SadLabel::kSpeech ? mu_sp : mu_nsp) += x.row(i).transpose();
  mu_sp /= 1000.0;
  mu_nsp /= 1000.0;
  const Vector w = mu_sp - mu_nsp;
  const double b = -0.5 * (mu_sp + mu_nsp).dot(w);
  int lin_ok = 0;
  for (int i = 0; i < 2000; ++i)
    lin_ok += ((x.row(i).dot(w) + b > 0) == (y[i] == SadLabel::kSpeech));
  ASSERT_GT(lin_ok, 1900);

  MlpTrainOptions o;
  o.hidden = {16, 8};
  o.seed = 3;
  o.epochs = 200;
  o.selected_epoch = 150;
  const MlpTrainResult r = TrainMlp(x, y, o);
  ASSERT_EQ(r.train_loss.size(), 201u);
  ASSERT_EQ(r.checkpoints.size(), 201u);
  EXPECT_EQ(r.model, r.checkpoints[150]);
  EXPECT_EQ(r.model.selected_epoch(), 150);
  for (int e = 1; e <= 5; ++e) EXPECT_LT(r.train_loss[e], r.train_loss[e - 1]);
  const auto probs = r.model.Forward(x).back();
  int ok = 0;
  for (int i = 0; i < 2000; ++i) ok += (probs(i, 1) > probs(i, 0)) == (y[i] == SadLabel::kSpeech);
  EXPECT_GT(ok, 0.95 * 2000);

  const MlpTrainResult again = TrainMlp(x, y, o);
  EXPECT_EQ(r.model, again.model);
}

TEST(TrainMlp, ZeroEpochsAndErrors) {
  Matrix x;
  std::vector<SadLabel> y;
  Blobs(400, 10, 1.0, 2, &x, &y);
  MlpTrainOptions o;
  o.hidden = {8};
  o.epochs = 0;
  o.selected_epoch = 0;
  const MlpTrainResult r = TrainMlp(x, y, o);
  EXPECT_EQ(r.model, MlpModel::Random({10, 8, 2}, o.seed));
  EXPECT_NEAR(CrossEntropy(r.model, x, y), std::log(2.0), 0.1);

  std::vector<SadLabel> one(400, SadLabel::kSpeech);
  o.epochs = 2;
  o.selected_epoch = 2;
  EXPECT_THROW(TrainMlp(x, one, o), DataError);
  Matrix huge = x * 1e200;
  o.learning_rate = 1e10;
  try {
    TrainMlp(huge, y, o);
    FAIL();
  } catch (const DataError &e) {
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("batch"), std::string::npos);
  }
}

TEST(Embeddings, Examples) {
  std::vector<MlpLayer> zero = {{Matrix::Zero(4, 4), Vector::Zero(4)},
                                {Matrix::Zero(2, 4), Vector::Zero(2)}};
  const Vector x = (Vector(4) << 1, -2, 3, 0.5).finished();
  EXPECT_EQ(ExtractEmbedding(x, MlpModel(zero)), Vector::Zero(4));
  std::vector<MlpLayer> ident = {{Matrix::Identity(4, 4), Vector::Zero(4)},
                                 {Matrix::Zero(2, 4), Vector::Zero(2)}};
  const Vector pos = x.cwiseAbs();
  EXPECT_EQ(ExtractEmbedding(pos, MlpModel(ident)), pos);
  EXPECT_THROW(ExtractEmbedding(Vector::Zero(3), MlpModel(ident)), std::invalid_argument);
}

TEST(Embeddings, ClassMeans) {
  const MlpModel m = MlpModel::Random({6, 5, 2}, 4);
  Matrix x;
  std::vector<SadLabel> y;
  Blobs(2, 6, 2.0, 5, &x, &y);
  auto [sp, nsp] = ClassEmbeddings(x, y, m);
  EXPECT_EQ(sp, ExtractEmbedding(x.row(0).transpose(), m));
  EXPECT_EQ(nsp, ExtractEmbedding(x.row(1).transpose(), m));
  Matrix dup(4, 6);
  dup << x, x;
  std::vector<SadLabel> ydup = y;
  ydup.insert(ydup.end(), y.begin(), y.end());
  auto [sp2, nsp2] = ClassEmbeddings(dup, ydup, m);
  EXPECT_LT((sp2 - sp).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((nsp2 - nsp).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(ClassEmbeddings(x, {SadLabel::kSpeech, SadLabel::kSpeech}, m), DataError);
}

TEST(Embeddings, ClassVectorsSeparateOnTrainedModel) {
  Matrix x;
  std::vector<SadLabel> y;
  Blobs(1000, 12, 2.0, 6, &x, &y);
  MlpTrainOptions o;
  o.hidden = {16, 8};
  const MlpModel m = TrainMlp(x, y, o).model;
  auto [sp, nsp] = ClassEmbeddings(x, y, m);
  auto cosine = [](const Vector &a, const Vector &b) { return a.dot(b) / (a.norm() * b.norm()); };
  double mean_sp = 0.0;
  int n = 0;
  for (int i = 0; i < 1000; ++i)
    if (y[i] == SadLabel::kSpeech) {
      const Vector e = ExtractEmbedding(x.row(i).transpose(), m);
      if (e.norm() > 0) {
        mean_sp += cosine(sp, e);
        ++n;
      }
    }
  EXPECT_LT(cosine(sp, nsp), mean_sp / n);
}

}  // namespace
}  // namespace olsad
