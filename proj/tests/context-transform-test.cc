// tests/context-transform-test.cc

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

#include "olsad/context-transform.h"
#include "oracles.h"

namespace olsad {
namespace {

FrameSequence RandomFrames(int n, int d, uint64_t seed) {
  Rng rng(seed);
  FrameSequence f(n, Vector(d));
  for (auto &v : f)
    for (int j = 0; j < d; ++j) v[j] = rng.Normal();
  return f;
}

TEST(StackContext, DimensionsAndEdges) {
  const FrameSequence f36 = RandomFrames(30, 36, 1);
  EXPECT_EQ(StackContext(f36, ContextSpec::Lda(), 5).size(), 396);
  const FrameSequence f12 = RandomFrames(30, 12, 2);
  EXPECT_EQ(StackContext(f12, ContextSpec::Pca(), 5).size(), 84);
  const Vector v = StackContext(f36, ContextSpec::Lda(), 0);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(v.segment(36 * i, 36), f36[0]);  // offsets -10..0
  EXPECT_EQ(v.segment(36 * 6, 36), f36[2]);
  const Vector e = StackContext(f36, ContextSpec::Lda(), 29);
  EXPECT_EQ(e.tail(36), f36[29]);
}

TEST(ContextSpec, Validation) {
  EXPECT_NO_THROW(ContextSpec::Lda().Validate());
  EXPECT_THROW((ContextSpec{{1, 2}}).Validate(), std::invalid_argument);
  EXPECT_THROW((ContextSpec{{0, 0}}).Validate(), std::invalid_argument);
  EXPECT_EQ(ContextSpec::Lda().Right(), 10);
  EXPECT_EQ(ContextSpec::Pca().Right(), 9);
}

TEST(LinearTransform, Apply) {
  LinearTransform id{Matrix::Identity(4, 4), Vector::Zero(4), TransformKind::kPca};
  const Vector x = Vector::LinSpaced(4, -1.0, 2.0);
  EXPECT_EQ(id.Apply(x), x);
  LinearTransform t{Matrix::Random(3, 5), Vector::Random(5), TransformKind::kLda};
  EXPECT_EQ(t.Apply(t.mean_offset), Vector::Zero(3));
  const Vector y = Vector::Random(5);
  const Vector got = t.Apply(y);
  for (int i = 0; i < 3; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 5; ++j) acc += t.matrix(i, j) * (y[j] - t.mean_offset[j]);
    EXPECT_NEAR(got[i], acc, 1e-14);
  }
  EXPECT_THROW(t.Apply(Vector::Zero(4)), std::invalid_argument);
}

TEST(AcousticLabels, OneComponent) {
  Gmm g(Vector::Ones(1), Matrix::Zero(1, 2), Matrix::Ones(1, 2));
  const FrameSequence f = RandomFrames(10, 2, 3);
  std::vector<SadLabel> lab;
  for (int i = 0; i < 10; ++i) lab.push_back(i % 3 ? SadLabel::kSpeech : SadLabel::kNonSpeech);
  const auto ids = AcousticLabels(f, g, lab);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(ids[i], lab[i] == SadLabel::kNonSpeech ? 1 : 0);
}

TEST(AcousticLabels, MatchesBruteForceArgmax) {
  Rng rng(8);
  Matrix means(3, 2), vars(3, 2);
  for (int c = 0; c < 3; ++c)
    for (int d = 0; d < 2; ++d) {
      means(c, d) = 2.0 * rng.Normal();
      vars(c, d) = 0.5 + rng.Uniform();
    }
  Gmm g(Vector::Constant(3, 1.0 / 3), means, vars);
  const FrameSequence f = RandomFrames(20, 2, 4);
  std::vector<SadLabel> lab(20, SadLabel::kSpeech);
  const auto ids = AcousticLabels(f, g, lab);
  for (int t = 0; t < 20; ++t) {
    const auto p = oracle::NaivePosteriors(g, f[t]);
    const int arg = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    EXPECT_EQ(ids[t], 2 * arg);
  }
  // Frame at a well-separated mean.
  Gmm sep(Vector::Constant(3, 1.0 / 3), (Matrix(3, 2) << 0, 0, 10, 10, -10, 10).finished(),
          Matrix::Ones(3, 2));
  EXPECT_EQ(AcousticLabels({Vector::Constant(2, 10.0)}, sep, {SadLabel::kNonSpeech})[0], 3);
}

TEST(Lda, TwoClassDirectionMatchesClosedForm) {
  Rng rng(12);
  FrameSequence x;
  std::vector<int> ids;
  for (int i = 0; i < 4000; ++i) {
    const int c = i % 2;
    x.push_back((Vector(2) << rng.Normal() + (c ? 3.0 : 0.0), rng.Normal()).finished());
    ids.push_back(c);
  }
  const LinearTransform t = TrainLda(x, ids, 1);
  // Closed form: w proportional to Sw^-1 (mu1 - mu0).
  Vector mu[2] = {Vector::Zero(2), Vector::Zero(2)};
  double n[2] = {0, 0};
  for (size_t i = 0; i < x.size(); ++i) {
    mu[ids[i]] += x[i];
    n[ids[i]] += 1;
  }
  mu[0] /= n[0];
  mu[1] /= n[1];
  Matrix sw = Matrix::Zero(2, 2);
  for (size_t i = 0; i < x.size(); ++i) {
    const Vector d = x[i] - mu[ids[i]];
    sw += d * d.transpose();
  }
  const Vector w = sw.inverse() * (mu[1] - mu[0]);
  const Vector row = t.matrix.row(0).transpose();
  const double cosang = std::abs(row.dot(w)) / (row.norm() * w.norm());
  EXPECT_LT(std::acos(std::min(1.0, cosang)), 1e-3);
  EXPECT_GT(std::abs(row[0]), 10 * std::abs(row[1]));
  EXPECT_EQ(t.kind, TransformKind::kLda);
}

TEST(Lda, OrderInvarianceAndRankBound) {
  Rng rng(13);
  FrameSequence x;
  std::vector<int> ids;
  for (int i = 0; i < 600; ++i) {
    const int c = i % 3;
    x.push_back((Vector(3) << rng.Normal() + c, rng.Normal() - c, rng.Normal()).finished());
    ids.push_back(c);
  }
  const LinearTransform a = TrainLda(x, ids, 2);
  FrameSequence xr(x.rbegin(), x.rend());
  std::vector<int> ir(ids.rbegin(), ids.rend());
  const LinearTransform b = TrainLda(xr, ir, 2);
  EXPECT_LT((a.matrix - b.matrix).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_THROW(TrainLda(x, ids, 3), std::invalid_argument);
}

TEST(Lda, BeatsRandomProjection) {
  // Fisher ratio on held-out data versus random projections of equal rank.
  auto make = [](uint64_t seed, FrameSequence *x, std::vector<int> *ids) {
    Rng rng(seed);
    for (int i = 0; i < 1500; ++i) {
      const int c = i % 5;
      Vector v(6);
      for (int d = 0; d < 6; ++d) v[d] = rng.Normal() * (d < 2 ? 0.5 : 2.0);
      v[0] += c;
      v[1] -= 0.5 * c;
      x->push_back(v);
      ids->push_back(c);
    }
  };
  FrameSequence tr, te;
  std::vector<int> itr, ite;
  make(1, &tr, &itr);
  make(2, &te, &ite);
  auto ratio = [&](const Matrix &p) {
    std::vector<Vector> mu(5, Vector::Zero(p.rows()));
    std::vector<double> n(5, 0);
    Vector g = Vector::Zero(p.rows());
    for (size_t i = 0; i < te.size(); ++i) {
      const Vector y = p * te[i];
      mu[ite[i]] += y;
      n[ite[i]] += 1;
      g += y;
    }
    g /= static_cast<double>(te.size());
    Matrix sb = Matrix::Zero(p.rows(), p.rows()), sw = sb;
    for (int c = 0; c < 5; ++c) {
      mu[c] /= n[c];
      sb += n[c] * (mu[c] - g) * (mu[c] - g).transpose();
    }
    for (size_t i = 0; i < te.size(); ++i) {
      const Vector d = p * te[i] - mu[ite[i]];
      sw += d * d.transpose();
    }
    return (sw.inverse() * sb).trace();
  };
  const double lda = ratio(TrainLda(tr, itr, 2).matrix);
  Rng rng(3);
  int wins = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Matrix p(2, 6);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 6; ++j) p(i, j) = rng.Normal();
    wins += lda >= ratio(p);
  }
  EXPECT_GE(wins, 95);
}

TEST(Pca, LineAndMean) {
  FrameSequence x;
  const Vector dir = (Vector(3) << 1.0, 2.0, -2.0).finished();
  for (int i = 0; i < 50; ++i) x.push_back(Vector::Constant(3, 1.0) + (i - 20) * 0.1 * dir);
  const LinearTransform t = TrainPca(x, 1);
  const Vector row = t.matrix.row(0).transpose();
  EXPECT_NEAR(std::abs(row.dot(dir.normalized())), 1.0, 1e-9);
  for (const Vector &v : x) {
    const Vector rec = t.mean_offset + t.matrix.transpose() * t.Apply(v);
    EXPECT_LT((rec - v).cwiseAbs().maxCoeff(), 1e-9);
  }
  EXPECT_LT(t.Apply(t.mean_offset).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(TrainPca({x[0]}, 1), std::invalid_argument);
}

TEST(Pca, IsotropicCapturedVarianceAndOrthonormality) {
  Rng rng(21);
  FrameSequence x;
  for (int i = 0; i < 20000; ++i) {
    Vector v(8);
    for (int d = 0; d < 8; ++d) v[d] = rng.Normal();
    x.push_back(v);
  }
  const LinearTransform t = TrainPca(x, 4);
  const Matrix rrt = t.matrix * t.matrix.transpose();
  EXPECT_LT((rrt - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-6);
  // Oracle: eigenvalues of the direct covariance.
  Matrix cov = Matrix::Zero(8, 8);
  Vector mean = Vector::Zero(8);
  for (const Vector &v : x) mean += v;
  mean /= static_cast<double>(x.size());
  for (const Vector &v : x) cov += (v - mean) * (v - mean).transpose();
  cov /= static_cast<double>(x.size());
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  const double top4 = es.eigenvalues().tail(4).sum();
  const double captured = (t.matrix * cov * t.matrix.transpose()).trace();
  EXPECT_NEAR(captured, top4, 1e-8);
  EXPECT_NEAR(captured / cov.trace(), 0.5, 0.05);
}

TEST(OnlineContextTransform, MatchesBatchForAnyChunking) {
  Rng rng(5);
  LinearTransform lda{Matrix::Random(12, 36 * 11), Vector::Random(36 * 11), TransformKind::kLda};
  LinearTransform pca{Matrix::Random(24, 12 * 7), Vector::Random(12 * 7), TransformKind::kPca};
  for (int n : {1, 3, 15, 40}) {
    const FrameSequence f = RandomFrames(n, 36, 100 + n);
    const FrameSequence batch =
        ApplyContextTransform(f, lda, ContextSpec::Lda(), pca, ContextSpec::Pca());
    OnlineContextTransform online(lda, ContextSpec::Lda(), pca, ContextSpec::Pca());
    FrameSequence out;
    for (const Vector &v : f) {
      online.Accept(v);
      if (rng.Uniform() < 0.5)
        while (online.FrameReady()) out.push_back(online.PopFrame());
    }
    online.InputFinished();
    while (online.FrameReady()) out.push_back(online.PopFrame());
    ASSERT_EQ(out.size(), batch.size());
    for (size_t t = 0; t < out.size(); ++t) {
      EXPECT_EQ(out[t], batch[t]);
      EXPECT_EQ(out[t].size(), 24);
    }
    EXPECT_EQ(online.LookaheadFrames(), 19);
  }
}

}  // namespace
}  // namespace olsad
