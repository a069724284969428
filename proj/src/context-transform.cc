// src/context-transform.cc

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

#include "olsad/context-transform.h"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>
#include <string>

namespace olsad {

namespace {

constexpr Eigen::Index kScatterBlock = 256;

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

// Indices of `values` sorted by decreasing value; ties keep index order.
std::vector<Eigen::Index> DescendingOrder(const Vector &values) {
  std::vector<Eigen::Index> idx(static_cast<size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return values[a] > values[b];
  });
  return idx;
}

// Flips the sign of each row so its largest-magnitude entry is positive.
void CanonicalizeSigns(Matrix *rows) {
  for (Eigen::Index r = 0; r < rows->rows(); ++r) {
    Eigen::Index arg;
    rows->row(r).cwiseAbs().maxCoeff(&arg);
    if ((*rows)(r, arg) < 0.0) rows->row(r) *= -1.0;
  }
}

void FlushScatter(Matrix *scatter, Matrix *pending, Eigen::Index *rows) {
  if (*rows == 0) return;
  scatter->selfadjointView<Eigen::Lower>().rankUpdate(
      pending->topRows(*rows).transpose());
  *rows = 0;
}

Matrix FullSymmetric(const Matrix &lower) {
  return Matrix(lower.selfadjointView<Eigen::Lower>());
}

}  // namespace

ContextSpec ContextSpec::Lda() {
  ContextSpec s;
  for (int o = -10; o <= 10; o += 2) s.offsets.push_back(o);
  return s;
}

ContextSpec ContextSpec::Pca() {
  ContextSpec s;
  for (int o = -9; o <= 9; o += 3) s.offsets.push_back(o);
  return s;
}

void ContextSpec::Validate() const {
  if (offsets.empty()) throw std::invalid_argument("ContextSpec: no offsets");
  for (size_t i = 1; i < offsets.size(); ++i)
    if (offsets[i] <= offsets[i - 1])
      throw std::invalid_argument("ContextSpec: offsets must be strictly increasing");
  if (std::find(offsets.begin(), offsets.end(), 0) == offsets.end())
    throw std::invalid_argument("ContextSpec: offsets must contain 0");
}

Vector StackContext(const FrameSequence &frames, const ContextSpec &spec, int64_t t) {
  if (frames.empty()) throw std::invalid_argument("StackContext: empty frame sequence");
  const int64_t n = static_cast<int64_t>(frames.size());
  if (t < 0 || t >= n) throw std::invalid_argument("StackContext: frame index out of range");
  return StackContextWith([&](int64_t j) -> const Vector & { return frames[j]; },
                          [n](int64_t j) { return ClampIndex(j, n); }, spec, t);
}

Vector LinearTransform::Apply(const Vector &x) const {
  if (x.size() != matrix.cols())
    throw std::invalid_argument("LinearTransform: dimension mismatch (got " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(matrix.cols()) + ")");
  return matrix * (x - mean_offset);
}

std::vector<int> AcousticLabels(const FrameSequence &frames, const Gmm &ubm1,
                                const std::vector<SadLabel> &sp_labels) {
  if (frames.size() != sp_labels.size())
    throw std::invalid_argument("AcousticLabels: frame/label count mismatch");
  std::vector<int> ids(frames.size());
  for (size_t t = 0; t < frames.size(); ++t) {
    if (frames[t].size() != ubm1.Dim())
      throw std::invalid_argument("AcousticLabels: frame dimension " +
                                  std::to_string(frames[t].size()) +
                                  " does not match UBM dimension " +
                                  std::to_string(ubm1.Dim()));
    Eigen::Index best;
    ubm1.LogJointLikelihoods(frames[t]).maxCoeff(&best);
    ids[t] = static_cast<int>(best) * 2 + (sp_labels[t] == SadLabel::kSpeech ? 0 : 1);
  }
  return ids;
}

LdaAccumulator::LdaAccumulator(int dim)
    : dim_(dim),
      scatter_(Matrix::Zero(dim, dim)),
      pending_(kScatterBlock, dim) {}

void LdaAccumulator::Accumulate(const Vector &x, int class_id) {
  if (x.size() != dim_) throw std::invalid_argument("LdaAccumulator: dimension mismatch");
  if (!have_shift_) {
    shift_ = x;
    have_shift_ = true;
  }
  const Vector y = x - shift_;
  auto it = classes_.find(class_id);
  if (it == classes_.end())
    it = classes_.emplace(class_id, std::make_pair(0.0, Vector(Vector::Zero(dim_)))).first;
  it->second.first += 1.0;
  it->second.second += y;
  pending_.row(pending_rows_++) = y.transpose();
  if (pending_rows_ == kScatterBlock) Flush();
}

void LdaAccumulator::Flush() const { FlushScatter(&scatter_, &pending_, &pending_rows_); }

int LdaAccumulator::UsableClasses() const {
  int n = 0;
  for (const auto &[id, stat] : classes_)
    if (stat.first >= 2.0) ++n;
  return n;
}

LinearTransform LdaAccumulator::Estimate(int out_dim) const {
  Flush();
  const int n_classes = UsableClasses();
  if (n_classes < 2)
    throw std::invalid_argument("TrainLda: need at least 2 classes with >= 2 samples");
  if (out_dim < 1 || out_dim > std::min(dim_, n_classes - 1))
    throw std::invalid_argument("TrainLda: out_dim " + std::to_string(out_dim) +
                                " exceeds min(input_dim, classes - 1) = " +
                                std::to_string(std::min(dim_, n_classes - 1)));

  Matrix total = FullSymmetric(scatter_);
  Matrix class_part = Matrix::Zero(dim_, dim_);
  Vector sum = Vector::Zero(dim_);
  double count = 0.0;
  for (const auto &[id, stat] : classes_) {
    const Matrix outer = stat.second * stat.second.transpose() / stat.first;
    if (stat.first < 2.0) {
      total -= outer;  // a dropped class leaves the scatter as well
      continue;
    }
    class_part += outer;
    sum += stat.second;
    count += stat.first;
  }
  const Vector mean = sum / count;
  Matrix within = (total - class_part) / count;
  Matrix between = class_part / count - mean * mean.transpose();
  within = 0.5 * (within + within.transpose());
  between = 0.5 * (between + between.transpose());
  within.diagonal().array() += 1e-4 * within.trace() / dim_;

  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(between, within);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("TrainLda: eigen decomposition failed");
  const std::vector<Eigen::Index> order = DescendingOrder(solver.eigenvalues());
  LinearTransform t;
  t.kind = TransformKind::kLda;
  t.matrix.resize(out_dim, dim_);
  for (int r = 0; r < out_dim; ++r)
    t.matrix.row(r) = solver.eigenvectors().col(order[r]).transpose();
  CanonicalizeSigns(&t.matrix);
  t.mean_offset = shift_ + mean;
  return t;
}

LinearTransform TrainLda(const FrameSequence &vectors,
                         const std::vector<int> &class_ids, int out_dim) {
  if (vectors.size() != class_ids.size())
    throw std::invalid_argument("TrainLda: vector/class count mismatch");
  if (vectors.empty()) throw std::invalid_argument("TrainLda: no data");
  LdaAccumulator acc(static_cast<int>(vectors[0].size()));
  for (size_t i = 0; i < vectors.size(); ++i) acc.Accumulate(vectors[i], class_ids[i]);
  return acc.Estimate(out_dim);
}

PcaAccumulator::PcaAccumulator(int dim)
    : dim_(dim),
      sum_(Vector::Zero(dim)),
      scatter_(Matrix::Zero(dim, dim)),
      pending_(kScatterBlock, dim) {}

void PcaAccumulator::Accumulate(const Vector &x) {
  if (x.size() != dim_) throw std::invalid_argument("PcaAccumulator: dimension mismatch");
  if (!have_shift_) {
    shift_ = x;
    have_shift_ = true;
  }
  const Vector y = x - shift_;
  sum_ += y;
  ++count_;
  pending_.row(pending_rows_++) = y.transpose();
  if (pending_rows_ == kScatterBlock) Flush();
}

void PcaAccumulator::Flush() const { FlushScatter(&scatter_, &pending_, &pending_rows_); }

LinearTransform PcaAccumulator::Estimate(int out_dim) const {
  if (count_ < 2) throw std::invalid_argument("TrainPca: need at least 2 samples");
  if (out_dim < 1 || out_dim > dim_)
    throw std::invalid_argument("TrainPca: out_dim must be in [1, input_dim]");
  Flush();
  const double n = static_cast<double>(count_);
  const Vector mean = sum_ / n;
  Matrix cov = FullSymmetric(scatter_) / n - mean * mean.transpose();
  cov = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("TrainPca: eigen decomposition failed");
  const std::vector<Eigen::Index> order = DescendingOrder(solver.eigenvalues());
  LinearTransform t;
  t.kind = TransformKind::kPca;
  t.matrix.resize(out_dim, dim_);
  for (int r = 0; r < out_dim; ++r)
    t.matrix.row(r) = solver.eigenvectors().col(order[r]).transpose();
  CanonicalizeSigns(&t.matrix);
  t.mean_offset = shift_ + mean;
  return t;
}

LinearTransform TrainPca(const FrameSequence &vectors, int out_dim) {
  if (vectors.size() < 2) throw std::invalid_argument("TrainPca: need at least 2 samples");
  PcaAccumulator acc(static_cast<int>(vectors[0].size()));
  for (const Vector &v : vectors) acc.Accumulate(v);
  return acc.Estimate(out_dim);
}

OnlineContextTransform::OnlineContextTransform(const LinearTransform &lda,
                                               const ContextSpec &lda_spec,
                                               const LinearTransform &pca,
                                               const ContextSpec &pca_spec)
    : lda_(lda),
      pca_(pca),
      lda_spec_(lda_spec),
      pca_spec_(pca_spec),
      lda_window_(lda_spec.Left(), lda_spec.Right()),
      pca_window_(pca_spec.Left(), pca_spec.Right()) {
  lda_spec.Validate();
  pca_spec.Validate();
}

void OnlineContextTransform::Accept(Vector frame) {
  lda_window_.Push(std::move(frame));
  Drain();
}

void OnlineContextTransform::InputFinished() {
  lda_window_.Finish();
  finished_ = true;
  Drain();
}

void OnlineContextTransform::Drain() {
  auto start = std::chrono::steady_clock::now();
  while (lda_window_.Ready()) {
    const Vector stacked = StackContextWith(
        [this](int64_t j) -> const Vector & { return lda_window_.At(j); },
        [this](int64_t j) { return lda_window_.Clamp(j); }, lda_spec_,
        lda_window_.next());
    pca_window_.Push(lda_.Apply(stacked));
    lda_window_.Advance();
  }
  // All first-stage outputs exist once the input is finished.
  if (finished_) pca_window_.Finish();
  lda_seconds_ += Seconds(start);

  start = std::chrono::steady_clock::now();
  while (pca_window_.Ready()) {
    const Vector stacked = StackContextWith(
        [this](int64_t j) -> const Vector & { return pca_window_.At(j); },
        [this](int64_t j) { return pca_window_.Clamp(j); }, pca_spec_,
        pca_window_.next());
    ready_.push_back(pca_.Apply(stacked));
    pca_window_.Advance();
  }
  pca_seconds_ += Seconds(start);
}

Vector OnlineContextTransform::PopFrame() {
  Vector v = std::move(ready_.front());
  ready_.pop_front();
  return v;
}

FrameSequence ApplyContextTransform(const FrameSequence &frames,
                                    const LinearTransform &lda,
                                    const ContextSpec &lda_spec,
                                    const LinearTransform &pca,
                                    const ContextSpec &pca_spec) {
  FrameSequence first;
  first.reserve(frames.size());
  for (size_t t = 0; t < frames.size(); ++t)
    first.push_back(lda.Apply(StackContext(frames, lda_spec, static_cast<int64_t>(t))));
  FrameSequence out;
  out.reserve(frames.size());
  for (size_t t = 0; t < first.size(); ++t)
    out.push_back(pca.Apply(StackContext(first, pca_spec, static_cast<int64_t>(t))));
  return out;
}

}  // namespace olsad
