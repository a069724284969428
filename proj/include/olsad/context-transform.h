// include/olsad/context-transform.h

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

#ifndef OLSAD_CONTEXT_TRANSFORM_H_
#define OLSAD_CONTEXT_TRANSFORM_H_

#include <cstdint>
#include <deque>
#include <map>
#include <vector>

#include "olsad/common.h"
#include "olsad/diag-gmm.h"
#include "olsad/frame-window.h"

namespace olsad {

/// Frame offsets (relative to t) concatenated into one context vector.
struct ContextSpec {
  std::vector<int> offsets;

  /// t-10, t-8, ..., t+10 (11 frames).
  static ContextSpec Lda();
  /// t-9, t-6, ..., t+9 (7 frames).
  static ContextSpec Pca();

  /// Offsets must be strictly increasing and contain 0.
  void Validate() const;
  int Left() const { return -offsets.front(); }
  int Right() const { return offsets.back(); }
  int size() const { return static_cast<int>(offsets.size()); }

  bool operator==(const ContextSpec &) const = default;
};

/// Concatenates frames t + offset in offset order; out-of-range indices are
/// clamped (edge replication).
Vector StackContext(const FrameSequence &frames, const ContextSpec &spec, int64_t t);

template <class Get, class Clamp>
Vector StackContextWith(Get &&get, Clamp &&clamp, const ContextSpec &spec,
                        int64_t t) {
  const Eigen::Index dim = get(clamp(t)).size();
  Vector out(dim * spec.size());
  for (int i = 0; i < spec.size(); ++i)
    out.segment(i * dim, dim) = get(clamp(t + spec.offsets[i]));
  return out;
}

enum class TransformKind : std::uint32_t { kLda = 0, kPca = 1 };

/// y = matrix * (x - mean_offset).
struct LinearTransform {
  Matrix matrix;       // output_dim x input_dim
  Vector mean_offset;  // input_dim
  TransformKind kind = TransformKind::kPca;

  int InputDim() const { return static_cast<int>(matrix.cols()); }
  int OutputDim() const { return static_cast<int>(matrix.rows()); }
  Vector Apply(const Vector &x) const;
};

/// Acoustic class of each frame: argmax-posterior component of `ubm1` times
/// two, plus one for non-speech frames.
std::vector<int> AcousticLabels(const FrameSequence &frames, const Gmm &ubm1,
                                const std::vector<SadLabel> &sp_labels);

/// Streaming scatter accumulation for LDA. Statistics are gathered around
/// a shift point (the first vector seen) to limit cancellation.
class LdaAccumulator {
 public:
  explicit LdaAccumulator(int dim);
  void Accumulate(const Vector &x, int class_id);

  /// Classes with fewer than 2 vectors are dropped. Within-class scatter is
  /// regularized by adding 1e-4 * trace / dim to its diagonal. Throws
  /// std::invalid_argument if fewer than 2 usable classes remain or
  /// out_dim > min(dim, classes - 1).
  LinearTransform Estimate(int out_dim) const;

  int UsableClasses() const;

 private:
  void Flush() const;

  int dim_;
  bool have_shift_ = false;
  Vector shift_;
  std::map<int, std::pair<double, Vector>> classes_;  // count, shifted sum
  mutable Matrix scatter_;                             // sum of shifted outer products
  mutable Matrix pending_;
  mutable Eigen::Index pending_rows_ = 0;
};

LinearTransform TrainLda(const FrameSequence &vectors,
                         const std::vector<int> &class_ids, int out_dim);

class PcaAccumulator {
 public:
  explicit PcaAccumulator(int dim);
  void Accumulate(const Vector &x);
  /// Top out_dim eigenvectors of the sample covariance as orthonormal rows.
  /// Throws std::invalid_argument with fewer than 2 samples or
  /// out_dim > dim.
  LinearTransform Estimate(int out_dim) const;
  int64_t count() const { return count_; }

 private:
  void Flush() const;

  int dim_;
  int64_t count_ = 0;
  bool have_shift_ = false;
  Vector shift_;
  Vector sum_;
  mutable Matrix scatter_;
  mutable Matrix pending_;
  mutable Eigen::Index pending_rows_ = 0;
};

LinearTransform TrainPca(const FrameSequence &vectors, int out_dim);

/// Streaming two-stage transform: stack(lda_spec) -> LDA -> stack(pca_spec)
/// -> PCA. Identical to the batch composition for any input chunking.
class OnlineContextTransform {
 public:
  OnlineContextTransform(const LinearTransform &lda, const ContextSpec &lda_spec,
                         const LinearTransform &pca, const ContextSpec &pca_spec);

  void Accept(Vector frame);
  void InputFinished();
  bool FrameReady() const { return !ready_.empty(); }
  Vector PopFrame();

  int LookaheadFrames() const { return lda_spec_.Right() + pca_spec_.Right(); }
  /// Seconds spent in each stage since construction.
  double lda_seconds() const { return lda_seconds_; }
  double pca_seconds() const { return pca_seconds_; }

 private:
  void Drain();

  const LinearTransform &lda_;
  const LinearTransform &pca_;
  ContextSpec lda_spec_, pca_spec_;
  FrameWindow lda_window_, pca_window_;
  bool finished_ = false;
  std::deque<Vector> ready_;
  double lda_seconds_ = 0.0, pca_seconds_ = 0.0;
};

/// Batch form of the two-stage transform over one file.
FrameSequence ApplyContextTransform(const FrameSequence &frames,
                                    const LinearTransform &lda,
                                    const ContextSpec &lda_spec,
                                    const LinearTransform &pca,
                                    const ContextSpec &pca_spec);

}  // namespace olsad

#endif  // OLSAD_CONTEXT_TRANSFORM_H_
