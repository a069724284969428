// include/olsad/diag-gmm.h

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

#ifndef OLSAD_DIAG_GMM_H_
#define OLSAD_DIAG_GMM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "olsad/common.h"

namespace olsad {

/// Diagonal-covariance Gaussian mixture. Immutable once constructed; the
/// per-component normalizers are cached for fast likelihood evaluation.
class Gmm {
 public:
  Gmm() = default;
  /// weights: C; means, variances: C x D. Throws std::invalid_argument if
  /// weights are not a simplex (1e-9) or any variance is not positive.
  Gmm(Vector weights, Matrix means, Matrix variances);

  int NumComponents() const { return static_cast<int>(weights_.size()); }
  int Dim() const { return static_cast<int>(means_.cols()); }
  bool empty() const { return weights_.size() == 0; }

  const Vector &weights() const { return weights_; }
  const Matrix &means() const { return means_; }
  const Matrix &variances() const { return variances_; }

  /// log(w_c) + log N(x; m_c, diag(v_c)) for every component.
  Vector LogJointLikelihoods(const Vector &x) const;
  /// Same for each row of `frames` (T x D), result T x C.
  Matrix LogJointLikelihoods(const Matrix &frames) const;

  double LogLikelihood(const Vector &x) const;
  /// Component posteriors, computed with log-sum-exp.
  Vector Posteriors(const Vector &x) const;

 private:
  Vector weights_;
  Matrix means_;
  Matrix variances_;
  Vector gconsts_;       // log w_c - 0.5 sum_d (log 2 pi v + m^2 / v)
  Matrix inv_vars_;      // C x D
  Matrix means_invvars_; // C x D
};

/// Converts joint log-likelihoods to posteriors in place, row by row, and
/// returns the log-likelihood of each row.
Vector LogSumExpNormalizeRows(Matrix *loglikes);

struct GmmTrainOptions {
  int n_components = 32;
  int n_iters = 20;
  std::uint64_t seed = 0;
  /// Variances are floored at this fraction of the global per-dimension
  /// variance.
  double variance_floor_scale = 1e-3;
};

struct GmmTrainResult {
  Gmm gmm;
  /// Total data log-likelihood under the initial model and after every EM
  /// iteration (n_iters + 1 entries).
  std::vector<double> log_likelihoods;
};

/// EM training from a k-means++ seeded initialization. `data` holds one
/// frame per row. Throws DataError for empty data, fewer frames than
/// components, or a dimension with zero global variance.
GmmTrainResult TrainGmmWithHistory(const Matrix &data, const GmmTrainOptions &opts);
Gmm TrainGmm(const Matrix &data, int n_components, int n_iters, std::uint64_t seed);

/// Concatenates components (speech block first) with weights scaled by
/// weight_sp and 1 - weight_sp.
Gmm MergeGmms(const Gmm &g_sp, const Gmm &g_nsp, double weight_sp = 0.5);

struct BaumWelchStats {
  Vector zero_order;    // C
  Matrix first_order;   // C x D, centered: sum_t gamma_t(c) (x_t - m_c)
  double frame_count = 0.0;

  BaumWelchStats() = default;
  BaumWelchStats(int num_components, int dim);
  BaumWelchStats &operator+=(const BaumWelchStats &other);
};

/// Zero- and centered first-order statistics of `frames` under `ubm`.
BaumWelchStats AccumulateStats(std::span<const Vector> frames, const Gmm &ubm);

/// Zero-order statistics only.
Vector ZeroOrderStats(std::span<const Vector> frames, const Gmm &ubm);

}  // namespace olsad

#endif  // OLSAD_DIAG_GMM_H_
