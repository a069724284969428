// src/diag-gmm.cc

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

#include "olsad/diag-gmm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace olsad {

Gmm::Gmm(Vector weights, Matrix means, Matrix variances)
    : weights_(std::move(weights)),
      means_(std::move(means)),
      variances_(std::move(variances)) {
  const Eigen::Index c = weights_.size();
  if (c == 0 || means_.rows() != c || variances_.rows() != c ||
      variances_.cols() != means_.cols() || means_.cols() == 0)
    throw std::invalid_argument("Gmm: inconsistent parameter shapes");
  if ((weights_.array() < 0.0).any() || std::abs(weights_.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("Gmm: weights must be a simplex");
  if (!(variances_.array() > 0.0).all() || !variances_.allFinite() ||
      !means_.allFinite())
    throw std::invalid_argument("Gmm: variances must be positive and finite");

  inv_vars_ = variances_.cwiseInverse();
  means_invvars_ = means_.cwiseProduct(inv_vars_);
  gconsts_.resize(c);
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  for (Eigen::Index i = 0; i < c; ++i) {
    double g = std::log(weights_[i]);  // -inf for a dead component
    for (Eigen::Index d = 0; d < means_.cols(); ++d)
      g -= 0.5 * (log_2pi + std::log(variances_(i, d)) +
                  means_(i, d) * means_invvars_(i, d));
    gconsts_[i] = g;
  }
}

Vector Gmm::LogJointLikelihoods(const Vector &x) const {
  if (x.size() != means_.cols())
    throw std::invalid_argument("Gmm: dimension mismatch (got " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(means_.cols()) + ")");
  Vector out = gconsts_;
  out.noalias() += means_invvars_ * x;
  out.noalias() -= 0.5 * (inv_vars_ * x.cwiseAbs2());
  return out;
}

Matrix Gmm::LogJointLikelihoods(const Matrix &frames) const {
  if (frames.cols() != means_.cols())
    throw std::invalid_argument("Gmm: dimension mismatch");
  Matrix out = frames * means_invvars_.transpose();
  out.noalias() -= 0.5 * (frames.cwiseAbs2() * inv_vars_.transpose());
  out.rowwise() += gconsts_.transpose();
  return out;
}

double Gmm::LogLikelihood(const Vector &x) const {
  const Vector l = LogJointLikelihoods(x);
  const double m = l.maxCoeff();
  return m + std::log((l.array() - m).exp().sum());
}

Vector Gmm::Posteriors(const Vector &x) const {
  Vector l = LogJointLikelihoods(x);
  const double m = l.maxCoeff();
  Vector p = (l.array() - m).exp();
  return p / p.sum();
}

Vector LogSumExpNormalizeRows(Matrix *loglikes) {
  Matrix &l = *loglikes;
  Vector total(l.rows());
  for (Eigen::Index t = 0; t < l.rows(); ++t) {
    const double m = l.row(t).maxCoeff();
    l.row(t) = (l.row(t).array() - m).exp();
    const double s = l.row(t).sum();
    l.row(t) /= s;
    total[t] = m + std::log(s);
  }
  return total;
}

namespace {

constexpr Eigen::Index kBlockRows = 4096;

// k-means++ seeding followed by one hard assignment pass.
Gmm InitializeGmm(const Matrix &data, int n_components, const Vector &global_var,
                  Rng *rng) {
  const Eigen::Index n = data.rows();
  std::vector<Eigen::Index> centers;
  centers.push_back(static_cast<Eigen::Index>(rng->Below(n)));
  Vector dist2 = (data.rowwise() - data.row(centers[0])).rowwise().squaredNorm();
  while (static_cast<int>(centers.size()) < n_components) {
    const double total = dist2.sum();
    Eigen::Index pick = 0;
    if (total <= 0.0) {
      pick = static_cast<Eigen::Index>(rng->Below(n));
    } else {
      const double r = rng->Uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += dist2[i];
        if (acc > r) {
          pick = i;
          break;
        }
      }
    }
    centers.push_back(pick);
    dist2 = dist2.cwiseMin(
        (data.rowwise() - data.row(pick)).rowwise().squaredNorm());
  }

  Matrix center_mat(n_components, data.cols());
  for (int c = 0; c < n_components; ++c) center_mat.row(c) = data.row(centers[c]);

  Vector counts = Vector::Zero(n_components);
  Matrix sums = Matrix::Zero(n_components, data.cols());
  const Vector center_norms = center_mat.rowwise().squaredNorm();
  for (Eigen::Index start = 0; start < n; start += kBlockRows) {
    const Eigen::Index rows = std::min(kBlockRows, n - start);
    const auto block = data.middleRows(start, rows);
    // ||x - c||^2 up to the per-row constant ||x||^2.
    Matrix d = -2.0 * (block * center_mat.transpose());
    d.rowwise() += center_norms.transpose();
    for (Eigen::Index t = 0; t < rows; ++t) {
      Eigen::Index best;
      d.row(t).minCoeff(&best);
      counts[best] += 1.0;
      sums.row(best) += block.row(t);
    }
  }

  Vector weights(n_components);
  Matrix means(n_components, data.cols());
  Matrix vars(n_components, data.cols());
  for (int c = 0; c < n_components; ++c) {
    weights[c] = (counts[c] + 1.0) / (static_cast<double>(n) + n_components);
    means.row(c) = counts[c] > 0 ? Vector(sums.row(c).transpose() / counts[c])
                                 : Vector(center_mat.row(c).transpose());
    vars.row(c) = global_var.transpose();
  }
  weights /= weights.sum();
  return Gmm(weights, means, vars);
}

}  // namespace

GmmTrainResult TrainGmmWithHistory(const Matrix &data, const GmmTrainOptions &opts) {
  if (data.rows() == 0 || data.cols() == 0)
    throw DataError("TrainGmm: empty data");
  if (opts.n_components < 1)
    throw std::invalid_argument("TrainGmm: n_components must be >= 1");
  if (data.rows() < opts.n_components)
    throw DataError("TrainGmm: " + std::to_string(data.rows()) +
                    " frames is fewer than " + std::to_string(opts.n_components) +
                    " components");
  if (opts.n_iters < 0) throw std::invalid_argument("TrainGmm: n_iters must be >= 0");
  if (!data.allFinite()) throw DataError("TrainGmm: non-finite data");

  const double n = static_cast<double>(data.rows());
  const Vector global_mean = data.colwise().mean().transpose();
  const Vector global_var =
      (data.rowwise() - global_mean.transpose()).colwise().squaredNorm().transpose() / n;
  for (Eigen::Index d = 0; d < global_var.size(); ++d)
    if (!(global_var[d] > 0.0))
      throw DataError("TrainGmm: dimension " + std::to_string(d) +
                      " has zero global variance");
  const Vector floor = opts.variance_floor_scale * global_var;

  Rng rng(opts.seed);
  GmmTrainResult result;
  result.gmm = InitializeGmm(data, opts.n_components, global_var, &rng);

  const int c_count = opts.n_components;
  for (int iter = 0;; ++iter) {
    Vector occ = Vector::Zero(c_count);
    Matrix sum_x = Matrix::Zero(c_count, data.cols());
    Matrix sum_xx = Matrix::Zero(c_count, data.cols());
    double total_ll = 0.0;
    for (Eigen::Index start = 0; start < data.rows(); start += kBlockRows) {
      const Eigen::Index rows = std::min(kBlockRows, data.rows() - start);
      const auto block = data.middleRows(start, rows);
      Matrix post = result.gmm.LogJointLikelihoods(Matrix(block));
      total_ll += LogSumExpNormalizeRows(&post).sum();
      if (iter == opts.n_iters) continue;
      occ += post.colwise().sum().transpose();
      sum_x.noalias() += post.transpose() * block;
      sum_xx.noalias() += post.transpose() * block.cwiseAbs2();
    }
    result.log_likelihoods.push_back(total_ll);
    if (iter == opts.n_iters) break;

    const Gmm &prev = result.gmm;
    Vector weights = occ / occ.sum();
    Matrix means = prev.means();
    Matrix vars = prev.variances();
    for (int c = 0; c < c_count; ++c) {
      // A component with (numerically) no data keeps its parameters; its
      // weight goes to ~0 so it cannot affect the likelihood.
      if (occ[c] < 1e-10) continue;
      means.row(c) = sum_x.row(c) / occ[c];
      vars.row(c) = sum_xx.row(c) / occ[c] - means.row(c).cwiseAbs2();
      for (Eigen::Index d = 0; d < data.cols(); ++d)
        vars(c, d) = std::max(vars(c, d), floor[d]);
    }
    result.gmm = Gmm(weights, means, vars);
  }
  return result;
}

Gmm TrainGmm(const Matrix &data, int n_components, int n_iters, std::uint64_t seed) {
  GmmTrainOptions opts;
  opts.n_components = n_components;
  opts.n_iters = n_iters;
  opts.seed = seed;
  return TrainGmmWithHistory(data, opts).gmm;
}

Gmm MergeGmms(const Gmm &g_sp, const Gmm &g_nsp, double weight_sp) {
  if (g_sp.Dim() != g_nsp.Dim())
    throw std::invalid_argument("MergeGmms: dimension mismatch");
  if (!(weight_sp > 0.0 && weight_sp < 1.0))
    throw std::invalid_argument("MergeGmms: weight_sp must be in (0, 1)");
  const int c1 = g_sp.NumComponents(), c2 = g_nsp.NumComponents();
  Vector w(c1 + c2);
  w.head(c1) = weight_sp * g_sp.weights();
  w.tail(c2) = (1.0 - weight_sp) * g_nsp.weights();
  Matrix means(c1 + c2, g_sp.Dim()), vars(c1 + c2, g_sp.Dim());
  means << g_sp.means(), g_nsp.means();
  vars << g_sp.variances(), g_nsp.variances();
  return Gmm(w, means, vars);
}

BaumWelchStats::BaumWelchStats(int num_components, int dim)
    : zero_order(Vector::Zero(num_components)),
      first_order(Matrix::Zero(num_components, dim)) {}

BaumWelchStats &BaumWelchStats::operator+=(const BaumWelchStats &other) {
  if (zero_order.size() != other.zero_order.size() ||
      first_order.cols() != other.first_order.cols())
    throw std::invalid_argument("BaumWelchStats: shape mismatch");
  zero_order += other.zero_order;
  first_order += other.first_order;
  frame_count += other.frame_count;
  return *this;
}

BaumWelchStats AccumulateStats(std::span<const Vector> frames, const Gmm &ubm) {
  if (frames.empty()) throw std::invalid_argument("AccumulateStats: no frames");
  BaumWelchStats stats(ubm.NumComponents(), ubm.Dim());
  for (const Vector &x : frames) {
    const Vector post = ubm.Posteriors(x);
    stats.zero_order += post;
    for (int c = 0; c < ubm.NumComponents(); ++c)
      stats.first_order.row(c) += post[c] * (x.transpose() - ubm.means().row(c));
    stats.frame_count += 1.0;
  }
  return stats;
}

Vector ZeroOrderStats(std::span<const Vector> frames, const Gmm &ubm) {
  Vector n = Vector::Zero(ubm.NumComponents());
  for (const Vector &x : frames) n += ubm.Posteriors(x);
  return n;
}

}  // namespace olsad
