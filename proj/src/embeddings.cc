// src/embeddings.cc

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

#include "olsad/embeddings.h"

#include <algorithm>
#include <stdexcept>

namespace olsad {

Vector MakeSupervector(const BaumWelchStats &stats) {
  const Eigen::Index c = stats.zero_order.size();
  const Eigen::Index d = stats.first_order.cols();
  if (stats.first_order.rows() != c)
    throw std::invalid_argument("MakeSupervector: inconsistent statistics");
  Vector sv(c * d);
  for (Eigen::Index i = 0; i < c; ++i)
    sv.segment(i * d, d) = stats.first_order.row(i).transpose() /
                           std::max(stats.zero_order[i], kSupervectorCountFloor);
  return sv;
}

Vector ExtractEmbedding(const Vector &sv, const MlpModel &model) {
  return model.FirstHidden(sv);
}

std::pair<Vector, Vector> ClassEmbeddings(const Matrix &supervectors,
                                          const std::vector<SadLabel> &labels,
                                          const MlpModel &model) {
  if (static_cast<size_t>(supervectors.rows()) != labels.size())
    throw std::invalid_argument("ClassEmbeddings: row/label count mismatch");
  const Eigen::Index dim = model.layers().at(0).weights.rows();
  Vector sp = Vector::Zero(dim), nsp = Vector::Zero(dim);
  double n_sp = 0.0, n_nsp = 0.0;
  for (Eigen::Index r = 0; r < supervectors.rows(); ++r) {
    const Vector e = ExtractEmbedding(supervectors.row(r).transpose(), model);
    if (labels[static_cast<size_t>(r)] == SadLabel::kSpeech) {
      sp += e;
      n_sp += 1.0;
    } else {
      nsp += e;
      n_nsp += 1.0;
    }
  }
  if (n_sp == 0.0 || n_nsp == 0.0)
    throw DataError("ClassEmbeddings: a class has no training segments");
  return {sp / n_sp, nsp / n_nsp};
}

}  // namespace olsad
