// include/olsad/embeddings.h

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

#ifndef OLSAD_EMBEDDINGS_H_
#define OLSAD_EMBEDDINGS_H_

#include <utility>
#include <vector>

#include "olsad/common.h"
#include "olsad/diag-gmm.h"
#include "olsad/mlp.h"

namespace olsad {

/// Count floor applied before normalizing first-order statistics.
inline constexpr double kSupervectorCountFloor = 1e-3;

/// Concatenation over components of F_c / max(N_c, 1e-3).
Vector MakeSupervector(const BaumWelchStats &stats);

/// First-hidden-layer activation of `model` for supervector `sv`.
Vector ExtractEmbedding(const Vector &sv, const MlpModel &model);

/// Mean embedding of the speech and non-speech supervectors (rows of
/// `supervectors`). Returns {speech, non-speech}; throws DataError if a
/// class has no rows.
std::pair<Vector, Vector> ClassEmbeddings(const Matrix &supervectors,
                                          const std::vector<SadLabel> &labels,
                                          const MlpModel &model);

}  // namespace olsad

#endif  // OLSAD_EMBEDDINGS_H_
