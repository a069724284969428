// include/olsad/common.h

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

#ifndef OLSAD_COMMON_H_
#define OLSAD_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace olsad {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Frame-indexed feature sequence; element t is the vector of frame t.
using FrameSequence = std::vector<Vector>;

/// Raised for malformed or unusable input data (files, corpora, labels).
/// Programming errors and violated preconditions use std::invalid_argument.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string &what) : std::runtime_error(what) {}
};

enum class SadLabel : std::uint8_t { kNonSpeech = 0, kSpeech = 1 };

const char *LabelName(SadLabel label);

/// splitmix64-seeded xoshiro256** generator. Used instead of <random>
/// distributions so that trained models are identical across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t Next();
  /// Uniform in [0, 1).
  double Uniform();
  /// Standard normal (Box-Muller, no caching).
  double Normal();
  /// Uniform integer in [0, n).
  std::uint64_t Below(std::uint64_t n);

 private:
  std::uint64_t s_[4];
};

/// Stacks a frame sequence into a row-per-frame matrix.
Matrix StackRows(const FrameSequence &frames);

inline int64_t ClampIndex(int64_t t, int64_t size) {
  return t < 0 ? 0 : (t >= size ? size - 1 : t);
}

}  // namespace olsad

#endif  // OLSAD_COMMON_H_
